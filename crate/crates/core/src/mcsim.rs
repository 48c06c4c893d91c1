//! Click-level Monte Carlo over the simulated interferometer.
//!
//! Each pulse draws a joint photon-number pair for the two detector arms
//! from the final network state (losses already folded in) and maps
//! `n >= 1` to a click, modelling threshold avalanche detectors. Pulses use
//! counter-based random streams keyed by `(seed, pulse index)`, so results
//! are bitwise reproducible and independent of any chunking or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correlate::modified_g2;
use crate::fock::FockBasis;
use crate::network::{run_network_state, NetworkError, NetworkSpec};
use crate::real::Real;

#[derive(Debug, Error)]
pub enum McError {
    #[error("shot plan needs at least one pulse")]
    NoPulses,
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("sweep plans must share one basis")]
    BasisMismatch,
}

/// One acquisition: how many pulses, from which seeded stream, through
/// which network.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShotPlan<R: Real> {
    pub pulses: u64,
    pub seed: u64,
    pub network: NetworkSpec<R>,
    pub basis: FockBasis,
}

/// Accumulated counts and the derived correlation estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRecord<R: Real> {
    pub pulses: u64,
    pub singles_1: u64,
    pub singles_2: u64,
    pub coincidences: u64,
    /// `(coincidence rate) / (product of singles rates)`; absent when either
    /// singles count is zero.
    pub g2_estimate: Option<R>,
    /// Standard error of the estimate by binomial propagation (including
    /// the count covariances); absent with the estimate.
    pub std_error: Option<R>,
}

/// Run the plan: simulate the network once, then sample pulses.
pub fn run_shots<R: Real>(plan: &ShotPlan<R>) -> Result<CountRecord<R>, McError> {
    if plan.pulses == 0 {
        return Err(McError::NoPulses);
    }
    let state = run_network_state(&plan.network, plan.basis)?;
    let joint = state.number_distribution(&[1, 2]).map_err(NetworkError::from)?;
    let cdf = cumulative(&joint);
    let n1 = plan.basis.cutoff() + 1;

    let mut singles_1 = 0u64;
    let mut singles_2 = 0u64;
    let mut coincidences = 0u64;
    for pulse in 0..plan.pulses {
        let u = pulse_uniform(plan.seed, pulse);
        let slot = sample_slot(&cdf, u);
        let (nb, nv) = (slot % n1, slot / n1);
        let click1 = nb >= 1;
        let click2 = nv >= 1;
        singles_1 += u64::from(click1);
        singles_2 += u64::from(click2);
        coincidences += u64::from(click1 && click2);
    }
    Ok(finish_record(plan.pulses, singles_1, singles_2, coincidences))
}

fn finish_record<R: Real>(
    pulses: u64,
    singles_1: u64,
    singles_2: u64,
    coincidences: u64,
) -> CountRecord<R> {
    let mut record = CountRecord {
        pulses,
        singles_1,
        singles_2,
        coincidences,
        g2_estimate: None,
        std_error: None,
    };
    if singles_1 > 0 && singles_2 > 0 {
        let p = pulses as f64;
        let p1 = singles_1 as f64 / p;
        let p2 = singles_2 as f64 / p;
        let p12 = coincidences as f64 / p;
        let g2 = p12 / (p1 * p2);
        record.g2_estimate = Some(R::from_f64_lit(g2));
        if coincidences > 0 {
            // Delta-method variance of ln g2 with the per-pulse indicator
            // covariances Cov(c12, c1) = p12 (1 - p1) and
            // Cov(c1, c2) = p12 - p1 p2:
            // Var(ln g2) = [ (1-p12)/p12 - (1-p1)/p1 - (1-p2)/p2
            //                + 2 (p12 - p1 p2)/(p1 p2) ] / P
            let var_ln = ((1.0 - p12) / p12 - (1.0 - p1) / p1 - (1.0 - p2) / p2
                + 2.0 * (p12 - p1 * p2) / (p1 * p2))
                / p;
            let var_ln = var_ln.max(0.0);
            record.std_error = Some(R::from_f64_lit(g2 * var_ln.sqrt()));
        }
    }
    record
}

/// Uniform in `[0, 1)` from a counter-based stream: the pulse index selects
/// an independent ChaCha stream of the seeded generator.
fn pulse_uniform(seed: u64, pulse: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(pulse);
    rng.gen::<f64>()
}

fn cumulative<R: Real>(probs: &[R]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p.to_f64().unwrap_or(0.0);
            acc
        })
        .collect()
}

fn sample_slot(cdf: &[f64], u: f64) -> usize {
    // The distribution may sum to slightly below one (truncation leak);
    // the tail maps to the last slot.
    let target = u * cdf.last().copied().unwrap_or(1.0).max(1.0);
    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1)
}

/// One row of a sweep: the Monte Carlo estimate next to the analytic
/// modified correlation at that occupation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow<R: Real> {
    pub n_bar: R,
    pub record: CountRecord<R>,
    pub g2_analytic: R,
}

/// Run several plans (typically varying the input occupation) and join the
/// analytic `modified_g2` column for residual inspection. The single-mode
/// network corresponds to `gamma = 1`. When the caller knows the intended
/// occupations (e.g. a grid from a scenario file), pass them as `n_bars` to
/// avoid the `sqrt`/square round-trip through the coherent amplitude;
/// otherwise they are read back from the inputs.
pub fn sweep<R: Real>(plans: &[ShotPlan<R>]) -> Result<Vec<SweepRow<R>>, McError> {
    let n_bars: Vec<R> = plans.iter().map(|p| p.network.input.mean_photon()).collect();
    sweep_with_occupations(plans, &n_bars)
}

pub fn sweep_with_occupations<R: Real>(
    plans: &[ShotPlan<R>],
    n_bars: &[R],
) -> Result<Vec<SweepRow<R>>, McError> {
    assert_eq!(plans.len(), n_bars.len());
    if let Some(first) = plans.first() {
        if plans.iter().any(|p| p.basis != first.basis) {
            return Err(McError::BasisMismatch);
        }
    }
    plans
        .iter()
        .zip(n_bars)
        .map(|(plan, &n_bar)| {
            let record = run_shots(plan)?;
            let g2_analytic = modified_g2(n_bar, R::one()).expect("valid by construction");
            Ok(SweepRow { n_bar, record, g2_analytic })
        })
        .collect()
}
