//! Cross-module invariants: reordering correctness against the truncated
//! matrix oracle, channel commutation and Heisenberg identities, spectral
//! symmetries, and estimator consistency.

mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use qcounter::correlate::{
    coincidences, evaluate, modified_g2, CoherentInput, DetectionParams, SpectralIntegrals,
};
use qcounter::fock::{FockBasis, FockState};
use qcounter::mcsim::{run_shots, ShotPlan};
use qcounter::network::{run_network, NetworkInput, NetworkSpec, SqueezerSpec};
use qcounter::opalg::{
    antinormal_order, expectation, normal_order, OpFactor, OperatorExpr, OperatorTerm, Scalar,
    StateSpec,
};
use qcounter::spectral::{
    gamma_closed_form, gamma_general_4d, interval_nodes, profile_nodes, JointAmplitude,
    QuadratureSpec, SpectralProfile,
};

// ---------- operator algebra vs matrix oracle ----------

/// (mode index, dagger, continuous frequency-variable index)
type FactorSpec = (usize, bool, Option<usize>);

fn build_expr(terms: Vec<(i64, Vec<FactorSpec>)>) -> OperatorExpr {
    let vars = ["w1", "w2"];
    let built = terms
        .into_iter()
        .map(|(coeff, factors)| {
            let factors = factors
                .into_iter()
                .map(|(mode, dagger, freq)| OpFactor {
                    mode: match freq {
                        None => qcounter::opalg::ModeLabel::discrete(common::MODE_NAMES[mode]),
                        Some(v) => qcounter::opalg::ModeLabel::continuous(
                            common::MODE_NAMES[mode],
                            vars[v],
                        ),
                    },
                    dagger,
                })
                .collect();
            OperatorTerm::from_factors(Scalar::from_int(coeff), factors)
        })
        .collect();
    OperatorExpr::from_terms(built)
}

fn arb_discrete_expr() -> impl Strategy<Value = OperatorExpr> {
    let factor = (0..3usize, any::<bool>()).prop_map(|(m, d)| (m, d, None));
    let term = (1..=3i64, prop::collection::vec(factor, 0..=4));
    prop::collection::vec(term, 1..=3).prop_map(build_expr)
}

fn arb_mixed_expr() -> impl Strategy<Value = OperatorExpr> {
    let factor = (0..3usize, any::<bool>(), prop::option::of(0..2usize));
    let term = (1..=3i64, prop::collection::vec(factor, 0..=4));
    prop::collection::vec(term, 1..=3).prop_map(build_expr)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Reordering is algebra-preserving: expectations on a coherent product
    /// state match the truncated-matrix value for the input and both
    /// reordered forms.
    #[test]
    fn reordering_preserves_matrix_expectation(e in arb_discrete_expr()) {
        let basis = FockBasis::new(3, 12).unwrap();
        let alphas = [
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.25, 0.2),
            Complex64::new(0.15, -0.3),
        ];
        let v = common::coherent_product(basis, &alphas);
        let reference = common::vector_expectation(&e, basis, &v);
        for reordered in [normal_order(&e), antinormal_order(&e)] {
            let value = common::vector_expectation(&reordered, basis, &v);
            prop_assert!(
                (value - reference).norm() < 1e-9,
                "{e}: {value} vs {reference}"
            );
        }
    }

    /// Both orderings are idempotent and agree after a round trip, exactly.
    #[test]
    fn reordering_idempotent_and_canonical(e in arb_mixed_expr()) {
        let n = normal_order(&e);
        prop_assert!(normal_order(&n) == n);
        let a = antinormal_order(&e);
        prop_assert!(antinormal_order(&a) == a);
        prop_assert!(normal_order(&a) == n);
        prop_assert!(antinormal_order(&n) == a);
    }

    /// The vacuum expectation is exactly the scalar part of the normal form.
    #[test]
    fn vacuum_expectation_is_identity_coefficient(e in arb_discrete_expr()) {
        let state = StateSpec::all_vacuum(&common::MODE_NAMES);
        let value = expectation(&e, &state).unwrap().as_constant().unwrap();
        prop_assert!(value == normal_order(&e).identity_coefficient());
    }

    /// Reordering preserves the operator degree mod 2 per mode family.
    #[test]
    fn degree_parity_preserved(e in arb_mixed_expr()) {
        let parities = |expr: &OperatorExpr| -> Vec<Vec<usize>> {
            expr.terms()
                .iter()
                .map(|t| common::MODE_NAMES.iter().map(|m| t.degree_of(m) % 2).collect())
                .collect()
        };
        for t in parities(&normal_order(&e)) {
            // every term in the source shares the parity vector of its origin;
            // terms can only lose factors in pairs
            let source: Vec<Vec<usize>> = parities(&e);
            prop_assert!(source.contains(&t), "parity vector {t:?} not among {source:?}");
        }
    }
}

/// Mixed assignments (coherent signal, vacuum ancillas) against the matrix
/// oracle, exercising the vacuum-annihilation path of the evaluator.
#[test]
fn mixed_coherent_vacuum_expectations_match_oracle() {
    let basis = FockBasis::new(3, 12).unwrap();
    let alpha = Complex64::new(0.45, -0.2);
    let v = common::coherent_product(
        basis,
        &[alpha, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
    );
    let state = StateSpec::new().coherent("a", alpha).vacuum("b").vacuum("v");
    for text in [
        "a*adag",
        "adag*a + b*bdag",
        "a*b*bdag*adag",
        "2*a*a*adag*adag - v*vdag",
        "adag*bdag*b*a + 3",
    ] {
        let e = qcounter::opalg::parse_expr(text).unwrap();
        let symbolic = expectation(&e, &state).unwrap().as_constant().unwrap().to_c64();
        let numeric = common::vector_expectation(&e, basis, &v);
        assert!(
            (symbolic - numeric).norm() < 1e-9,
            "{text}: {symbolic} vs {numeric}"
        );
    }
}

// ---------- fock channel identities ----------

/// Independent oracle for the squeezer: exponentiate the full dense
/// two-mode generator in one piece (no block decomposition, no guard band)
/// and compare the pair-occupation correlator against both the blockwise
/// gate and the closed form sinh^2 cosh^2 + sinh^4.
#[test]
fn squeezer_against_dense_matrix_exponential_oracle() {
    use qcounter::fock::{expm, LadderOp};

    let basis = FockBasis::new(2, 12).unwrap();
    let zeta = Complex64::new(0.2, 0.0);

    let a = LadderOp::annihilate(basis, 0).to_dense::<f64>();
    let adag = LadderOp::create(basis, 0).to_dense::<f64>();
    let b = LadderOp::annihilate(basis, 1).to_dense::<f64>();
    let bdag = LadderOp::create(basis, 1).to_dense::<f64>();
    let generator = a.dot(&b).mapv(|z| z * zeta.conj()) - adag.dot(&bdag).mapv(|z| z * zeta);
    let unitary = expm(&generator);

    let mut vacuum = ndarray::Array1::<Complex64>::zeros(basis.dim());
    vacuum[0] = Complex64::new(1.0, 0.0);
    let dense_state = unitary.dot(&vacuum);

    let number = |v: &ndarray::Array1<Complex64>| -> f64 {
        let mut w = v.clone();
        for op in [
            LadderOp::annihilate(basis, 1),
            LadderOp::create(basis, 1),
            LadderOp::annihilate(basis, 0),
            LadderOp::create(basis, 0),
        ] {
            w = op.apply(&w);
        }
        v.iter().zip(w.iter()).map(|(x, y)| (x.conj() * y).re).sum()
    };
    let nanb_dense = number(&dense_state);

    let state = FockState::<f64>::vacuum(basis).apply_two_mode_squeezer(0, 1, zeta).unwrap();
    let nanb_gate = state
        .moment(&[(0, true), (0, false), (1, true), (1, false)])
        .unwrap()
        .re;

    let (sh, ch) = (0.2_f64.sinh(), 0.2_f64.cosh());
    let closed = sh * sh * ch * ch + sh.powi(4);
    assert!((nanb_dense - closed).abs() < 1e-8, "dense {nanb_dense} vs closed {closed}");
    assert!((nanb_gate - closed).abs() < 1e-8, "gate {nanb_gate} vs closed {closed}");
    assert!((nanb_gate - nanb_dense).abs() < 1e-8);
}

#[test]
fn splitter_and_loss_commute_on_vacuum_products() {
    let basis = FockBasis::new(2, 14).unwrap();
    let state = FockState::coherent(basis, 0, Complex64::new(0.7, -0.3)).unwrap();
    let t = Complex64::new(0.6, 0.0);
    let r = Complex64::new(0.0, 0.8);
    let eta = 0.55;

    let loss_then_split =
        state.apply_loss(0, eta).unwrap().apply_beam_splitter(0, 1, t, r).unwrap();
    let split_then_losses = state
        .apply_beam_splitter(0, 1, t, r)
        .unwrap()
        .apply_loss(0, eta)
        .unwrap()
        .apply_loss(1, eta)
        .unwrap();

    let degree2: [&[(usize, bool)]; 8] = [
        &[(0, true), (0, false)],
        &[(1, true), (1, false)],
        &[(0, true), (1, false)],
        &[(1, true), (0, false)],
        &[(0, false)],
        &[(1, false)],
        &[(0, false), (1, false)],
        &[(0, true), (1, true)],
    ];
    for ops in degree2 {
        let a = loss_then_split.moment(ops).unwrap();
        let b = split_then_losses.moment(ops).unwrap();
        assert!((a - b).norm() < 1e-10, "{ops:?}: {a} vs {b}");
    }
}

#[test]
fn squeezer_moments_match_bogoliubov_transform() {
    let basis = FockBasis::new(2, 24).unwrap();
    let alpha = Complex64::new(0.5, 0.3);
    let state = FockState::coherent(basis, 0, alpha).unwrap();
    for (mag, phase) in [(0.05, 0.0), (0.2, 1.1), (0.3, -2.0)] {
        let zeta = Complex64::from_polar(mag, phase);
        let out = state.apply_two_mode_squeezer(0, 1, zeta).unwrap();
        let (ch, sh) = (mag.cosh(), mag.sinh());
        // a_out = a cosh - b' e^{i phase} sinh
        let a_mean = out.moment(&[(0, false)]).unwrap();
        assert!((a_mean - alpha * ch).norm() < 1e-7, "zeta {zeta}: {a_mean}");
        let n_a = out.moment(&[(0, true), (0, false)]).unwrap().re;
        let expected_na = alpha.norm_sqr() * ch * ch + sh * sh;
        assert!((n_a - expected_na).abs() < 1e-7);
        let n_b = out.moment(&[(1, true), (1, false)]).unwrap().re;
        let expected_nb = (alpha.norm_sqr() + 1.0) * sh * sh;
        assert!((n_b - expected_nb).abs() < 1e-7);
        // <a_out b_out> keeps only the pair term:
        // -cosh sinh e^{i phase} <a a'> = -ch sh e^{i phase} (|alpha|^2 + 1)
        let ab = out.moment(&[(0, false), (1, false)]).unwrap();
        let expected_ab = -Complex64::from_polar(ch * sh * (alpha.norm_sqr() + 1.0), phase);
        assert!((ab - expected_ab).norm() < 1e-7, "zeta {zeta}: {ab} vs {expected_ab}");
    }
}

#[test]
fn coincidence_ratio_recovers_input_antinormal_moment() {
    let basis = FockBasis::new(3, 12).unwrap();
    for (input, expected) in [
        (NetworkInput::Vacuum, 2.0),
        (NetworkInput::Coherent { alpha: Complex64::new(1.0, 0.0) }, 7.0),
    ] {
        let spec = NetworkSpec {
            input,
            squeezer: SqueezerSpec::from_zeta_mag(0.15, 0.3).unwrap(),
            splitter: (Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)),
            losses: (0.7, 0.45),
        };
        let report = run_network(&spec, basis).unwrap();
        let implied = report.implied_antinormal_fourth_moment.unwrap();
        assert!(
            (implied - expected).abs() < 2e-2 * expected,
            "implied {implied} vs {expected}"
        );
    }
}

// ---------- spectral symmetries and reductions ----------

/// Direct four-nested-loop evaluation of the gamma numerator and diagonal,
/// independent of the pair-overlap regrouping used by the implementation.
fn direct_4d(filter: &SpectralProfile<f64>, jsa: &JointAmplitude<f64>, n: usize) -> (f64, f64) {
    let (wx, ww) = profile_nodes(filter, n, 6.0, false);
    let (p_lo, p_hi) = jsa.pump.amplitude_support(6.0);
    let (f_lo, f_hi) = filter.support(6.0);
    let (x1, w1) = interval_nodes(n, p_lo - f_hi, p_hi - f_lo);
    let weight: Vec<f64> = wx.iter().zip(&ww).map(|(x, w)| w * filter.value(*x)).collect();
    let mut numerator = 0.0;
    let mut diag = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut inner = 0.0;
            for k in 0..n {
                for l in 0..n {
                    inner += w1[k]
                        * w1[l]
                        * jsa.value(x1[k], wx[i])
                        * jsa.value(x1[l], wx[j])
                        * jsa.value(x1[k], wx[j])
                        * jsa.value(x1[l], wx[i]);
                }
            }
            numerator += weight[i] * weight[j] * inner;
        }
        let mut d = 0.0;
        for k in 0..n {
            d += w1[k] * jsa.value(x1[k], wx[i]).powi(2);
        }
        diag += weight[i] * d;
    }
    (numerator, diag)
}

#[test]
fn four_dimensional_quadrature_matches_direct_tensor_sum() {
    let filter = SpectralProfile::gaussian(0.1, 0.4).unwrap();
    let jsa = JointAmplitude::new(SpectralProfile::gaussian(0.3, 1.3).unwrap());
    let n = 28;
    let (num, diag) = direct_4d(&filter, &jsa, n);
    let gamma_direct = num / (diag * diag);
    let quad = QuadratureSpec { points_per_axis: n, target_abs_tol: 1e-2, ..Default::default() };
    let r = gamma_general_4d(&filter, &jsa, &quad).unwrap();
    assert!(
        (r.gamma_numeric - gamma_direct).abs() < 1e-12,
        "{} vs {gamma_direct}",
        r.gamma_numeric
    );
    assert!((r.i_cross.unwrap() - num).abs() < 1e-12 * num.abs().max(1.0));
}

#[test]
fn exchange_symmetry_of_the_numerator_integrand() {
    // relabelling (w <-> w'') and (w1 <-> w1'') leaves the summed integrand
    // unchanged; check on a coarse grid by brute force
    let filter = SpectralProfile::gaussian(0.0, 0.5).unwrap();
    let jsa = JointAmplitude::new(SpectralProfile::gaussian(0.2, 1.0).unwrap());
    let n = 12;
    let (wx, ww) = profile_nodes(&filter, n, 6.0, false);
    let (x1, w1) = interval_nodes(n, -8.0, 8.0);
    let weight: Vec<f64> = wx.iter().zip(&ww).map(|(x, w)| w * filter.value(*x)).collect();
    let term = |i: usize, j: usize, k: usize, l: usize| -> f64 {
        weight[i]
            * weight[j]
            * w1[k]
            * w1[l]
            * jsa.value(x1[k], wx[i])
            * jsa.value(x1[l], wx[j])
            * jsa.value(x1[k], wx[j])
            * jsa.value(x1[l], wx[i])
    };
    let mut raw = 0.0;
    let mut swapped_outer = 0.0;
    let mut swapped_inner = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    raw += term(i, j, k, l);
                    swapped_outer += term(j, i, k, l);
                    swapped_inner += term(i, j, l, k);
                }
            }
        }
    }
    assert!((raw - swapped_outer).abs() < 1e-12 * raw.abs());
    assert!((raw - swapped_inner).abs() < 1e-12 * raw.abs());
}

// ---------- correlate consistency ----------

#[test]
fn spectral_ratio_matches_modified_g2_for_gaussians() {
    let filter = SpectralProfile::gaussian(0.0, 0.25).unwrap();
    let jsa = JointAmplitude::new(SpectralProfile::gaussian(0.0, 1.0).unwrap());
    let r = gamma_general_4d(&filter, &jsa, &QuadratureSpec::default()).unwrap();
    let integrals = SpectralIntegrals { i_diag: r.i_diag.unwrap(), i_cross: r.i_cross.unwrap() };
    let det = DetectionParams {
        eta_1: 0.35,
        eta_2: 0.8,
        t: Complex64::new(0.6, 0.0),
        r: Complex64::new(0.0, 0.8),
        zeta_mag: 0.05,
    };
    let closed = gamma_closed_form(0.25_f64, 1.0).unwrap().0;
    for nbar in [0.0, 0.5, 2.0] {
        let input = CoherentInput::new(nbar).unwrap();
        let report = evaluate(&input, &det, &integrals).unwrap();
        let expected = modified_g2(nbar, closed).unwrap();
        assert!(
            (report.g2 - expected).abs() < 1e-6,
            "nbar {nbar}: {} vs {expected}",
            report.g2
        );
    }
}

#[test]
fn factorizable_continuous_g2_matches_fock_network() {
    // factorizable Phi: gamma = 1, so the continuous-mode ratio reduces to
    // the single-mode value, which the truncated network reproduces
    let f = Arc::new(|w: f64| (-(w - 0.2).powi(2)).exp());
    let g = Arc::new(|w: f64| (-w * w / 1.6).exp());
    let jsa = JointAmplitude::factorized(f, g, (-60.0, 60.0)).unwrap();
    let filter = SpectralProfile::gaussian(0.0, 0.6).unwrap();
    let r = gamma_general_4d(&filter, &jsa, &QuadratureSpec::default()).unwrap();
    let integrals = SpectralIntegrals { i_diag: r.i_diag.unwrap(), i_cross: r.i_cross.unwrap() };

    let basis = FockBasis::new(3, 14).unwrap();
    for nbar in [0.0_f64, 1.0] {
        let det = DetectionParams {
            eta_1: 0.5,
            eta_2: 0.75,
            t: Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            r: Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2),
            zeta_mag: 0.1,
        };
        let continuous =
            coincidences(&CoherentInput::new(nbar).unwrap(), &det, &integrals).unwrap()
                / {
                    let (n1, n2) = qcounter::correlate::singles(
                        &CoherentInput::new(nbar).unwrap(),
                        &det,
                        &integrals,
                    )
                    .unwrap();
                    n1 * n2
                };
        let spec = NetworkSpec {
            input: if nbar == 0.0 {
                NetworkInput::Vacuum
            } else {
                NetworkInput::Coherent { alpha: Complex64::new(nbar.sqrt(), 0.0) }
            },
            squeezer: SqueezerSpec::from_zeta_mag(0.1, 0.0).unwrap(),
            splitter: (det.t, det.r),
            losses: (det.eta_1, det.eta_2),
        };
        let network_g2 = run_network(&spec, basis).unwrap().g2;
        assert!(
            (continuous - network_g2).abs() < 1e-2,
            "nbar {nbar}: continuous {continuous} vs network {network_g2}"
        );
    }
}

// ---------- estimator consistency ----------

#[test]
fn estimator_consistent_within_three_sigma() {
    let base = NetworkSpec {
        input: NetworkInput::Vacuum,
        squeezer: SqueezerSpec::from_zeta_mag(0.2, 0.0).unwrap(),
        splitter: (
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2),
        ),
        losses: (0.9, 0.9),
    };
    let basis = FockBasis::new(3, 10).unwrap();
    let mut seeds = ChaCha8Rng::seed_from_u64(77);
    let mut hits = 0;
    const BATCHES: usize = 100;
    for _ in 0..BATCHES {
        let plan = ShotPlan { pulses: 100_000, seed: seeds.gen(), network: base, basis };
        let record = run_shots(&plan).unwrap();
        let g2 = record.g2_estimate.unwrap();
        let se = record.std_error.unwrap();
        if (g2 - 2.0).abs() < 3.0 * se {
            hits += 1;
        }
    }
    assert!(hits >= 99, "only {hits}/{BATCHES} batches within 3 sigma");
}
