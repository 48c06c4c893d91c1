//! Perturbative action of the continuous-mode squeezer on auxiliary-mode
//! vacuum: the surviving expression after `b`-mode annihilators hit the
//! expanded exponential, to first or second order in the squeezing
//! parameter.

use super::expr::{Kernel, OpFactor, OperatorExpr, OperatorTerm};
use super::OpalgError;

const TARGET_FAMILY: &str = "b";
const SIGNAL_FAMILY: &str = "a";

/// Expand the squeezer action on `target * |0>_b`, keeping the surviving
/// order-`order` contribution.
///
/// The target must be a single product of continuous `b`-mode annihilators,
/// one per requested order (the identity target survives at order zero and
/// is returned unchanged). One `b(w)` yields
/// `-zeta * I[w1] Phi(w1, w) adag(w1)`; two yield the symmetrized pair of
/// kernel pairings with coefficient `zeta^2 / 2`.
pub fn expand_squeezer_action(
    target: &OperatorExpr,
    order: u32,
) -> Result<OperatorExpr, OpalgError> {
    if !(1..=2).contains(&order) {
        return Err(OpalgError::UnsupportedOrder(order));
    }
    if target.terms().len() != 1 {
        return Err(OpalgError::InvalidSqueezerTarget(
            "target must be a single product term".to_string(),
        ));
    }
    let term = &target.terms()[0];
    if term.is_identity_shape() {
        return Ok(target.clone());
    }
    if term.zeta_power != 0 || !term.deltas.is_empty() || !term.kernels.is_empty() {
        return Err(OpalgError::InvalidSqueezerTarget(
            "target already carries formal factors".to_string(),
        ));
    }
    let mut freq_vars = Vec::new();
    for f in &term.factors {
        if f.mode.name != TARGET_FAMILY || f.dagger {
            return Err(OpalgError::InvalidSqueezerTarget(format!(
                "non-{TARGET_FAMILY}-mode annihilator factor present"
            )));
        }
        match &f.mode.freq {
            Some(v) => freq_vars.push(v.clone()),
            None => {
                return Err(OpalgError::InvalidSqueezerTarget(
                    "target factors must be continuous modes".to_string(),
                ))
            }
        }
    }
    if freq_vars.len() != order as usize {
        return Err(OpalgError::InvalidSqueezerTarget(format!(
            "order {order} expansion expects exactly {order} {TARGET_FAMILY}-mode factors"
        )));
    }

    let taken: Vec<String> = freq_vars.clone();
    let fresh: Vec<String> = freq_vars.iter().map(|v| fresh_var(v, &taken)).collect();

    match order {
        1 => {
            let t = OperatorTerm {
                coeff: -term.coeff.clone(),
                kernels: vec![Kernel::new(&fresh[0], &freq_vars[0])],
                bound: vec![fresh[0].clone()],
                zeta_power: 1,
                factors: vec![creator(&fresh[0])],
                ..OperatorTerm::identity()
            };
            Ok(OperatorExpr::from_term(t))
        }
        2 => {
            let half = term.coeff.clone() * super::scalar::Scalar::from_ratio(1, 2);
            let bound = vec![fresh[0].clone(), fresh[1].clone()];
            let factors = vec![creator(&fresh[0]), creator(&fresh[1])];
            let direct = OperatorTerm {
                coeff: half.clone(),
                kernels: vec![
                    Kernel::new(&fresh[0], &freq_vars[0]),
                    Kernel::new(&fresh[1], &freq_vars[1]),
                ],
                bound: bound.clone(),
                zeta_power: 2,
                factors: factors.clone(),
                ..OperatorTerm::identity()
            };
            let exchanged = OperatorTerm {
                coeff: half,
                kernels: vec![
                    Kernel::new(&fresh[0], &freq_vars[1]),
                    Kernel::new(&fresh[1], &freq_vars[0]),
                ],
                bound,
                zeta_power: 2,
                factors,
                ..OperatorTerm::identity()
            };
            Ok(OperatorExpr::from_terms(vec![direct, exchanged]))
        }
        _ => unreachable!(),
    }
}

fn creator(freq: &str) -> OpFactor {
    OpFactor {
        mode: super::expr::ModeLabel::continuous(SIGNAL_FAMILY, freq),
        dagger: true,
    }
}

fn fresh_var(base: &str, taken: &[String]) -> String {
    let mut candidate = format!("{base}1");
    while taken.iter().any(|t| t == &candidate) {
        candidate.push('1');
    }
    candidate
}
