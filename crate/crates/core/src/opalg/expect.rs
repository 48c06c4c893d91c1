//! Vacuum and coherent-state expectation values of operator expressions.
//!
//! Evaluation normal-orders the expression first. Creators and annihilators
//! on numeric coherent modes become conjugated/plain amplitudes; vacuum
//! modes annihilate any term still carrying one of their operators. For
//! continuous modes with a symbolic mean occupation the stationary-field
//! rule applies: amplitude pairs contract to `nbar * delta(w - w')`, summed
//! over the possible creator/annihilator pairings.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::expr::{Delta, Kernel, OperatorExpr, OrderKind};
use super::scalar::Scalar;
use super::OpalgError;

/// State assignment for one mode family.
#[derive(Clone, Debug, PartialEq)]
pub enum ModeState {
    Vacuum,
    /// Coherent state with a numeric amplitude (discrete modes only).
    Coherent(Complex64),
    /// Coherent state described only by a symbolic mean photon number.
    CoherentSymbolic(String),
}

/// Per-family state assignments for an expectation evaluation.
#[derive(Clone, Debug, Default)]
pub struct StateSpec {
    assignments: BTreeMap<String, ModeState>,
}

impl StateSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vacuum(mut self, family: &str) -> Self {
        self.assignments.insert(family.to_string(), ModeState::Vacuum);
        self
    }

    pub fn coherent(mut self, family: &str, alpha: Complex64) -> Self {
        self.assignments.insert(family.to_string(), ModeState::Coherent(alpha));
        self
    }

    pub fn coherent_symbolic(mut self, family: &str, symbol: &str) -> Self {
        self.assignments
            .insert(family.to_string(), ModeState::CoherentSymbolic(symbol.to_string()));
        self
    }

    /// Vacuum on every family, matching the default for ancilla modes.
    pub fn all_vacuum(families: &[&str]) -> Self {
        families.iter().fold(Self::new(), |s, f| s.vacuum(f))
    }

    pub fn get(&self, family: &str) -> Option<&ModeState> {
        self.assignments.get(family)
    }
}

/// One monomial of the evaluated expectation: a coefficient times powers of
/// symbolic occupations, with any formal leftovers carried along.
#[derive(Clone, Debug)]
pub struct ExpectationTerm {
    pub coeff: Scalar,
    pub monomial: BTreeMap<String, u32>,
    pub deltas: Vec<Delta>,
    pub kernels: Vec<Kernel>,
    pub bound: Vec<String>,
    pub zeta_power: u32,
}

type ExpectationKey<'a> = (&'a BTreeMap<String, u32>, &'a [Delta], &'a [Kernel], &'a [String], u32);

impl ExpectationTerm {
    fn signature(&self) -> ExpectationKey<'_> {
        (&self.monomial, &self.deltas, &self.kernels, &self.bound, self.zeta_power)
    }

    fn degree(&self) -> u32 {
        self.monomial.values().sum()
    }

    fn is_plain(&self) -> bool {
        self.deltas.is_empty()
            && self.kernels.is_empty()
            && self.bound.is_empty()
            && self.zeta_power == 0
    }
}

/// Scalar-or-symbolic result of an expectation evaluation.
#[derive(Clone, Debug)]
pub struct Expectation {
    terms: Vec<ExpectationTerm>,
}

impl Expectation {
    fn from_terms(mut terms: Vec<ExpectationTerm>) -> Self {
        terms.sort_by(|a, b| {
            b.degree().cmp(&a.degree()).then_with(|| a.signature().cmp(&b.signature()))
        });
        let mut merged: Vec<ExpectationTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.signature() == t.signature() => {
                    last.coeff = last.coeff.clone() + t.coeff;
                }
                _ => merged.push(t),
            }
        }
        let scale = merged.iter().map(|t| t.coeff.norm()).fold(0.0_f64, f64::max);
        merged.retain(|t| !t.coeff.is_negligible(scale));
        Expectation { terms: merged }
    }

    pub fn terms(&self) -> &[ExpectationTerm] {
        &self.terms
    }

    /// Unresolved formal delta factors left in the result.
    pub fn has_formal_deltas(&self) -> bool {
        self.terms.iter().any(|t| !t.deltas.is_empty())
    }

    /// Plain scalar value, if the result is free of symbols and formal
    /// factors. The empty sum is zero.
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.terms.is_empty() {
            return Some(Scalar::zero());
        }
        if self.terms.len() == 1 && self.terms[0].is_plain() && self.terms[0].monomial.is_empty() {
            return Some(self.terms[0].coeff.clone());
        }
        None
    }

    /// Evaluate the symbolic polynomial at the given occupation numbers.
    /// Fails if formal deltas, kernels, or squeezing powers remain.
    pub fn eval(&self, bindings: &BTreeMap<String, f64>) -> Result<Complex64, OpalgError> {
        let mut sum = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            if !t.is_plain() {
                return Err(OpalgError::FormalResult);
            }
            let mut v = t.coeff.to_c64();
            for (sym, pow) in &t.monomial {
                let x = bindings
                    .get(sym)
                    .ok_or_else(|| OpalgError::UnboundSymbol(sym.clone()))?;
                v *= Complex64::new(x.powi(*pow as i32), 0.0);
            }
            sum += v;
        }
        Ok(sum)
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let mut parts: Vec<String> = Vec::new();
            match t.zeta_power {
                0 => {}
                1 => parts.push("zeta".to_string()),
                p => parts.push(format!("zeta^{p}")),
            }
            if !t.bound.is_empty() {
                parts.push(format!("I[{}]", t.bound.join(",")));
            }
            for k in &t.kernels {
                let star = if k.conjugated { "*" } else { "" };
                parts.push(format!("Phi{star}({},{})", k.first, k.second));
            }
            for d in &t.deltas {
                let (lo, hi) = d.vars();
                parts.push(format!("delta({lo}-{hi})"));
            }
            for (sym, pow) in &t.monomial {
                if *pow == 1 {
                    parts.push(sym.clone());
                } else {
                    parts.push(format!("{sym}^{pow}"));
                }
            }
            let rendered = if parts.is_empty() {
                t.coeff.to_string()
            } else if t.coeff == Scalar::one() {
                parts.join(" ")
            } else if t.coeff == -Scalar::one() {
                format!("-{}", parts.join(" "))
            } else {
                format!("{} {}", t.coeff, parts.join(" "))
            };
            if i == 0 {
                write!(f, "{rendered}")?;
            } else if let Some(stripped) = rendered.strip_prefix('-') {
                write!(f, " - {stripped}")?;
            } else {
                write!(f, " + {rendered}")?;
            }
        }
        Ok(())
    }
}

/// Evaluate `<e>` on the given per-mode state assignment.
pub fn expectation(e: &OperatorExpr, state: &StateSpec) -> Result<Expectation, OpalgError> {
    // Every family present in the expression must be assigned.
    for t in e.terms() {
        for fam in t.families() {
            if state.get(fam).is_none() {
                return Err(OpalgError::UnassignedMode(fam.to_string()));
            }
        }
    }
    let normal = e.reorder(OrderKind::Normal);
    let mut out: Vec<ExpectationTerm> = Vec::new();
    'term: for t in normal.terms() {
        let mut partial = vec![ExpectationTerm {
            coeff: t.coeff.clone(),
            monomial: BTreeMap::new(),
            deltas: t.deltas.clone(),
            kernels: t.kernels.clone(),
            bound: t.bound.clone(),
            zeta_power: t.zeta_power,
        }];
        for fam in t.families() {
            let fam_state = state.get(fam).expect("checked above");
            // Normal order guarantees creators precede annihilators.
            let creators: Vec<_> =
                t.factors.iter().filter(|f| f.mode.name == fam && f.dagger).collect();
            let annihilators: Vec<_> =
                t.factors.iter().filter(|f| f.mode.name == fam && !f.dagger).collect();
            match fam_state {
                ModeState::Vacuum => continue 'term,
                ModeState::Coherent(alpha) => {
                    if creators.iter().chain(&annihilators).any(|f| f.mode.is_continuous()) {
                        return Err(OpalgError::ContinuousNumericAmplitude(fam.to_string()));
                    }
                    let factor = alpha.conj().powu(creators.len() as u32)
                        * alpha.powu(annihilators.len() as u32);
                    for p in &mut partial {
                        p.coeff = p.coeff.clone() * Scalar::from_c64(factor);
                    }
                }
                ModeState::CoherentSymbolic(sym) => {
                    if creators.len() != annihilators.len() {
                        return Err(OpalgError::PhaseDependentSymbolic(fam.to_string()));
                    }
                    let m = creators.len() as u32;
                    if m == 0 {
                        continue;
                    }
                    let continuous = creators.iter().chain(&annihilators).any(|f| f.mode.is_continuous());
                    if !continuous {
                        for p in &mut partial {
                            *p.monomial.entry(sym.clone()).or_insert(0) += m;
                        }
                    } else {
                        if creators.iter().chain(&annihilators).any(|f| !f.mode.is_continuous()) {
                            // Mixed discrete/continuous labels within one
                            // family cannot be paired consistently.
                            return Err(OpalgError::PhaseDependentSymbolic(fam.to_string()));
                        }
                        let cvars: Vec<&str> =
                            creators.iter().map(|f| f.mode.freq.as_deref().unwrap()).collect();
                        let avars: Vec<&str> =
                            annihilators.iter().map(|f| f.mode.freq.as_deref().unwrap()).collect();
                        let mut expanded = Vec::new();
                        for perm in permutations(avars.len()) {
                            for p in &partial {
                                let mut q = p.clone();
                                *q.monomial.entry(sym.clone()).or_insert(0) += m;
                                for (i, &j) in perm.iter().enumerate() {
                                    q.deltas.push(Delta::new(cvars[i], avars[j]));
                                }
                                q.deltas.sort();
                                expanded.push(q);
                            }
                        }
                        partial = expanded;
                    }
                }
            }
        }
        out.extend(partial);
    }
    Ok(Expectation::from_terms(out))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for sub in permutations(n - 1) {
        for slot in 0..=sub.len() {
            let mut p = sub.clone();
            p.insert(slot, n - 1);
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::parse_expr;

    #[test]
    fn vacuum_zero_point_term() {
        let e = parse_expr("a*adag").unwrap();
        let v = expectation(&e, &StateSpec::new().vacuum("a")).unwrap();
        assert!(v.as_constant().unwrap().eq_int(1, 0));
    }

    #[test]
    fn vacuum_annihilates_normal_order() {
        let e = parse_expr("adag*a").unwrap();
        let v = expectation(&e, &StateSpec::new().vacuum("a")).unwrap();
        assert!(v.as_constant().unwrap().eq_int(0, 0));
    }

    #[test]
    fn symbolic_coherent_polynomial() {
        let e = parse_expr("a*a*adag*adag").unwrap();
        let v = expectation(&e, &StateSpec::new().coherent_symbolic("a", "nbar")).unwrap();
        assert_eq!(v.to_string(), "nbar^2 + 4 nbar + 2");
        let mut bind = BTreeMap::new();
        bind.insert("nbar".to_string(), 1.0);
        assert_eq!(v.eval(&bind).unwrap().re, 7.0);
    }

    #[test]
    fn numeric_coherent_moments() {
        let e = parse_expr("adag*a").unwrap();
        let alpha = Complex64::new(0.6, 0.8);
        let v = expectation(&e, &StateSpec::new().coherent("a", alpha)).unwrap();
        let got = v.as_constant().unwrap().to_c64();
        assert!((got - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn unassigned_mode_is_an_error() {
        let e = parse_expr("a*bdag").unwrap();
        let err = expectation(&e, &StateSpec::new().vacuum("a")).unwrap_err();
        assert!(matches!(err, OpalgError::UnassignedMode(ref m) if m == "b"));
    }

    #[test]
    fn stationary_rule_singles() {
        // <a(w1) adag(w1p)> on a stationary symbolic coherent field:
        // (nbar + 1) delta(w1 - w1p)
        let e = parse_expr("a(w1)*adag(w1p)").unwrap();
        let v = expectation(&e, &StateSpec::new().coherent_symbolic("a", "nbar")).unwrap();
        assert!(v.has_formal_deltas());
        assert_eq!(v.terms().len(), 2);
        assert_eq!(v.to_string(), "delta(w1-w1p) nbar + delta(w1-w1p)");
    }

    #[test]
    fn phase_dependent_symbolic_rejected() {
        let e = parse_expr("adag*adag*a").unwrap();
        let err = expectation(&e, &StateSpec::new().coherent_symbolic("a", "nbar")).unwrap_err();
        assert!(matches!(err, OpalgError::PhaseDependentSymbolic(_)));
    }

    #[test]
    fn leftover_delta_between_free_variables_is_flagged() {
        let e = parse_expr("a(w)*adag(wp)").unwrap();
        let v = expectation(&e, &StateSpec::new().vacuum("a")).unwrap();
        assert!(v.has_formal_deltas());
        assert!(v.as_constant().is_none());
    }
}
