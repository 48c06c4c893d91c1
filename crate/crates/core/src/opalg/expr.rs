//! Operator expressions: scalar-weighted products of bosonic ladder
//! operators with formal delta factors, plus the commutation-relation
//! rewriting that puts them into normal or antinormal order.
//!
//! Discrete modes carry just a family name (`a`, `b`, ...); continuous modes
//! additionally carry a frequency variable (`a(w1)`). Commuting an
//! annihilator past a creator of the same family yields `+1` for matching
//! discrete labels and a formal `delta(w-w')` for continuous ones. Deltas are
//! never evaluated numerically; they are contracted only by an explicit
//! integrate-out step or by the stationary-field rule in expectation
//! evaluation.

use std::cmp::Ordering as CmpOrdering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::Scalar;

/// A bosonic mode: family name plus, for continuous modes, the frequency
/// variable labelling it. Two labels are the same mode only if kind, name
/// and frequency variable all agree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub name: String,
    pub freq: Option<String>,
}

impl ModeLabel {
    pub fn discrete(name: &str) -> Self {
        ModeLabel { name: name.to_string(), freq: None }
    }

    pub fn continuous(name: &str, freq: &str) -> Self {
        ModeLabel { name: name.to_string(), freq: Some(freq.to_string()) }
    }

    pub fn is_continuous(&self) -> bool {
        self.freq.is_some()
    }
}

/// One ladder-operator factor in a product.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpFactor {
    pub mode: ModeLabel,
    pub dagger: bool,
}

/// Formal delta factor over two frequency variables, stored with its
/// arguments sorted so equal deltas compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Delta {
    lo: String,
    hi: String,
}

impl Delta {
    pub fn new(x: &str, y: &str) -> Self {
        if x <= y {
            Delta { lo: x.to_string(), hi: y.to_string() }
        } else {
            Delta { lo: y.to_string(), hi: x.to_string() }
        }
    }

    pub fn vars(&self) -> (&str, &str) {
        (&self.lo, &self.hi)
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.lo == var || self.hi == var
    }

    /// The partner of `var`, if `var` is one of the arguments.
    pub fn other(&self, var: &str) -> Option<&str> {
        if self.lo == var {
            Some(&self.hi)
        } else if self.hi == var {
            Some(&self.lo)
        } else {
            None
        }
    }
}

/// Formal joint-amplitude kernel factor Phi(x, y), optionally conjugated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Kernel {
    pub first: String,
    pub second: String,
    pub conjugated: bool,
}

impl Kernel {
    pub fn new(first: &str, second: &str) -> Self {
        Kernel { first: first.to_string(), second: second.to_string(), conjugated: false }
    }
}

/// One term: coefficient times formal scalars times an ordered operator
/// product. `zeta_power` tracks powers of the symbolic squeezing parameter
/// and `bound` lists integration variables introduced by expansions.
#[derive(Clone, Debug)]
pub struct OperatorTerm {
    pub coeff: Scalar,
    pub deltas: Vec<Delta>,
    pub kernels: Vec<Kernel>,
    pub bound: Vec<String>,
    pub zeta_power: u32,
    pub factors: Vec<OpFactor>,
}

impl OperatorTerm {
    pub fn identity() -> Self {
        OperatorTerm {
            coeff: Scalar::one(),
            deltas: Vec::new(),
            kernels: Vec::new(),
            bound: Vec::new(),
            zeta_power: 0,
            factors: Vec::new(),
        }
    }

    pub fn scalar(c: Scalar) -> Self {
        OperatorTerm { coeff: c, ..OperatorTerm::identity() }
    }

    pub fn from_factors(coeff: Scalar, factors: Vec<OpFactor>) -> Self {
        OperatorTerm { coeff, factors, ..OperatorTerm::identity() }
    }

    pub fn is_identity_shape(&self) -> bool {
        self.factors.is_empty()
            && self.deltas.is_empty()
            && self.kernels.is_empty()
            && self.bound.is_empty()
            && self.zeta_power == 0
    }

    fn normalize_formal(&mut self) {
        self.deltas.sort();
        self.kernels.sort();
        self.bound.sort();
        self.bound.dedup();
    }

    /// Everything but the coefficient, used to sort and merge like terms.
    fn signature(&self) -> (&[OpFactor], &[Delta], &[Kernel], &[String], u32) {
        (&self.factors, &self.deltas, &self.kernels, &self.bound, self.zeta_power)
    }

    /// Operator degree per mode family.
    pub fn degree_of(&self, family: &str) -> usize {
        self.factors.iter().filter(|f| f.mode.name == family).count()
    }

    pub fn families(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.factors.iter().map(|f| f.mode.name.as_str()).collect();
        names.sort();
        names.dedup();
        names
    }
}

/// Canonicalized sum of operator terms. Terms are kept sorted, like terms
/// merged and negligible coefficients dropped after every rewrite.
#[derive(Clone, Debug)]
pub struct OperatorExpr {
    terms: Vec<OperatorTerm>,
}

/// Target orderings for the rewriting engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderKind {
    /// Creators to the left of annihilators.
    Normal,
    /// Annihilators to the left of creators.
    Antinormal,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        OperatorExpr { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        OperatorExpr::from_term(OperatorTerm::identity())
    }

    pub fn scalar(c: Scalar) -> Self {
        OperatorExpr::from_term(OperatorTerm::scalar(c))
    }

    pub fn from_term(t: OperatorTerm) -> Self {
        OperatorExpr::from_terms(vec![t])
    }

    pub fn from_terms(terms: Vec<OperatorTerm>) -> Self {
        let mut e = OperatorExpr { terms };
        e.canonicalize();
        e
    }

    /// Single annihilation operator on a discrete mode.
    pub fn annihilate(name: &str) -> Self {
        OperatorExpr::from_term(OperatorTerm::from_factors(
            Scalar::one(),
            vec![OpFactor { mode: ModeLabel::discrete(name), dagger: false }],
        ))
    }

    /// Single creation operator on a discrete mode.
    pub fn create(name: &str) -> Self {
        OperatorExpr::from_term(OperatorTerm::from_factors(
            Scalar::one(),
            vec![OpFactor { mode: ModeLabel::discrete(name), dagger: true }],
        ))
    }

    /// Single annihilation operator on a continuous mode.
    pub fn annihilate_at(name: &str, freq: &str) -> Self {
        OperatorExpr::from_term(OperatorTerm::from_factors(
            Scalar::one(),
            vec![OpFactor { mode: ModeLabel::continuous(name, freq), dagger: false }],
        ))
    }

    /// Single creation operator on a continuous mode.
    pub fn create_at(name: &str, freq: &str) -> Self {
        OperatorExpr::from_term(OperatorTerm::from_factors(
            Scalar::one(),
            vec![OpFactor { mode: ModeLabel::continuous(name, freq), dagger: true }],
        ))
    }

    pub fn terms(&self) -> &[OperatorTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the identity term (the scalar part), zero if absent.
    pub fn identity_coefficient(&self) -> Scalar {
        self.terms
            .iter()
            .find(|t| t.is_identity_shape())
            .map(|t| t.coeff.clone())
            .unwrap_or_else(Scalar::zero)
    }

    fn canonicalize(&mut self) {
        for t in &mut self.terms {
            t.normalize_formal();
        }
        // Highest operator degree first, then lexicographic; like signatures
        // end up adjacent either way.
        self.terms.sort_by(|a, b| {
            b.factors
                .len()
                .cmp(&a.factors.len())
                .then_with(|| a.signature().cmp(&b.signature()))
        });
        let mut merged: Vec<OperatorTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.signature() == t.signature() => {
                    last.coeff = last.coeff.clone() + t.coeff;
                }
                _ => merged.push(t),
            }
        }
        let scale = merged.iter().map(|t| t.coeff.norm()).fold(0.0_f64, f64::max);
        merged.retain(|t| !t.coeff.is_negligible(scale));
        self.terms = merged;
    }

    /// Rewrite into the requested ordering using the commutation relations.
    /// Total function: always terminates since each step either shortens a
    /// term or removes one adjacent inversion.
    pub fn reorder(&self, kind: OrderKind) -> OperatorExpr {
        let mut done: Vec<OperatorTerm> = Vec::new();
        let mut work: Vec<OperatorTerm> = self.terms.clone();
        while let Some(term) = work.pop() {
            match first_violation(&term, kind) {
                None => done.push(term),
                Some(i) => {
                    let x = term.factors[i].clone();
                    let y = term.factors[i + 1].clone();
                    if x.mode.name == y.mode.name && x.dagger != y.dagger {
                        // [annihilator, creator] = +delta, reversed pair -delta
                        let positive = !x.dagger;
                        match (&x.mode.freq, &y.mode.freq) {
                            (None, None) => {
                                let mut c = term.clone();
                                c.factors.remove(i + 1);
                                c.factors.remove(i);
                                if !positive {
                                    c.coeff = -c.coeff;
                                }
                                work.push(c);
                            }
                            (Some(fx), Some(fy)) => {
                                let mut c = term.clone();
                                c.factors.remove(i + 1);
                                c.factors.remove(i);
                                c.deltas.push(Delta::new(fx, fy));
                                if !positive {
                                    c.coeff = -c.coeff;
                                }
                                work.push(c);
                            }
                            // A discrete and a continuous label of the same
                            // family are distinct modes: no contraction.
                            _ => {}
                        }
                    }
                    let mut swapped = term;
                    swapped.factors.swap(i, i + 1);
                    work.push(swapped);
                }
            }
        }
        OperatorExpr::from_terms(done)
    }

    /// Contract deltas against an integration variable: every delta
    /// mentioning `var` substitutes its partner for `var` throughout the
    /// term and disappears. Terms where `var` is not fixed by any delta keep
    /// it as a bound integration variable.
    pub fn integrate_out(&self, var: &str) -> OperatorExpr {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut t = t.clone();
                if let Some(pos) = t.deltas.iter().position(|d| d.mentions(var)) {
                    let d = t.deltas.remove(pos);
                    let replacement = d.other(var).unwrap().to_string();
                    substitute_var(&mut t, var, &replacement);
                    t.bound.retain(|b| b != var);
                } else if !t.bound.iter().any(|b| b == var) {
                    t.bound.push(var.to_string());
                }
                t
            })
            .collect();
        OperatorExpr::from_terms(terms)
    }
}

fn substitute_var(t: &mut OperatorTerm, from: &str, to: &str) {
    for f in &mut t.factors {
        if f.mode.freq.as_deref() == Some(from) {
            f.mode.freq = Some(to.to_string());
        }
    }
    t.deltas = t
        .deltas
        .iter()
        .map(|d| {
            let (lo, hi) = d.vars();
            let lo = if lo == from { to } else { lo };
            let hi = if hi == from { to } else { hi };
            Delta::new(lo, hi)
        })
        .collect();
    for k in &mut t.kernels {
        if k.first == from {
            k.first = to.to_string();
        }
        if k.second == from {
            k.second = to.to_string();
        }
    }
    for b in &mut t.bound {
        if b == from {
            *b = to.to_string();
        }
    }
}

fn factor_key(f: &OpFactor, kind: OrderKind) -> (u8, &str, Option<&str>) {
    let rank = match kind {
        OrderKind::Normal => u8::from(!f.dagger),
        OrderKind::Antinormal => u8::from(f.dagger),
    };
    (rank, f.mode.name.as_str(), f.mode.freq.as_deref())
}

fn first_violation(t: &OperatorTerm, kind: OrderKind) -> Option<usize> {
    t.factors
        .windows(2)
        .position(|w| factor_key(&w[0], kind).cmp(&factor_key(&w[1], kind)) == CmpOrdering::Greater)
}

impl PartialEq for OperatorExpr {
    fn eq(&self, other: &Self) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        self.terms
            .iter()
            .zip(&other.terms)
            .all(|(a, b)| a.signature() == b.signature() && a.coeff == b.coeff)
    }
}

impl Add for OperatorExpr {
    type Output = OperatorExpr;
    fn add(self, rhs: OperatorExpr) -> OperatorExpr {
        let mut terms = self.terms;
        terms.extend(rhs.terms);
        OperatorExpr::from_terms(terms)
    }
}

impl Sub for OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, rhs: OperatorExpr) -> OperatorExpr {
        self + (-rhs)
    }
}

impl Neg for OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        let terms = self
            .terms
            .into_iter()
            .map(|mut t| {
                t.coeff = -t.coeff;
                t
            })
            .collect();
        OperatorExpr { terms }
    }
}

impl Mul for OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: OperatorExpr) -> OperatorExpr {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                let mut t = a.clone();
                t.coeff = t.coeff.clone() * b.coeff.clone();
                t.deltas.extend(b.deltas.iter().cloned());
                t.kernels.extend(b.kernels.iter().cloned());
                t.bound.extend(b.bound.iter().cloned());
                t.zeta_power += b.zeta_power;
                t.factors.extend(b.factors.iter().cloned());
                terms.push(t);
            }
        }
        OperatorExpr::from_terms(terms)
    }
}

impl Mul<OperatorExpr> for Scalar {
    type Output = OperatorExpr;
    fn mul(self, rhs: OperatorExpr) -> OperatorExpr {
        OperatorExpr::scalar(self) * rhs
    }
}

// ---------- printing ----------

fn push_factor_run(out: &mut Vec<String>, f: &OpFactor, count: usize) {
    let mut s = f.mode.name.clone();
    if f.dagger {
        s.push_str("dag");
    }
    if let Some(freq) = &f.mode.freq {
        s.push_str(&format!("({freq})"));
    }
    if count > 1 {
        s.push_str(&format!("^{count}"));
    }
    out.push(s);
}

impl fmt::Display for OperatorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.zeta_power {
            0 => {}
            1 => parts.push("zeta".to_string()),
            p => parts.push(format!("zeta^{p}")),
        }
        if !self.bound.is_empty() {
            parts.push(format!("I[{}]", self.bound.join(",")));
        }
        for k in &self.kernels {
            let star = if k.conjugated { "*" } else { "" };
            parts.push(format!("Phi{star}({},{})", k.first, k.second));
        }
        for d in &self.deltas {
            let (lo, hi) = d.vars();
            parts.push(format!("delta({lo}-{hi})"));
        }
        let mut i = 0;
        while i < self.factors.len() {
            let mut j = i + 1;
            while j < self.factors.len() && self.factors[j] == self.factors[i] {
                j += 1;
            }
            push_factor_run(&mut parts, &self.factors[i], j - i);
            i = j;
        }
        if parts.is_empty() {
            return write!(f, "{}", self.coeff);
        }
        let body = parts.join(" ");
        if self.coeff == Scalar::one() {
            write!(f, "{body}")
        } else if self.coeff == -Scalar::one() {
            write!(f, "-{body}")
        } else {
            write!(f, "{} {}", self.coeff, body)
        }
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let rendered = t.to_string();
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
