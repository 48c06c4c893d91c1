//! Coefficient arithmetic for operator expressions.
//!
//! Commutator rewriting only ever adds and multiplies integers, so
//! coefficients stay exact complex rationals unless a floating value enters
//! (e.g. a numeric coherent amplitude), at which point the whole coefficient
//! falls back to `Complex64`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type ExactComplex = Complex<BigRational>;

/// Relative threshold below which a floating coefficient is considered zero
/// when merging terms.
pub const FLOAT_MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(ExactComplex),
    Float(Complex64),
}

fn big_ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Out-of-range rationals only appear through pathological inputs;
        // saturate rather than panic.
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(ExactComplex::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(ExactComplex::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(ExactComplex::new(big_ratio(n, 1), BigRational::zero()))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(ExactComplex::new(big_ratio(num, den), BigRational::zero()))
    }

    pub fn from_imag_int(n: i64) -> Self {
        Scalar::Exact(ExactComplex::new(BigRational::zero(), big_ratio(n, 1)))
    }

    pub fn from_f64(x: f64) -> Self {
        Scalar::Float(Complex64::new(x, 0.0))
    }

    pub fn from_c64(z: Complex64) -> Self {
        Scalar::Float(z)
    }

    /// Exact rational from a decimal literal split at the point, e.g.
    /// ("12", "25") -> 1225/100.
    pub fn from_decimal_parts(int_part: &str, frac_part: &str) -> Option<Self> {
        let digits: String = format!("{int_part}{frac_part}");
        let num: BigInt = digits.parse().ok()?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        Some(Scalar::Exact(ExactComplex::new(
            BigRational::new(num, den),
            BigRational::zero(),
        )))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(c) => Complex64::new(ratio_to_f64(&c.re), ratio_to_f64(&c.im)),
            Scalar::Float(z) => *z,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn norm(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Zero test used when dropping merged terms: exact for rationals,
    /// relative for floats.
    pub fn is_negligible(&self, scale: f64) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Float(z) => z.norm() <= FLOAT_MERGE_TOL * scale.max(1.0),
        }
    }

    pub fn as_exact(&self) -> Option<&ExactComplex> {
        match self {
            Scalar::Exact(c) => Some(c),
            Scalar::Float(_) => None,
        }
    }

    /// True when the value equals the given Gaussian integer exactly
    /// (always false on the float path).
    pub fn eq_int(&self, re: i64, im: i64) -> bool {
        match self {
            Scalar::Exact(c) => c.re == big_ratio(re, 1) && c.im == big_ratio(im, 1),
            Scalar::Float(_) => false,
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            (a, b) => Scalar::Float(a.to_c64() + b.to_c64()),
        }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self + (-rhs)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            (a, b) => Scalar::Float(a.to_c64() * b.to_c64()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(-c),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (a, b) => a.to_c64() == b.to_c64(),
        }
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_f64(x: f64) -> String {
    // f64 Display is shortest round-trip in Rust; force a point so the
    // token re-parses as a decimal rather than an integer.
    let s = format!("{x}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(c) => {
                if c.im.is_zero() {
                    write!(f, "{}", fmt_ratio(&c.re))
                } else if c.re.is_zero() {
                    let im = fmt_ratio(&c.im);
                    match im.as_str() {
                        "1" => write!(f, "i"),
                        "-1" => write!(f, "-i"),
                        _ => write!(f, "{im}i"),
                    }
                } else {
                    let sign = if c.im.is_negative() { "-" } else { "+" };
                    write!(f, "({}{}{}i)", fmt_ratio(&c.re), sign, fmt_ratio(&c.im.abs()))
                }
            }
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", fmt_f64(z.re))
                } else if z.re == 0.0 {
                    write!(f, "{}i", fmt_f64(z.im))
                } else {
                    let sign = if z.im < 0.0 { "-" } else { "+" };
                    write!(f, "({}{}{}i)", fmt_f64(z.re), sign, fmt_f64(z.im.abs()))
                }
            }
        }
    }
}
