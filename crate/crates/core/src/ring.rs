//! Coefficient rings for truncated series.
//!
//! Three rings share one contract:
//! - [`LaurentRing`]: exact mode, values are [`QLaurent`] in a formal `q`;
//! - [`RationalAt`]: exact rationals with `q` fixed to a rational number;
//! - [`FloatAt`]: one `f64` per value with `q` fixed to a real number.
//!
//! The q-shift `scale_by_q_power(v, e)` multiplies by `q^e` and composes
//! additively in `e`.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{format_rational, rational_to_f64, QLaurent, Rational};
use crate::error::{Error, Result};

#[allow(clippy::wrong_self_convention)]
pub trait CoefficientRing: Clone + fmt::Debug {
    type Elem: Clone + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale_by_q_power(&self, a: &Self::Elem, e: i64) -> Self::Elem;
    fn from_rational(&self, r: &Rational) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Exact equality for exact rings, tolerance equality for floats.
    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    /// Multiplicative inverse, when it exists in the ring.
    fn try_inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn elem_to_json(&self, a: &Self::Elem) -> serde_json::Value;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// `a += b * c`, the hot path of every convolution.
    fn add_mul_assign(&self, acc: &mut Self::Elem, b: &Self::Elem, c: &Self::Elem) {
        *acc = self.add(acc, &self.mul(b, c));
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_rational(&Rational::from_integer(n.into()))
    }
}

/// Exact Laurent polynomials in a formal `q`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LaurentRing;

impl CoefficientRing for LaurentRing {
    type Elem = QLaurent;

    fn zero(&self) -> QLaurent {
        QLaurent::zero()
    }
    fn one(&self) -> QLaurent {
        QLaurent::one()
    }
    fn add(&self, a: &QLaurent, b: &QLaurent) -> QLaurent {
        a + b
    }
    fn neg(&self, a: &QLaurent) -> QLaurent {
        -a
    }
    fn mul(&self, a: &QLaurent, b: &QLaurent) -> QLaurent {
        a * b
    }
    fn scale_by_q_power(&self, a: &QLaurent, e: i64) -> QLaurent {
        a.scale_by_q_power(e)
    }
    fn from_rational(&self, r: &Rational) -> QLaurent {
        QLaurent::constant(r.clone())
    }
    fn is_zero(&self, a: &QLaurent) -> bool {
        a.is_zero()
    }
    fn equal(&self, a: &QLaurent, b: &QLaurent) -> bool {
        a == b
    }
    fn try_inv(&self, a: &QLaurent) -> Option<QLaurent> {
        // Only monomials c*q^e are units.
        if a.len() != 1 {
            return None;
        }
        let (e, c) = a.terms().next()?;
        Some(QLaurent::monomial(c.recip(), -e))
    }
    fn elem_to_json(&self, a: &QLaurent) -> serde_json::Value {
        serde_json::to_value(a).expect("Laurent serialization is infallible")
    }
}

/// Polynomials in `q` modulo `q^{cap+1}`. Only nonnegative q-shifts are
/// defined in this quotient; the inversion solver's Borel-scaled recursion
/// never needs any other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CappedLaurentRing {
    cap: i64,
}

impl CappedLaurentRing {
    pub fn new(cap: i64) -> Self {
        Self { cap }
    }

    pub fn cap(&self) -> i64 {
        self.cap
    }
}

impl CoefficientRing for CappedLaurentRing {
    type Elem = QLaurent;

    fn zero(&self) -> QLaurent {
        QLaurent::zero()
    }
    fn one(&self) -> QLaurent {
        QLaurent::one().truncate_above(self.cap)
    }
    fn add(&self, a: &QLaurent, b: &QLaurent) -> QLaurent {
        a + b
    }
    fn neg(&self, a: &QLaurent) -> QLaurent {
        -a
    }
    fn mul(&self, a: &QLaurent, b: &QLaurent) -> QLaurent {
        a.mul_truncated(b, Some(self.cap))
    }
    fn scale_by_q_power(&self, a: &QLaurent, e: i64) -> QLaurent {
        assert!(e >= 0, "negative q-shift is undefined modulo q^(cap+1)");
        a.scale_by_q_power(e).truncate_above(self.cap)
    }
    fn from_rational(&self, r: &Rational) -> QLaurent {
        QLaurent::constant(r.clone()).truncate_above(self.cap)
    }
    fn is_zero(&self, a: &QLaurent) -> bool {
        a.is_zero()
    }
    fn equal(&self, a: &QLaurent, b: &QLaurent) -> bool {
        a == b
    }
    fn try_inv(&self, a: &QLaurent) -> Option<QLaurent> {
        // Units of Q[q]/(q^{cap+1}) with a nonzero constant term exist, but
        // nothing here needs them beyond constants.
        match (a.len(), a.min_exponent()) {
            (1, Some(0)) => Some(QLaurent::constant(a.coeff(0).recip())),
            _ => None,
        }
    }
    fn elem_to_json(&self, a: &QLaurent) -> serde_json::Value {
        serde_json::to_value(a).expect("Laurent serialization is infallible")
    }
}

/// Exact rationals with `q` specialised to a nonzero rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalAt {
    q: Rational,
}

impl RationalAt {
    pub fn new(q: Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::InvalidQ(rational_to_f64(&q)));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }
}

impl CoefficientRing for RationalAt {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn scale_by_q_power(&self, a: &Rational, e: i64) -> Rational {
        if a.is_zero() || e == 0 {
            return a.clone();
        }
        let e = i32::try_from(e).expect("q-shift exponent out of i32 range");
        a * num_traits::Pow::pow(&self.q, e)
    }
    fn from_rational(&self, r: &Rational) -> Rational {
        r.clone()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn equal(&self, a: &Rational, b: &Rational) -> bool {
        a == b
    }
    fn try_inv(&self, a: &Rational) -> Option<Rational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn elem_to_json(&self, a: &Rational) -> serde_json::Value {
        serde_json::Value::String(format_rational(a))
    }
    fn add_mul_assign(&self, acc: &mut Rational, b: &Rational, c: &Rational) {
        if !b.is_zero() && !c.is_zero() {
            *acc += b * c;
        }
    }
}

/// Floating point values with `q` specialised to a positive real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatAt {
    q: f64,
    rel_tol: f64,
}

impl FloatAt {
    pub const DEFAULT_REL_TOL: f64 = 1e-9;

    pub fn new(q: f64) -> Result<Self> {
        Self::with_tolerance(q, Self::DEFAULT_REL_TOL)
    }

    pub fn with_tolerance(q: f64, rel_tol: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidQ(q));
        }
        if rel_tol.is_nan() || rel_tol <= 0.0 {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {rel_tol}")));
        }
        Ok(Self { q, rel_tol })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }
}

impl CoefficientRing for FloatAt {
    type Elem = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn scale_by_q_power(&self, a: &f64, e: i64) -> f64 {
        // powi is exponentiation by squaring.
        match i32::try_from(e) {
            Ok(e) => a * self.q.powi(e),
            Err(_) => a * (e as f64 * self.q.ln()).exp(),
        }
    }
    fn from_rational(&self, r: &Rational) -> f64 {
        rational_to_f64(r)
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
    fn equal(&self, a: &f64, b: &f64) -> bool {
        approx_eq(*a, *b, self.rel_tol)
    }
    fn try_inv(&self, a: &f64) -> Option<f64> {
        (*a != 0.0).then(|| 1.0 / a)
    }
    fn elem_to_json(&self, a: &f64) -> serde_json::Value {
        float_to_json(*a)
    }
    fn add_mul_assign(&self, acc: &mut f64, b: &f64, c: &f64) {
        *acc += b * c;
    }
}

/// Finite floats become JSON numbers; non-finite values become the strings
/// `"inf"`, `"-inf"` and `"nan"`.
pub fn float_to_json(x: f64) -> serde_json::Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => serde_json::Value::Number(n),
        None if x.is_nan() => "nan".into(),
        None if x > 0.0 => "inf".into(),
        None => "-inf".into(),
    }
}

/// Relative comparison; two zeros are equal.
pub fn approx_eq(a: f64, b: f64, rel_tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= rel_tol * a.abs().max(b.abs())
}
