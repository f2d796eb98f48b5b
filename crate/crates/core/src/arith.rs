//! Exact arithmetic: arbitrary-precision rationals and sparse Laurent
//! polynomials in the formal variable `q`.
//!
//! A [`QLaurent`] is a finite map from exponents (possibly negative) to
//! nonzero rational coefficients. The map never stores zeros, so two equal
//! polynomials always have identical term sets and `==` is structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rationals are `num_rational::BigRational`; the type keeps itself in lowest
/// terms with a positive denominator.
pub type Rational = BigRational;

/// `n/d` as a rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Serialization form `"num/den"`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `a`, `a/b` and plain decimals such as `0.25` or `-1.5e-2`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    parse_decimal(s).ok_or_else(|| Error::Parse(format!("not a rational: {s:?}")))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = int(10);
    let mut r = Rational::from_integer(digits);
    if scale >= 0 {
        r *= num_traits::pow(ten, scale as usize);
    } else {
        r /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if neg { -r } else { r })
}

/// Correctly rounded conversion (saturates to ±inf on overflow).
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Fixed 17-significant-digit scientific notation used by every text
/// output, so that reruns are byte-identical. Non-finite values print as
/// `inf`, `-inf`, `nan`.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Natural logarithm of `|r|`, valid far beyond the f64 range.
pub fn ln_abs_rational(r: &Rational) -> f64 {
    ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom())
}

fn ln_abs_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().map(f64::ln).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact Laurent polynomial in `q` with rational coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct QLaurent {
    terms: BTreeMap<i64, Rational>,
}

impl QLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * q^e`.
    pub fn monomial(c: Rational, e: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in it {
            out.add_term(e, c);
        }
        out
    }

    /// Integer coefficients listed from `q^0` upwards.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(e, &c)| (e as i64, int(c))))
    }

    fn add_term(&mut self, e: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// `[q^j] self`, zero when absent.
    pub fn coeff(&self, j: i64) -> Rational {
        self.terms.get(&j).cloned().unwrap_or_else(Rational::zero)
    }

    /// Multiplies by `q^e`.
    pub fn scale_by_q_power(&self, e: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&k, c)| (k + e, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect(),
        }
    }

    /// Drops every term with exponent above `cap`.
    pub fn truncate_above(&self, cap: i64) -> Self {
        Self {
            terms: self.terms.range(..=cap).map(|(&k, c)| (k, c.clone())).collect(),
        }
    }

    /// Product keeping only exponents `<= cap`.
    ///
    /// Both factors are brought to integer coefficients over a common
    /// denominator, so the convolution runs on integers and each output
    /// coefficient is reduced once.
    pub fn mul_truncated(&self, other: &Self, cap: Option<i64>) -> Self {
        let (Some(amin), Some(bmin)) = (self.min_exponent(), other.min_exponent()) else {
            return Self::zero();
        };
        let lo = amin + bmin;
        let hi = self.max_exponent().unwrap_or(amin) + other.max_exponent().unwrap_or(bmin);
        let hi = cap.map_or(hi, |c| hi.min(c));
        if hi < lo {
            return Self::zero();
        }
        let (da, a) = self.integer_form();
        let (db, b) = other.integer_form();
        let den = da * db;
        let finish = |e: i64, v: BigInt, out: &mut BTreeMap<i64, Rational>| {
            if !v.is_zero() {
                out.insert(e, Rational::new(v, den.clone()));
            }
        };
        let mut terms = BTreeMap::new();
        let width = (hi - lo) as u64 + 1;
        if width <= 4 * (a.len() as u64 * b.len() as u64) + 64 {
            let mut acc = vec![BigInt::zero(); width as usize];
            for (ea, ca) in &a {
                for (eb, cb) in &b {
                    let e = ea + eb;
                    if e > hi {
                        break;
                    }
                    acc[(e - lo) as usize] += ca * cb;
                }
            }
            for (i, v) in acc.into_iter().enumerate() {
                finish(lo + i as i64, v, &mut terms);
            }
        } else {
            let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
            for (ea, ca) in &a {
                for (eb, cb) in &b {
                    let e = ea + eb;
                    if e > hi {
                        break;
                    }
                    *acc.entry(e).or_default() += ca * cb;
                }
            }
            for (e, v) in acc {
                finish(e, v, &mut terms);
            }
        }
        Self { terms }
    }

    /// `(d, [(e, d·c_e)])` with `d` the lcm of the denominators.
    fn integer_form(&self) -> (BigInt, Vec<(i64, BigInt)>) {
        let d = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| if c.denom().is_one() { acc } else { num_integer::lcm(acc, c.denom().clone()) });
        let ints = self
            .terms
            .iter()
            .map(|(&e, c)| (e, c.numer() * (&d / c.denom())))
            .collect();
        (d, ints)
    }

    /// `Σ c·x^e` in floating point. Every term is formed separately so an
    /// overflow in any of them is reported rather than silently producing inf.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x <= 0.0 || !x.is_finite() {
            return Err(Error::InvalidQ(x));
        }
        if x == 1.0 && self.min_exponent().is_some_and(|e| e < 0) {
            // q = 1 is harmless numerically but outside the contract.
            return Err(Error::InvalidQ(x));
        }
        let mut sum = 0.0;
        let lnx = x.ln();
        for (&e, c) in &self.terms {
            let term = if let Ok(ei) = i32::try_from(e) {
                rational_to_f64(c) * x.powi(ei)
            } else {
                f64::INFINITY
            };
            let term = if term.is_finite() {
                term
            } else {
                // Large coefficient times small power can still be finite.
                let ln = ln_abs_rational(c) + e as f64 * lnx;
                if ln > f64::MAX.ln() {
                    return Err(Error::Overflow(format!("term c*q^{e}")));
                }
                let s = if c.is_negative() { -1.0 } else { 1.0 };
                s * ln.exp()
            };
            sum += term;
        }
        if !sum.is_finite() {
            return Err(Error::Overflow("Laurent polynomial sum".into()));
        }
        Ok(sum)
    }
}

impl fmt::Debug for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&e, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match (e, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => write!(f, "q^{e}")?,
                (_, false) => write!(f, "{a}*q^{e}")?,
            }
        }
        Ok(())
    }
}

impl Add for &QLaurent {
    type Output = QLaurent;
    fn add(self, rhs: &QLaurent) -> QLaurent {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &QLaurent {
    type Output = QLaurent;
    fn sub(self, rhs: &QLaurent) -> QLaurent {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Neg for &QLaurent {
    type Output = QLaurent;
    fn neg(self) -> QLaurent {
        QLaurent {
            terms: self.terms.iter().map(|(&e, c)| (e, -c.clone())).collect(),
        }
    }
}

impl Mul for &QLaurent {
    type Output = QLaurent;
    fn mul(self, rhs: &QLaurent) -> QLaurent {
        self.mul_truncated(rhs, None)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QLaurent {
            type Output = QLaurent;
            fn $m(self, rhs: QLaurent) -> QLaurent {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QLaurent {
    type Output = QLaurent;
    fn neg(self) -> QLaurent {
        -(&self)
    }
}

impl Serialize for QLaurent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            terms: Terms<'a>,
        }
        struct Terms<'a>(&'a BTreeMap<i64, Rational>);
        impl Serialize for Terms<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for (e, c) in self.0 {
                    seq.serialize_element(&(e, format_rational(c)))?;
                }
                seq.end()
            }
        }
        Wire { terms: Terms(&self.terms) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QLaurent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            terms: Vec<(i64, String)>,
        }
        let w = Wire::deserialize(d)?;
        let mut terms = Vec::with_capacity(w.terms.len());
        for (e, c) in w.terms {
            terms.push((e, parse_rational(&c).map_err(de::Error::custom)?));
        }
        Ok(QLaurent::from_terms(terms))
    }
}

/// Serde adapter for plain rationals as `"num/den"` strings.
pub mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod rational_vec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(c: &[(i64, i64)]) -> QLaurent {
        QLaurent::from_terms(c.iter().map(|&(e, v)| (e, int(v))))
    }

    #[test]
    fn mul_examples() {
        assert_eq!(lp(&[(0, 1), (1, 1)]) * lp(&[(0, 1), (1, -1)]), lp(&[(0, 1), (2, -1)]));
        assert_eq!(lp(&[(-1, 1)]) * lp(&[(1, 1)]), QLaurent::one());
        assert_eq!(
            QLaurent::from_ints(&[1, 1]) * QLaurent::from_ints(&[1, 1, 2, 1]),
            QLaurent::from_ints(&[1, 2, 3, 3, 1])
        );
    }

    #[test]
    fn eval_examples() {
        assert_eq!(QLaurent::from_ints(&[1, 1]).eval(0.5).unwrap(), 1.5);
        assert_eq!(lp(&[(-1, 1)]).eval(0.5).unwrap(), 2.0);
        assert_eq!(QLaurent::from_ints(&[1, 1, 2, 1]).eval(0.5).unwrap(), 2.125);
    }

    #[test]
    fn eval_rejects_bad_q_and_flags_overflow() {
        assert!(matches!(QLaurent::one().eval(0.0), Err(Error::InvalidQ(_))));
        assert!(matches!(lp(&[(-1, 1)]).eval(1.0), Err(Error::InvalidQ(_))));
        assert!(QLaurent::from_ints(&[1, 1]).eval(1.0).is_ok());
        assert!(matches!(lp(&[(-2000, 1)]).eval(0.5), Err(Error::Overflow(_))));
        // Huge coefficient compensated by a tiny power stays finite.
        let big = QLaurent::monomial(Rational::from_integer(BigInt::from(2).pow(1100)), 1100);
        assert!((big.eval(0.5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coeff_lookup() {
        let p = QLaurent::from_ints(&[1, 1, 2, 1]);
        assert_eq!(p.coeff(2), int(2));
        assert_eq!(QLaurent::from_ints(&[1, 1]).coeff(5), int(0));
        assert_eq!(lp(&[(-3, 1), (-2, 1)]).coeff(-3), int(1));
    }

    #[test]
    fn canonical_form() {
        let p = lp(&[(-2, 3), (4, -1)]);
        assert!((&p - &p).is_empty());
        assert_eq!(QLaurent::from_terms([(1, int(1)), (1, int(-1))]), QLaurent::zero());
    }

    #[test]
    fn serialization_shape() {
        let p = QLaurent::from_terms([(2, rat(1, 2)), (-1, int(3))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"terms":[[-1,"3/1"],[2,"1/2"]]}"#);
        let back: QLaurent = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("2.5e-1").unwrap(), rat(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(format_rational(&int(0)), "0/1");
    }

    #[test]
    fn ln_abs_of_huge_rationals() {
        let r = Rational::from_integer(BigInt::from(2).pow(5000));
        assert!((ln_abs_rational(&r) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((ln_abs_rational(&rat(-3, 7)) - (3.0f64 / 7.0).ln()).abs() < 1e-15);
    }
}
