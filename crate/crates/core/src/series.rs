//! Truncated power series in `z` over a [`CoefficientRing`], together with
//! the q-dilation `z -> z/q^k` and the operator `U_{f,q}`.
//!
//! The order `N` is a hard contract: a series of order `N` stores the
//! coefficients of `z^0..=z^N`, binary operations truncate to the smaller
//! order, and nothing ever extends it.

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::ring::{CoefficientRing, FloatAt};

#[derive(Clone, Debug)]
pub struct TruncatedSeries<R: CoefficientRing> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

/// Direction of the q-shift inside `U`: `Up` builds `f(z)f(qz)...`,
/// `Down` builds `f(z)f(z/q)...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QDirection {
    Up,
    Down,
}

impl<R: CoefficientRing> TruncatedSeries<R> {
    /// Panics when `coeffs` is empty: every series has at least `z^0`.
    pub fn new(ring: R, coeffs: Vec<R::Elem>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series stores at least one coefficient");
        Self { ring, coeffs }
    }

    pub fn zero(ring: R, order: usize) -> Self {
        let coeffs = vec![ring.zero(); order + 1];
        Self { ring, coeffs }
    }

    pub fn one(ring: R, order: usize) -> Self {
        Self::monomial(ring, 0, order)
    }

    /// `z^k`, or zero when `k > order`.
    pub fn monomial(ring: R, k: usize, order: usize) -> Self {
        let mut s = Self::zero(ring, order);
        if k <= order {
            s.coeffs[k] = s.ring.one();
        }
        s
    }

    /// Rational coefficients from `z^0`, padded with zeros or cut to `order`.
    pub fn from_rationals(ring: R, coeffs: &[Rational], order: usize) -> Self {
        let mut s = Self::zero(ring, order);
        for (i, c) in coeffs.iter().enumerate().take(order + 1) {
            s.coeffs[i] = s.ring.from_rational(c);
        }
        s
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R::Elem> {
        self.coeffs
    }

    /// `[z^m]`; panics beyond the order.
    pub fn coeff(&self, m: usize) -> &R::Elem {
        &self.coeffs[m]
    }

    pub fn get(&self, m: usize) -> Option<&R::Elem> {
        self.coeffs.get(m)
    }

    pub fn set(&mut self, m: usize, v: R::Elem) {
        self.coeffs[m] = v;
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Self::new(self.ring.clone(), self.coeffs[..=n].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !self.ring.is_zero(c))
    }

    /// Coefficientwise ring equality up to the smaller order.
    pub fn equals(&self, other: &Self) -> bool {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .all(|(a, b)| self.ring.equal(a, b))
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| self.ring.add(a, b))
            .collect();
        Self::new(self.ring.clone(), coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| self.ring.sub(a, b))
            .collect();
        Self::new(self.ring.clone(), coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.ring.neg(a)).collect();
        Self::new(self.ring.clone(), coeffs)
    }

    /// Multiplies every coefficient by the ring element `c`.
    pub fn scale(&self, c: &R::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.ring.mul(a, c)).collect();
        Self::new(self.ring.clone(), coeffs)
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let r = &self.ring;
        let mut out = vec![r.zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if r.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !r.is_zero(b) {
                    r.add_mul_assign(&mut out[i + j], a, b);
                }
            }
        }
        Self::new(r.clone(), out)
    }

    /// `a(z) -> a(z/q^k)`: the coefficient of `z^m` is multiplied by
    /// `q^{-k m}`. Negative `k` dilates towards `q^{|k|} z`.
    pub fn q_dilate(&self, k: i64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| self.ring.scale_by_q_power(c, -k * m as i64))
            .collect();
        Self::new(self.ring.clone(), coeffs)
    }

    /// Renewal sequence `τ = 1/(1-φ)`: `τ_0 = 1`, `τ_n = Σ_{1≤i≤n} φ_i τ_{n-i}`.
    pub fn reciprocal_one_minus(&self) -> Result<Self> {
        let r = &self.ring;
        if !r.is_zero(&self.coeffs[0]) {
            return Err(Error::InvalidArgument(
                "1/(1-phi) needs phi with zero constant term".into(),
            ));
        }
        let n = self.order();
        let mut tau = Vec::with_capacity(n + 1);
        tau.push(r.one());
        for m in 1..=n {
            let mut acc = r.zero();
            for i in 1..=m {
                r.add_mul_assign(&mut acc, &self.coeffs[i], &tau[m - i]);
            }
            tau.push(acc);
        }
        Ok(Self::new(r.clone(), tau))
    }

    /// `P_k`: keeps `z^0..z^{k-1}` and zeroes the rest; `P_0` is zero.
    pub fn project(&self, k: usize) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut().skip(k) {
            *c = self.ring.zero();
        }
        out
    }

    /// `c` with `c·b = a` up to the smaller order, by forward substitution.
    pub fn divide(&self, b: &Self) -> Result<Self> {
        let r = &self.ring;
        let inv = r
            .try_inv(&b.coeffs[0])
            .ok_or_else(|| Error::DivisionByZero("series constant term is not invertible".into()))?;
        let n = self.order().min(b.order());
        let mut c: Vec<R::Elem> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut acc = self.coeffs[m].clone();
            for i in 1..=m {
                if !r.is_zero(&b.coeffs[i]) {
                    acc = r.sub(&acc, &r.mul(&b.coeffs[i], &c[m - i]));
                }
            }
            c.push(r.mul(&acc, &inv));
        }
        Ok(Self::new(r.clone(), c))
    }

    /// Termwise derivative; the order drops by one (order 0 stays at 0).
    pub fn derivative(&self) -> Self {
        let r = &self.ring;
        if self.order() == 0 {
            return Self::zero(r.clone(), 0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, c)| r.mul(c, &r.from_int(m as i64)))
            .collect();
        Self::new(r.clone(), coeffs)
    }

    /// Linear extension of `U_{f,q} z^k = f(z) f(qz) ... f(q^{k-1} z)`
    /// (`Up`) or of `U_{f,1/q} z^k = f(z) f(z/q) ... f(z/q^{k-1})` (`Down`),
    /// applied to `target` and truncated at the smaller order.
    pub fn apply_u(&self, dir: QDirection, target: &Self) -> Result<Self> {
        let r = &self.ring;
        if !r.is_zero(&self.coeffs[0]) {
            return Err(Error::InvalidArgument("U_f needs f with zero constant term".into()));
        }
        let n = self.order().min(target.order());
        let f = self.truncate(n);
        let step: i64 = match dir {
            QDirection::Up => -1,
            QDirection::Down => 1,
        };
        let mut out = Self::zero(r.clone(), n);
        let mut power = Self::one(r.clone(), n);
        for k in 0..=n {
            let t = &target.coeffs[k];
            if !r.is_zero(t) {
                out = out.add(&power.scale(t));
            }
            if k < n {
                power = power.mul(&f.q_dilate(step * k as i64));
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.coeffs.iter().map(|c| self.ring.elem_to_json(c)).collect())
    }
}

impl TruncatedSeries<FloatAt> {
    /// Horner evaluation of the truncated polynomial at a real `z`.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }
}

impl crate::arith::QLaurent {
    /// `P_k` on a q-polynomial: keeps exponents below `k`.
    pub fn project(&self, k: i64) -> Self {
        self.truncate_above(k - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, QLaurent};
    use crate::ring::{LaurentRing, RationalAt};

    fn qs(c: &[i64]) -> TruncatedSeries<RationalAt> {
        let r = RationalAt::new(rat(1, 2)).unwrap();
        let v: Vec<Rational> = c.iter().map(|&x| int(x)).collect();
        TruncatedSeries::from_rationals(r, &v, c.len() - 1)
    }

    fn ls(c: &[i64], order: usize) -> TruncatedSeries<LaurentRing> {
        let v: Vec<Rational> = c.iter().map(|&x| int(x)).collect();
        TruncatedSeries::from_rationals(LaurentRing, &v, order)
    }

    #[test]
    fn mul_examples() {
        assert!(ls(&[1, 1], 2).mul(&ls(&[1, -1], 2)).equals(&ls(&[1, 0, -1], 2)));
        assert!(ls(&[0, 1], 1).mul(&ls(&[0, 1], 1)).is_zero());
        assert!(qs(&[1, 1, 1]).mul(&qs(&[1, 1, 0])).equals(&qs(&[1, 2, 2])));
        // Mismatched orders truncate to the smaller one.
        assert_eq!(ls(&[1, 1], 5).mul(&ls(&[1, 1], 2)).order(), 2);
    }

    #[test]
    fn dilation_examples() {
        let a = ls(&[0, 1, 1], 2);
        let d = a.q_dilate(1);
        assert_eq!(d.coeff(1), &QLaurent::monomial(int(1), -1));
        assert_eq!(d.coeff(2), &QLaurent::monomial(int(1), -2));
        assert!(a.q_dilate(0).equals(&a));
        assert!(a.q_dilate(1).q_dilate(-1).equals(&a));
    }

    #[test]
    fn renewal_examples() {
        let tau = ls(&[0, 1], 6).reciprocal_one_minus().unwrap();
        assert!(tau.coeffs().iter().all(|c| *c == QLaurent::one()));
        let r = RationalAt::new(rat(1, 3)).unwrap();
        let phi = TruncatedSeries::from_rationals(r, &[int(0), rat(1, 2), rat(1, 2)], 3);
        let tau = phi.reciprocal_one_minus().unwrap();
        assert_eq!(tau.coeffs(), &[int(1), rat(1, 2), rat(3, 4), rat(5, 8)]);
        let tau = ls(&[0], 3).reciprocal_one_minus().unwrap();
        assert!(tau.equals(&ls(&[1], 3)));
        assert!(ls(&[1, 1], 3).reciprocal_one_minus().is_err());
    }

    #[test]
    fn projection_examples() {
        assert!(qs(&[1, 1, 1]).project(2).equals(&qs(&[1, 1, 0])));
        assert!(qs(&[3, 1, 4]).project(0).is_zero());
        let a = qs(&[3, 1, 4, 1]);
        assert!(a.project(2).project(2).equals(&a.project(2)));
        let p = QLaurent::from_ints(&[1, 1, 1]);
        assert_eq!(p.project(2), QLaurent::from_ints(&[1, 1]));
        assert!(p.project(0).is_zero());
    }

    #[test]
    fn division_examples() {
        assert!(qs(&[1, 0, 0, 0]).divide(&qs(&[1, -1, 0, 0])).unwrap().equals(&qs(&[1, 1, 1, 1])));
        let a = qs(&[2, 3, -1, 5]);
        assert!(a.divide(&a).unwrap().equals(&qs(&[1, 0, 0, 0])));
        let c = qs(&[0, 1, 1, 0]).divide(&qs(&[1, 1, 0, 0])).unwrap();
        assert!(c.equals(&qs(&[0, 1, 0, 0])));
        assert!(qs(&[1, 1]).divide(&qs(&[0, 1])).is_err());
        // Laurent ring: invertible only when the constant term is a monomial.
        let b = TruncatedSeries::new(LaurentRing, vec![QLaurent::monomial(int(2), -3), QLaurent::one()]);
        let a = ls(&[1, 0], 1);
        let c = a.divide(&b).unwrap();
        assert!(c.mul(&b).equals(&a));
        let b = TruncatedSeries::new(LaurentRing, vec![QLaurent::from_ints(&[1, 1]), QLaurent::one()]);
        assert!(a.divide(&b).is_err());
    }

    #[test]
    fn derivative_examples() {
        assert!(qs(&[0, 0, 1]).derivative().equals(&qs(&[0, 2])));
        assert!(qs(&[7]).derivative().is_zero());
        assert!(qs(&[1, 1, 1, 1]).derivative().equals(&qs(&[1, 2, 3])));
    }

    #[test]
    fn apply_u_basics() {
        let f = ls(&[0, 1, -1], 6);
        let one = ls(&[1], 6);
        assert!(f.apply_u(QDirection::Up, &one).unwrap().equals(&one));
        // U_{z,q} z^k = q^{C(k,2)} z^k
        let z = ls(&[0, 1], 6);
        for k in 0..=6usize {
            let zk = TruncatedSeries::monomial(LaurentRing, k, 6);
            let u = z.apply_u(QDirection::Up, &zk).unwrap();
            let expected = zk.scale(&QLaurent::monomial(int(1), (k * k.saturating_sub(1) / 2) as i64));
            assert!(u.equals(&expected), "k = {k}");
        }
        assert!(one.apply_u(QDirection::Up, &one).is_err());
    }

    #[test]
    fn float_eval() {
        let r = FloatAt::new(0.5).unwrap();
        let s = TruncatedSeries::new(r, vec![1.0, 2.0, 3.0]);
        assert_eq!(s.eval(2.0), 1.0 + 4.0 + 12.0);
    }
}
