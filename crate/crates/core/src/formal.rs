//! Formal solutions of `Σ f_n g(z) g(z/q) ... g(z/q^{n-1}) = z` that do not
//! vanish at 0, the `h`-recursion behind `g = z h(z/q)/h(z)` for general
//! `q`, and the two q-Borel transforms.
//!
//! A zero `κ` of a polynomial `f` is q-extremal when `f(κ/q^n) ≠ 0` for
//! every `n ≥ 1`. Each such zero gives the formal solution
//! `g_κ = κ h(z/q)/h(z)` with `h(z) = Σ_n z^n / Π_{1≤i≤n} f(κ/q^i)`.
//! Whether other formal solutions exist is not known; nothing here claims
//! the list is complete.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{format_rational, parse_rational, rational_to_f64, Rational};
use crate::asymptotics::Scalar;
use crate::error::{Error, Result};
use crate::inversion::binom2;
use crate::phi::PhiSpec;
use crate::ring::{CoefficientRing, FloatAt, RationalAt};
use crate::series::TruncatedSeries;

/// A polynomial `f = Σ f_k z^k` with `f_0 = 0`, `f_1 = 1`, coefficients
/// `f_0..f_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyF {
    coeffs: Vec<Rational>,
}

impl PolyF {
    pub fn new(mut coeffs: Vec<Rational>) -> Result<Self> {
        while coeffs.len() > 2 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 2 || !coeffs[0].is_zero() || !coeffs[1].is_one() {
            return Err(Error::InvalidArgument("f must satisfy f(0) = 0 and f'(0) = 1".into()));
        }
        Ok(Self { coeffs })
    }

    /// `z (1 - φ(z))` for a polynomial `φ`.
    pub fn from_phi(spec: &PhiSpec) -> Result<Self> {
        let d = spec
            .degree()
            .ok_or_else(|| Error::InvalidArgument(format!("{spec} is not a polynomial")))?;
        let phi = spec.exact_coeffs(d)?;
        let mut c = vec![Rational::zero(), Rational::one()];
        c.extend(phi.iter().skip(1).map(|p| -p));
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + rational_to_f64(c))
    }

    /// `f(z)/z`, coefficients from degree 0.
    fn reduced(&self) -> Vec<Rational> {
        self.coeffs[1..].to_vec()
    }
}

impl fmt::Display for PolyF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let a = c.abs();
            match (first, c.is_negative()) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let z = match k {
                0 => String::new(),
                1 => "z".into(),
                _ => format!("z^{k}"),
            };
            match (a.is_one(), k) {
                (_, 0) => write!(f, "{}", format_rational(&a))?,
                (true, _) => write!(f, "{z}")?,
                (false, _) => write!(f, "{}*{z}", format_rational(&a))?,
            }
        }
        Ok(())
    }
}

/// Parses sums of terms `c`, `c*z^k`, `c z^k`, `z^k`, `z` with rational or
/// decimal `c`, e.g. `z - z^2` or `z - 3/2*z^2 + 1/2 z^3`.
impl FromStr for PolyF {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut coeffs: Vec<Rational> = Vec::new();
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > start && !compact[..i].ends_with('^') {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        for term in terms {
            let (sign, body) = match term.as_bytes().first() {
                Some(b'-') => (-1, &term[1..]),
                Some(b'+') => (1, &term[1..]),
                _ => (1, term),
            };
            let (coef, power) = match body.find('z') {
                None => (body, 0usize),
                Some(p) => {
                    let rest = &body[p + 1..];
                    let k = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .and_then(|e| e.parse::<usize>().ok())
                            .ok_or_else(|| Error::Parse(format!("bad exponent in {term:?}")))?
                    };
                    (body[..p].strip_suffix('*').unwrap_or(&body[..p]), k)
                }
            };
            let c = if coef.is_empty() { Rational::one() } else { parse_rational(coef)? };
            if coeffs.len() <= power {
                coeffs.resize(power + 1, Rational::zero());
            }
            coeffs[power] += c * Rational::from_integer(sign.into());
        }
        if coeffs.len() < 2 {
            coeffs.resize(2, Rational::zero());
        }
        PolyF::new(coeffs)
    }
}

/// How the infinitely many conditions `f(κ/q^n) ≠ 0` were reduced to a
/// finite check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// `q < 1`: past `verified_up_to`, `|κ/q^n|` exceeds the Cauchy bound on
    /// the roots of `f(z)/z`.
    BeyondLargestRoot,
    /// `q > 1`: past `verified_up_to`, `|κ/q^n|` is below the lower root
    /// bound of `f(z)/z`, which is `1/(1 + max |f_k|)` since `f'(0) = 1`.
    BelowSmallestRoot,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QExtremalZero {
    pub kappa: Scalar,
    pub extremal: bool,
    /// Last `n` whose condition was checked directly.
    pub verified_up_to: usize,
    pub certificate: Certificate,
    /// First `n ≥ 1` with `f(κ/q^n) = 0`.
    pub failing_n: Option<usize>,
    /// The root is only known numerically, so the verdict is numeric with
    /// relative tolerance `NUMERIC_ZERO_TOL`, not a proof.
    pub irrational_root_warning: bool,
}

pub const NUMERIC_ZERO_TOL: f64 = 1e-12;

/// Nonzero real zeros of `f` with their q-extremality verdict. Rational
/// zeros are found exactly by the rational root theorem and checked in
/// exact arithmetic; the remaining real zeros are located numerically.
pub fn q_extremal_zeros(f: &PolyF, q: &Rational) -> Result<Vec<QExtremalZero>> {
    if !q.is_positive() || q.is_one() {
        return Err(Error::InvalidQ(rational_to_f64(q)));
    }
    let reduced = f.reduced();
    let (rational_roots, rest) = split_rational_roots(&reduced);
    let mut out = Vec::new();
    let q_small = q < &Rational::one();
    let upper = cauchy_upper(&reduced);
    let lower = Rational::one() / (Rational::one() + reduced[1..].iter().map(|c| c.abs()).max().unwrap_or_default());
    for kappa in rational_roots {
        let mut x = kappa.clone();
        let mut n = 0;
        let mut failing_n = None;
        loop {
            x /= q;
            let done = if q_small { x.abs() > upper } else { x.abs() < lower };
            if done {
                break;
            }
            n += 1;
            if f.eval(&x).is_zero() {
                failing_n = Some(n);
                break;
            }
        }
        out.push(QExtremalZero {
            kappa: Scalar::Exact(kappa),
            extremal: failing_n.is_none(),
            verified_up_to: n,
            certificate: if q_small { Certificate::BeyondLargestRoot } else { Certificate::BelowSmallestRoot },
            failing_n,
            irrational_root_warning: false,
        });
    }
    let rest_f: Vec<f64> = rest.iter().map(rational_to_f64).collect();
    let (upper_f, lower_f, qf) = (rational_to_f64(&upper), rational_to_f64(&lower), rational_to_f64(q));
    for kappa in real_roots(&rest_f) {
        let mut x = kappa;
        let mut n = 0;
        let mut failing_n = None;
        loop {
            x /= qf;
            let done = if q_small { x.abs() > upper_f } else { x.abs() < lower_f };
            if done {
                break;
            }
            n += 1;
            let scale: f64 = f.coeffs.iter().enumerate().map(|(k, c)| rational_to_f64(c).abs() * x.abs().powi(k as i32)).sum();
            if f.eval_f64(x).abs() <= NUMERIC_ZERO_TOL * scale {
                failing_n = Some(n);
                break;
            }
        }
        out.push(QExtremalZero {
            kappa: Scalar::Real(kappa),
            extremal: failing_n.is_none(),
            verified_up_to: n,
            certificate: if q_small { Certificate::BeyondLargestRoot } else { Certificate::BelowSmallestRoot },
            failing_n,
            irrational_root_warning: true,
        });
    }
    out.sort_by(|a, b| a.kappa.to_f64().total_cmp(&b.kappa.to_f64()));
    Ok(out)
}

/// `1 + max |p_i / p_d|`.
fn cauchy_upper(p: &[Rational]) -> Rational {
    let lead = p.last().expect("nonempty").abs();
    Rational::one() + p[..p.len() - 1].iter().map(|c| c.abs() / &lead).max().unwrap_or_default()
}

fn eval_rat(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Exact synthetic division by `(z - r)`; assumes `r` is a root.
fn deflate(p: &[Rational], r: &Rational) -> Vec<Rational> {
    let d = p.len() - 1;
    let mut out = vec![Rational::zero(); d];
    let mut carry = Rational::zero();
    for i in (1..=d).rev() {
        carry = &p[i] + carry * r;
        out[i - 1] = carry.clone();
    }
    out
}

/// Divisors of `n > 0`, or `None` when trial division would be too slow.
fn divisors(n: &num_bigint::BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64().filter(|&v| v <= 1_000_000_000_000)?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    Some(out)
}

/// Pulls out every rational root (with multiplicity) of `p`, `p_0 ≠ 0`.
/// Returns the distinct rational roots and the deflated remainder.
fn split_rational_roots(p: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut p = p.to_vec();
    let mut roots: Vec<Rational> = Vec::new();
    if p.len() < 2 {
        return (roots, p);
    }
    let lcm = p.iter().fold(num_bigint::BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
    let ints: Vec<num_bigint::BigInt> = p.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let (Some(num_div), Some(den_div)) = (divisors(&ints[0]), divisors(ints.last().expect("nonempty"))) else {
        return (roots, p);
    };
    let mut candidates: Vec<Rational> = Vec::new();
    for a in &num_div {
        for b in &den_div {
            let r = Rational::new((*a as i64).into(), (*b as i64).into());
            candidates.push(r.clone());
            candidates.push(-r);
        }
    }
    candidates.sort();
    candidates.dedup();
    for r in candidates {
        let mut found = false;
        while p.len() >= 2 && eval_rat(&p, &r).is_zero() {
            p = deflate(&p, &r);
            found = true;
        }
        if found {
            roots.push(r);
        }
    }
    (roots, p)
}

/// Real roots of `Σ p_i x^i` in floating point, isolated between the
/// critical points (found recursively) and refined by bisection. Roots of
/// even multiplicity are picked up at critical points where `|p|` vanishes
/// to rounding level.
pub fn real_roots(p: &[f64]) -> Vec<f64> {
    let mut p = p.to_vec();
    while p.len() > 1 && p.last() == Some(&0.0) {
        p.pop();
    }
    let d = p.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        return vec![-p[0] / p[1]];
    }
    let eval = |x: f64| p.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let scale = |x: f64| p.iter().enumerate().map(|(i, c)| c.abs() * x.abs().powi(i as i32)).sum::<f64>();
    let deriv: Vec<f64> = p.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect();
    let bound = 1.0 + p[..d].iter().map(|c| (c / p[d]).abs()).fold(0.0, f64::max);
    let mut pts = vec![-bound];
    pts.extend(real_roots(&deriv).into_iter().filter(|x| x.abs() < bound));
    pts.push(bound);
    pts.sort_by(f64::total_cmp);
    let mut roots = Vec::new();
    for w in pts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (eval(a), eval(b));
        if fa.abs() <= 1e-12 * scale(a) {
            roots.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let fm = eval(m);
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if fm.signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    if eval(bound).abs() <= 1e-12 * scale(bound) {
        roots.push(bound);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-10 * b.abs().max(1.0));
    roots
}

/// Evaluates `f` at an element of the ring by Horner's rule.
fn eval_in<R: CoefficientRing>(ring: &R, f: &[R::Elem], x: &R::Elem) -> R::Elem {
    f.iter().rev().fold(ring.zero(), |acc, c| ring.add(&ring.mul(&acc, x), c))
}

/// `g_κ` to order `N` in any ring where the values `f(κ/q^i)` can be
/// inverted.
pub fn g_kappa_in<R: CoefficientRing>(ring: &R, f: &[R::Elem], kappa: &R::Elem, order: usize) -> Result<TruncatedSeries<R>> {
    let mut den = vec![ring.one()];
    let mut num = vec![ring.one()];
    let mut h = ring.one();
    for i in 1..=order {
        let x = ring.scale_by_q_power(kappa, -(i as i64));
        let fx = eval_in(ring, f, &x);
        let inv = ring
            .try_inv(&fx)
            .ok_or_else(|| Error::DivisionByZero(format!("f(kappa/q^{i}) = 0: kappa is not q-extremal")))?;
        h = ring.mul(&h, &inv);
        den.push(h.clone());
        num.push(ring.scale_by_q_power(&h, -(i as i64)));
    }
    let ratio = TruncatedSeries::new(ring.clone(), num).divide(&TruncatedSeries::new(ring.clone(), den))?;
    Ok(ratio.scale(kappa))
}

/// `g_κ` in exact rationals at a rational `q`.
pub fn g_kappa(f: &PolyF, kappa: &Rational, q: &Rational, order: usize) -> Result<TruncatedSeries<RationalAt>> {
    let ring = RationalAt::new(q.clone())?;
    if !f.eval(kappa).is_zero() {
        return Err(Error::InvalidArgument(format!("f({kappa}) != 0")));
    }
    g_kappa_in(&ring, f.coeffs(), kappa, order)
}

/// `g_κ` in floating point, for zeros only known numerically.
pub fn g_kappa_f64(f: &PolyF, kappa: f64, q: f64, order: usize) -> Result<TruncatedSeries<FloatAt>> {
    let ring = FloatAt::new(q)?;
    let fc: Vec<f64> = f.coeffs().iter().map(rational_to_f64).collect();
    g_kappa_in(&ring, &fc, &kappa, order)
}

/// `Σ_{1≤n≤d} f_n g(z) g(z/q) ... g(z/q^{n-1}) - z` for a polynomial `f`
/// given as `f_0..f_d`. The sum is finite, so this is meaningful even when
/// `g(0) ≠ 0`.
pub fn verify_formal_solution<R: CoefficientRing>(g: &TruncatedSeries<R>, f: &[R::Elem]) -> TruncatedSeries<R> {
    let ring = g.ring().clone();
    let order = g.order();
    let mut total = TruncatedSeries::zero(ring.clone(), order);
    let mut prod = g.clone();
    for (n, fn_) in f.iter().enumerate().skip(1) {
        if n > 1 {
            prod = g.mul(&prod.q_dilate(1));
        }
        total = total.add(&prod.scale(fn_));
    }
    total.sub(&TruncatedSeries::monomial(ring, 1, order))
}

/// Same check with `f = z(1 - φ(z))`. A non-polynomial `φ` is only
/// accepted when `g(0) = 0`, since otherwise every term of the infinite
/// sum contributes to every order.
pub fn verify_formal_solution_spec<R: CoefficientRing>(g: &TruncatedSeries<R>, spec: &PhiSpec) -> Result<TruncatedSeries<R>> {
    let ring = g.ring().clone();
    let order = g.order();
    let max = match spec.degree() {
        Some(d) => d + 1,
        None if ring.is_zero(g.coeff(0)) => order,
        None => {
            return Err(Error::InvalidArgument(
                "a solution with g(0) != 0 can only be checked against a polynomial f".into(),
            ))
        }
    };
    let phi = spec.exact_coeffs(max)?;
    let mut f = vec![ring.zero(), ring.one()];
    f.extend(phi.iter().skip(1).take(max - 1).map(|c| ring.from_rational(&-c)));
    Ok(verify_formal_solution(g, &f))
}

/// `h_0..h_N` from `(q^{-k} - 1) h_k = Σ_{0≤m<k} φ_{k-m} q^{-(k-m+1)(k+m)/2} h_m`,
/// `h_0 = 1`, in exact rationals at a rational `q ≠ 1`.
pub fn divergent_h_recursion(spec: &PhiSpec, q: &Rational, order: usize) -> Result<Vec<Rational>> {
    let ring = RationalAt::new(q.clone())?;
    if q.is_one() {
        return Err(Error::InvalidQ(1.0));
    }
    let phi = spec.exact_coeffs(order)?;
    let phi: Vec<Rational> = phi.iter().map(|c| ring.from_rational(c)).collect();
    h_recursion_in(&ring, &phi, order)
}

/// Floating point version of [`divergent_h_recursion`].
pub fn divergent_h_recursion_f64(spec: &PhiSpec, q: f64, order: usize) -> Result<Vec<f64>> {
    if q == 1.0 {
        return Err(Error::InvalidQ(q));
    }
    let ring = FloatAt::new(q)?;
    h_recursion_in(&ring, &spec.float_coeffs(order), order)
}

fn h_recursion_in<R: CoefficientRing>(ring: &R, phi: &[R::Elem], order: usize) -> Result<Vec<R::Elem>> {
    let mut h = vec![ring.one()];
    for k in 1..=order {
        let mut acc = ring.zero();
        for (m, hm) in h.iter().enumerate() {
            let c = &phi[k - m];
            if ring.is_zero(c) {
                continue;
            }
            let e = ((k - m + 1) * (k + m) / 2) as i64;
            ring.add_mul_assign(&mut acc, c, &ring.scale_by_q_power(hm, -e));
        }
        let lhs = ring.sub(&ring.scale_by_q_power(&ring.one(), -(k as i64)), &ring.one());
        let inv = ring.try_inv(&lhs).ok_or_else(|| Error::DivisionByZero(format!("q^-{k} - 1")))?;
        h.push(ring.mul(&acc, &inv));
    }
    Ok(h)
}

/// `B_{1/q;1}`: multiplies the coefficient of `z^n` by `q^{C(n,2)}`.
pub fn borel_1_over_q<R: CoefficientRing>(g: &TruncatedSeries<R>) -> TruncatedSeries<R> {
    rescale_binomial(g, 1)
}

/// Inverse of [`borel_1_over_q`].
pub fn unborel_1_over_q<R: CoefficientRing>(g: &TruncatedSeries<R>) -> TruncatedSeries<R> {
    rescale_binomial(g, -1)
}

fn rescale_binomial<R: CoefficientRing>(g: &TruncatedSeries<R>, sign: i64) -> TruncatedSeries<R> {
    let ring = g.ring().clone();
    let coeffs = g
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| ring.scale_by_q_power(c, sign * binom2(n)))
        .collect();
    TruncatedSeries::new(ring, coeffs)
}

/// `B_{q;1}`: `φ_j ↦ q^{-j²/2} φ_j`, for `q > 1`.
pub fn borel_q(coeffs: &[f64], q: f64) -> Result<Vec<f64>> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::InvalidQ(q));
    }
    let lq = q.ln();
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| c * (-0.5 * (j * j) as f64 * lq).exp())
        .collect())
}

/// `B_{q;1}φ(x)`, summed until a term drops below `tol` times the sum.
pub fn borel_q_eval(spec: &PhiSpec, q: f64, x: f64, tol: f64) -> Result<(f64, usize)> {
    let mut n = 16;
    loop {
        let b = borel_q(&spec.float_coeffs(n), q)?;
        let mut sum = 0.0;
        for (j, c) in b.iter().enumerate() {
            let term = c * x.powi(j as i32);
            sum += term;
            if j >= 2 && term.abs() <= tol * sum.abs() && c.abs() > 0.0 {
                return Ok((sum, j));
            }
        }
        if spec.degree().is_some_and(|d| d <= n) {
            return Ok((sum, n));
        }
        n *= 2;
        if n > 4096 {
            return Err(Error::NonConvergent("q-Borel transform".into()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::inversion::right_inverse_exact;
    use crate::ring::LaurentRing;

    fn poly(c: &[(i64, i64)]) -> PolyF {
        PolyF::new(c.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    #[test]
    fn polynomial_grammar() {
        let f: PolyF = "z-z^2".parse().unwrap();
        assert_eq!(f, poly(&[(0, 1), (1, 1), (-1, 1)]));
        let g: PolyF = "z - 3/2*z^2 + 1/2 z^3".parse().unwrap();
        assert_eq!(g, poly(&[(0, 1), (1, 1), (-3, 2), (1, 2)]));
        assert_eq!(g.to_string(), "z - 3/2*z^2 + 1/2*z^3");
        assert_eq!(g.to_string().parse::<PolyF>().unwrap(), g);
        assert!("1+z".parse::<PolyF>().is_err());
        assert!("2z".parse::<PolyF>().is_err());
        assert!("z^x".parse::<PolyF>().is_err());
        let h = PolyF::from_phi(&PhiSpec::explicit(vec![rat(1, 2), rat(1, 2)]).unwrap()).unwrap();
        assert_eq!(h.to_string(), "z - 1/2*z^2 - 1/2*z^3");
    }

    #[test]
    fn extremal_examples() {
        let f = poly(&[(0, 1), (1, 1), (-1, 1)]);
        let z = q_extremal_zeros(&f, &rat(1, 2)).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z[0].kappa, Scalar::Exact(int(1)));
        assert!(z[0].extremal && !z[0].irrational_root_warning);
        assert_eq!(z[0].certificate, Certificate::BeyondLargestRoot);

        assert!(q_extremal_zeros(&poly(&[(0, 1), (1, 1)]), &rat(1, 2)).unwrap().is_empty());

        // z(1-z)(1-z/2) = z - 3/2 z² + 1/2 z³
        let f = poly(&[(0, 1), (1, 1), (-3, 2), (1, 2)]);
        let z = q_extremal_zeros(&f, &rat(1, 2)).unwrap();
        let one = z.iter().find(|r| r.kappa == Scalar::Exact(int(1))).unwrap();
        assert!(!one.extremal);
        assert_eq!(one.failing_n, Some(1));
        let two = z.iter().find(|r| r.kappa == Scalar::Exact(int(2))).unwrap();
        assert!(two.extremal);
    }

    #[test]
    fn irrational_roots_are_flagged() {
        // z(1 - z - z²): roots of 1 - z - z² are (-1 ± √5)/2
        let f = poly(&[(0, 1), (1, 1), (-1, 1), (-1, 1)]);
        let z = q_extremal_zeros(&f, &rat(1, 2)).unwrap();
        assert_eq!(z.len(), 2);
        assert!(z.iter().all(|r| r.irrational_root_warning && r.extremal));
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!(z.iter().any(|r| (r.kappa.to_f64() - golden).abs() < 1e-12));
    }

    #[test]
    fn real_roots_handles_double_roots() {
        // (x - 1)² (x + 2) = x³ - 3x + 2
        let r = real_roots(&[2.0, -3.0, 0.0, 1.0]);
        assert_eq!(r.len(), 2);
        assert!((r[0] + 2.0).abs() < 1e-12 && (r[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn g_kappa_residual_is_zero() {
        let f = poly(&[(0, 1), (1, 1), (-1, 1)]);
        let g = g_kappa(&f, &int(1), &rat(1, 2), 8).unwrap();
        assert_eq!(g.coeff(0), &int(1));
        let res = verify_formal_solution(&g, f.coeffs());
        assert!(res.is_zero(), "{:?}", res.coeffs());
        // f(κ/q) = f(2) = -2
        let ring = RationalAt::new(rat(1, 2)).unwrap();
        let h1 = g_kappa_in(&ring, f.coeffs(), &int(1), 1).unwrap();
        assert_eq!(h1.order(), 1);

        let bad = TruncatedSeries::new(ring, vec![int(0), int(1), int(1), int(0)]);
        assert!(!verify_formal_solution(&bad, f.coeffs()).is_zero());

        let f3 = poly(&[(0, 1), (1, 1), (-3, 2), (1, 2)]);
        assert!(matches!(g_kappa(&f3, &int(1), &rat(1, 2), 4), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn right_inverse_passes_formal_check() {
        let spec = PhiSpec::explicit(vec![rat(1, 3), rat(0, 1), rat(2, 3)]).unwrap();
        let g = right_inverse_exact(&spec, 10).unwrap().g;
        assert!(verify_formal_solution_spec(&g, &spec).unwrap().is_zero());
        let e = PhiSpec::exponential(1.0).unwrap();
        let ring = FloatAt::new(0.5).unwrap();
        let g = TruncatedSeries::new(ring, vec![1.0, 1.0, 0.0]);
        assert!(verify_formal_solution_spec(&g, &e).is_err());
    }

    #[test]
    fn divergent_h_examples() {
        let h = divergent_h_recursion(&PhiSpec::catalan(), &rat(1, 2), 60).unwrap();
        assert!(h.iter().all(|x| x.is_positive()));
        let growth = crate::arith::ln_abs_rational(&h[60]) / 3600.0;
        let target = 2f64.ln() / 2.0;
        assert!((growth - target).abs() < 0.1 * target, "{growth}");
        let h0 = divergent_h_recursion(&PhiSpec::explicit(vec![]).unwrap(), &rat(1, 2), 5).unwrap();
        assert!(h0[1..].iter().all(Zero::is_zero));
        let h2 = divergent_h_recursion_f64(&PhiSpec::catalan(), 2.0, 40).unwrap();
        let sup = h2.iter().enumerate().skip(1).map(|(k, x)| x.abs().powf(1.0 / k as f64)).fold(0.0, f64::max);
        assert!(sup <= 2.0);
    }

    #[test]
    fn both_h_routes_agree_for_q_above_one() {
        let spec = PhiSpec::catalan();
        let a = divergent_h_recursion_f64(&spec, 2.0, 40).unwrap();
        let b = crate::qbig::h_series_qbig(&spec, 2.0, 40).unwrap();
        let ga = crate::qbig::g_from_h(&a, 2.0, 40).unwrap();
        let gb = crate::qbig::g_from_h(&b, 2.0, 40).unwrap();
        for (x, y) in ga.iter().zip(&gb) {
            assert!((x - y).abs() <= 1e-10 * y.abs().max(1.0));
        }
    }

    #[test]
    fn borel_examples() {
        let ring = LaurentRing;
        let g = right_inverse_exact(&PhiSpec::catalan(), 8).unwrap().g;
        let b = borel_1_over_q(&g);
        assert_eq!(b.coeff(1), &crate::arith::QLaurent::one());
        assert!(unborel_1_over_q(&b).equals(&g));
        let x = TruncatedSeries::monomial(ring, 1, 4);
        assert!(borel_1_over_q(&x).equals(&x));

        let b = borel_q(&[0.0, 1.0], 2.0).unwrap();
        assert!((b[1] - 0.5f64.sqrt()).abs() < 1e-16);
        assert_eq!(borel_q(&[3.0], 2.0).unwrap(), vec![3.0]);
        let (v, j) = borel_q_eval(&PhiSpec::exponential(0.0).unwrap(), 2.0, 1.0, 1e-16).unwrap();
        let direct: f64 = (1..30).map(|j| 2f64.powf(-(j * j) as f64 / 2.0) / (1..=j).map(|i| i as f64).product::<f64>()).sum();
        assert!((v - direct).abs() < 1e-15 && j <= 12);
    }
}
