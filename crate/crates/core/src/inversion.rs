//! The right inverse `g` of `f(z) = z(1 - φ(z))`: the unique series with
//! `g(0) = 0` solving `Σ f_n g(z) g(z/q) ... g(z/q^{n-1}) = z`.
//!
//! # Solver
//!
//! With `f_1 = 1` the equation reads `g = z + Σ_{k≥2} φ_{k-1} Q_k` where
//! `Q_k(z) = g(z) g(z/q) ... g(z/q^{k-1}) = g(z) Q_{k-1}(z/q)`. Each `Q_k`
//! with `k ≥ 2` only involves `g_1..g_{M-1}` at order `M`, so the
//! coefficients are produced one order at a time.
//!
//! The recursion runs in Borel-scaled coordinates: the coefficient of `z^M`
//! is stored multiplied by `q^{C(M,2)}`. In those coordinates
//! `[z^M] Q_k = Σ_m ĝ_{M-m} [z^m] Q_{k-1} q^{m(M-m-1)}` with only nonnegative
//! exponents, the stored value of `g_{n+1}` is exactly
//! `t_n = q^{C(n+1,2)} g_{n+1}`, and numeric runs at `q < 1` stay in range
//! even though `g_n` itself grows like `q^{-C(n,2)}`. For `q > 1` the numeric
//! solver uses plain coordinates instead.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{ln_abs_rational, QLaurent, Rational};
use crate::error::{Error, Result};
use crate::phi::PhiSpec;
use crate::ring::{CappedLaurentRing, CoefficientRing, FloatAt, LaurentRing};
use crate::series::TruncatedSeries;
use crate::tuples::{l_statistic, Compositions};

/// `g` to order `N`, `t_0..t_{N-1}` and `ε_0..ε_{N-1}`.
#[derive(Clone, Debug)]
pub struct InversionResult<R: CoefficientRing> {
    pub g: TruncatedSeries<R>,
    pub t: Vec<R::Elem>,
    pub eps: Vec<R::Elem>,
}

impl<R: CoefficientRing> InversionResult<R> {
    pub fn order(&self) -> usize {
        self.g.order()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ring = self.g.ring();
        let list = |v: &[R::Elem]| serde_json::Value::Array(v.iter().map(|c| ring.elem_to_json(c)).collect());
        serde_json::json!({
            "g": self.g.to_json(),
            "t": list(&self.t),
            "eps": list(&self.eps),
        })
    }
}

impl InversionResult<FloatAt> {
    /// `ln |g_n|` computed from `t_{n-1}`, valid where `g_n` itself overflows.
    pub fn ln_abs_g(&self, n: usize) -> f64 {
        match n {
            0 => f64::NEG_INFINITY,
            _ => {
                let q = self.g.ring().q();
                self.t[n - 1].abs().ln() - binom2(n) as f64 * q.ln()
            }
        }
    }
}

/// `t` and `ε` modulo `q^{cap+1}`, for checks that only read low q-degrees.
#[derive(Clone, Debug, Serialize)]
pub struct CappedInversion {
    pub cap: i64,
    pub t: Vec<QLaurent>,
    pub eps: Vec<QLaurent>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    Numeric(f64),
}

#[derive(Clone, Debug)]
pub enum Inversion {
    Exact(InversionResult<LaurentRing>),
    Numeric(InversionResult<FloatAt>),
}

impl Inversion {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Inversion::Exact(r) => r.to_json(),
            Inversion::Numeric(r) => r.to_json(),
        }
    }
}

pub(crate) fn binom2(n: usize) -> i64 {
    let n = n as i64;
    n * (n - 1) / 2
}

/// Solves in the requested mode. Exact mode needs rational `φ`.
pub fn right_inverse(spec: &PhiSpec, order: usize, mode: Mode) -> Result<Inversion> {
    match mode {
        Mode::Exact => right_inverse_exact(spec, order).map(Inversion::Exact),
        Mode::Numeric(q) => right_inverse_numeric(spec, order, q).map(Inversion::Numeric),
    }
}

pub fn right_inverse_exact(spec: &PhiSpec, order: usize) -> Result<InversionResult<LaurentRing>> {
    check_order(order)?;
    let phi = spec.exact_coeffs(order)?;
    let ring = LaurentRing;
    let phi_r: Vec<QLaurent> = phi.iter().map(|c| ring.from_rational(c)).collect();
    let scaled = scaled_solve(&ring, &phi_r, order, true);
    let g: Vec<QLaurent> = scaled
        .iter()
        .enumerate()
        .map(|(n, c)| c.scale_by_q_power(-binom2(n)))
        .collect();
    let t = scaled[1..].to_vec();
    let eps = defect(&ring, &phi_r, &t);
    Ok(InversionResult { g: TruncatedSeries::new(ring, g), t, eps })
}

/// `t_0..t_{order-1}` and `ε` modulo `q^{cap+1}`.
pub fn right_inverse_capped(spec: &PhiSpec, order: usize, cap: i64) -> Result<CappedInversion> {
    check_order(order)?;
    if cap < 0 {
        return Err(Error::InvalidArgument(format!("q-degree cap must be >= 0, got {cap}")));
    }
    let ring = CappedLaurentRing::new(cap);
    let phi: Vec<QLaurent> = spec.exact_coeffs(order)?.iter().map(|c| ring.from_rational(c)).collect();
    let scaled = scaled_solve(&ring, &phi, order, true);
    let t = scaled[1..].to_vec();
    let eps = defect(&ring, &phi, &t);
    Ok(CappedInversion { cap, t, eps })
}

/// Numeric mode at a fixed real `q > 0`, `q ≠ 1`.
pub fn right_inverse_numeric(spec: &PhiSpec, order: usize, q: f64) -> Result<InversionResult<FloatAt>> {
    right_inverse_from_float_coeffs(&spec.float_coeffs(order), order, q)
}

/// Numeric mode from explicit coefficients `φ_0 = 0, φ_1, ...`; missing
/// coefficients are taken as zero.
pub fn right_inverse_from_float_coeffs(phi: &[f64], order: usize, q: f64) -> Result<InversionResult<FloatAt>> {
    check_order(order)?;
    if !(q > 0.0 && q.is_finite()) || q == 1.0 {
        return Err(Error::InvalidQ(q));
    }
    if phi.first().is_some_and(|&c| c != 0.0) {
        return Err(Error::InvalidArgument("phi must vanish at 0".into()));
    }
    let ring = FloatAt::new(q)?;
    let mut phi = phi.to_vec();
    phi.resize(order + 1, 0.0);
    phi.truncate(order + 1);
    let borel = q < 1.0;
    let scaled = scaled_solve(&ring, &phi, order, borel);
    let (g, t) = if borel {
        let g = scaled
            .iter()
            .enumerate()
            .map(|(n, c)| ring.scale_by_q_power(c, -binom2(n)))
            .collect();
        (g, scaled[1..].to_vec())
    } else {
        let t = scaled
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| ring.scale_by_q_power(c, binom2(n)))
            .collect();
        (scaled, t)
    };
    let eps = defect(&ring, &phi, &t);
    Ok(InversionResult { g: TruncatedSeries::new(ring, g), t, eps })
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidArgument("truncation order must be >= 1".into()));
    }
    Ok(())
}

/// Coefficient-by-coefficient fixpoint. Returns `ĝ_0..ĝ_order` where
/// `ĝ_M = q^{C(M,2)} g_M` when `borel`, else `ĝ_M = g_M`.
fn scaled_solve<R: CoefficientRing>(ring: &R, phi: &[R::Elem], order: usize, borel: bool) -> Vec<R::Elem> {
    // Q_k only feeds g through φ_{k-1}; for a polynomial φ of degree d the
    // chain stops at k = d + 1.
    let last = phi.iter().rposition(|c| !ring.is_zero(c)).unwrap_or(0);
    let kmax = (last + 1).min(order);
    let mut g = vec![ring.zero(); order + 1];
    if order >= 1 {
        g[1] = ring.one();
    }
    // prods[k][m] = [z^m] Q_k (scaled) for k >= 2; Q_1 is g.
    let mut prods: Vec<Vec<R::Elem>> = vec![vec![ring.zero(); order + 1]; kmax + 1];
    for big_m in 2..=order {
        let mut gm = ring.zero();
        for k in 2..=kmax.min(big_m) {
            let mut acc = ring.zero();
            for m in (k - 1)..big_m {
                let prev = if k == 2 { &g[m] } else { &prods[k - 1][m] };
                if ring.is_zero(prev) {
                    continue;
                }
                let e = if borel { (m * (big_m - m - 1)) as i64 } else { -(m as i64) };
                let left = ring.scale_by_q_power(&g[big_m - m], e);
                if !ring.is_zero(&left) {
                    ring.add_mul_assign(&mut acc, &left, prev);
                }
            }
            if !ring.is_zero(&phi[k - 1]) {
                ring.add_mul_assign(&mut gm, &phi[k - 1], &acc);
            }
            prods[k][big_m] = acc;
        }
        g[big_m] = gm;
    }
    g
}

/// `ε_n = t_n - Σ_{1≤i≤n} φ_i t_{n-i}`.
fn defect<R: CoefficientRing>(ring: &R, phi: &[R::Elem], t: &[R::Elem]) -> Vec<R::Elem> {
    (0..t.len())
        .map(|n| {
            let mut conv = ring.zero();
            for i in 1..=n.min(phi.len() - 1) {
                ring.add_mul_assign(&mut conv, &phi[i], &t[n - i]);
            }
            ring.sub(&t[n], &conv)
        })
        .collect()
}

pub const DEFAULT_ORACLE_BOUND: usize = 12;

/// `t_n` by brute-force enumeration of the composition sum
/// `t_n = 1{n=0} + Σ_i φ_i Σ t_{n_1}...t_{n_{i+1}} q^{L_{i+1}(n_1..n_{i+1})}`
/// over `n_1 + ... + n_{i+1} = n - i`. Exponential in `n`.
pub fn segner_oracle(spec: &PhiSpec, n: usize, bound: usize) -> Result<QLaurent> {
    Ok(segner_table(spec, n, bound)?.pop().expect("table holds t_0..t_n"))
}

/// `t_0..=t_n` from the composition sum.
pub fn segner_table(spec: &PhiSpec, n: usize, bound: usize) -> Result<Vec<QLaurent>> {
    if n > bound {
        return Err(Error::OracleBound { n, bound });
    }
    let phi = spec.exact_coeffs(n)?;
    let mut t: Vec<QLaurent> = vec![QLaurent::one()];
    for m in 1..=n {
        let mut acc = QLaurent::zero();
        for (i, phi_i) in phi.iter().enumerate().take(m + 1).skip(1) {
            if phi_i.is_zero() {
                continue;
            }
            let mut it = Compositions::new((m - i) as u64, i + 1);
            while let Some(parts) = it.advance() {
                let mut prod = QLaurent::monomial(phi_i.clone(), l_statistic(parts));
                for &p in parts {
                    prod = &prod * &t[p as usize];
                }
                acc = &acc + &prod;
            }
        }
        t.push(acc);
    }
    Ok(t)
}

/// Checks `(1 - φ(z)) H(z) = 1` to order `order`, where
/// `H(z) = Σ_n t_n z^n Π_{1≤j≤n} (1 - φ(q^j z))`. Needs `t_0..t_order`,
/// i.e. a result computed to order `order + 1`.
pub fn h_identity_check(result: &InversionResult<LaurentRing>, spec: &PhiSpec, order: usize) -> Result<bool> {
    if result.t.len() < order + 1 {
        return Err(Error::InvalidArgument(format!(
            "need t_0..t_{order}, result only has {} terms",
            result.t.len()
        )));
    }
    let ring = LaurentRing;
    let phi = TruncatedSeries::from_rationals(ring, &spec.exact_coeffs(order)?, order);
    let one = TruncatedSeries::one(ring, order);
    let mut h = TruncatedSeries::zero(ring, order);
    let mut prod = one.clone();
    for n in 0..=order {
        if n >= 1 {
            prod = prod.mul(&one.sub(&phi.q_dilate(-(n as i64))));
        }
        // t_n z^n · prod
        let mut shifted = TruncatedSeries::zero(ring, order);
        for m in 0..=(order - n) {
            shifted.set(m + n, ring.mul(&result.t[n], prod.coeff(m)));
        }
        h = h.add(&shifted);
    }
    Ok(one.sub(&phi).mul(&h).equals(&one))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub item: &'static str,
    pub n: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct StructuralReport {
    pub checked_up_to: usize,
    pub violations: Vec<Violation>,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Structural facts about the exact right inverse:
/// (a) `g_n` has q-exponents in `[-C(n,2), 0]`;
/// (b) `[q^{-C(n,2)}] g_n = τ_{n-1}`;
/// (c) the coefficients of `g_n` are nonnegative when `φ` is;
/// (d) `[q^0] t_n = τ_n`.
pub fn structural_checks(result: &InversionResult<LaurentRing>, spec: &PhiSpec) -> Result<StructuralReport> {
    let order = result.order();
    let ring = LaurentRing;
    let phi = TruncatedSeries::from_rationals(ring, &spec.exact_coeffs(order)?, order);
    let tau: Vec<Rational> = phi
        .reciprocal_one_minus()?
        .coeffs()
        .iter()
        .map(|c| c.coeff(0))
        .collect();
    let mut report = StructuralReport { checked_up_to: order, violations: Vec::new() };
    let mut flag = |item, n, detail: String| report.violations.push(Violation { item, n, detail });
    let g = result.g.coeffs();
    if !g[0].is_zero() {
        flag("g0", 0, format!("g_0 = {}", g[0]));
    }
    if order >= 1 && g[1] != QLaurent::one() {
        flag("g1", 1, format!("g_1 = {}", g[1]));
    }
    for (n, gn) in g.iter().enumerate().skip(1) {
        let low = -binom2(n);
        if let (Some(lo), Some(hi)) = (gn.min_exponent(), gn.max_exponent()) {
            if lo < low || hi > 0 {
                flag("a", n, format!("exponents [{lo}, {hi}] outside [{low}, 0]"));
            }
        }
        let lead = gn.coeff(low);
        if lead != tau[n - 1] {
            flag("b", n, format!("[q^{low}] g_n = {lead}, tau_{} = {}", n - 1, tau[n - 1]));
        }
        if spec.is_nonnegative() && gn.terms().any(|(_, c)| c.is_negative()) {
            flag("c", n, "negative coefficient".into());
        }
    }
    for (n, tn) in result.t.iter().enumerate() {
        if tn.coeff(0) != tau[n] {
            flag("d", n, format!("[q^0] t_n = {}, tau_n = {}", tn.coeff(0), tau[n]));
        }
    }
    Ok(report)
}

/// `p(0..=n)` from Euler's pentagonal recurrence.
pub fn partition_numbers(n: usize) -> Vec<num_bigint::BigInt> {
    use num_bigint::BigInt;
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = BigInt::one();
    for m in 1..=n {
        let mut acc = BigInt::zero();
        for k in 1.. {
            let k = k as usize;
            let pent1 = k * (3 * k - 1) / 2;
            if pent1 > m {
                break;
            }
            let pent2 = k * (3 * k + 1) / 2;
            let mut term = p[m - pent1].clone();
            if pent2 <= m {
                term += &p[m - pent2];
            }
            if k % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        p[m] = acc;
    }
    p
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizationRow {
    pub j: usize,
    pub partition_number: String,
    /// `(n, [q^j] t_n)` for `j ≤ n ≤ N`.
    pub values: Vec<(usize, String)>,
    /// Smallest `n0 ≥ j` with `[q^j] t_n = p(j)` for every `n0 ≤ n ≤ N`.
    pub onset: Option<usize>,
}

impl StabilizationRow {
    /// Equality holds on the whole range `j ≤ n ≤ N`.
    pub fn holds_from_j(&self) -> bool {
        self.onset == Some(self.j)
    }

    /// Equality holds for `n > j` (and at `n = 0` when `j = 0`).
    pub fn holds_beyond_j(&self) -> bool {
        let start = if self.j == 0 { 0 } else { self.j + 1 };
        self.onset.is_some_and(|n0| n0 <= start)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizationTable {
    pub order: usize,
    pub rows: Vec<StabilizationRow>,
}

impl StabilizationTable {
    /// Every row is constant from `n = j` on.
    pub fn holds_from_j(&self) -> bool {
        self.rows.iter().all(StabilizationRow::holds_from_j)
    }

    /// Every row is constant from `n = j + 1` on (`n = 0` for `j = 0`).
    pub fn holds_beyond_j(&self) -> bool {
        self.rows.iter().all(StabilizationRow::holds_beyond_j)
    }
}

/// For the q-Catalan numbers, tabulates `[q^j] t_n` against `p(j)` for
/// `j ≤ j_max` and `j ≤ n ≤ N`. The coefficient is constant only from
/// `n = j + 1` on when `j ≥ 1`: `t_j` misses the tuple that first
/// contributes `q^j`, e.g. `[q^1] t_1 = 0`.
pub fn catalan_stabilization(order: usize, j_max: usize) -> Result<StabilizationTable> {
    let capped = right_inverse_capped(&PhiSpec::catalan(), order + 1, j_max as i64)?;
    let p = partition_numbers(j_max);
    let rows = (0..=j_max)
        .map(|j| {
            let target = Rational::from_integer(p[j].clone());
            let values: Vec<(usize, Rational)> =
                (j..=order).map(|n| (n, capped.t[n].coeff(j as i64))).collect();
            let onset = match values.iter().rposition(|(_, v)| *v != target) {
                None if values.is_empty() => None,
                None => Some(j),
                Some(last_bad) if last_bad + 1 < values.len() => Some(values[last_bad + 1].0),
                Some(_) => None,
            };
            StabilizationRow {
                j,
                partition_number: p[j].to_string(),
                values: values.into_iter().map(|(n, v)| (n, v.to_string())).collect(),
                onset,
            }
        })
        .collect();
    Ok(StabilizationTable { order, rows })
}

/// Least-squares fit of `ln|g_n|` against `(n²/2) ln(1/q)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GevreyEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the fit residuals.
    pub residual: f64,
    pub points: usize,
    /// Fewer than 10 nonzero coefficients: slope and intercept are NaN.
    pub degenerate: bool,
}

pub fn gevrey_diagnostic(spec: &PhiSpec, q: f64, order: usize) -> Result<GevreyEstimate> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidQ(q));
    }
    let res = right_inverse_numeric(spec, order, q)?;
    let scale = 0.5 * (1.0 / q).ln();
    let pts: Vec<(f64, f64)> = (1..=order)
        .filter(|&n| res.t[n - 1] != 0.0)
        .map(|n| ((n * n) as f64 * scale, res.ln_abs_g(n)))
        .collect();
    Ok(fit_line(&pts))
}

fn fit_line(pts: &[(f64, f64)]) -> GevreyEstimate {
    let k = pts.len();
    if k < 10 {
        return GevreyEstimate { slope: f64::NAN, intercept: f64::NAN, residual: f64::NAN, points: k, degenerate: true };
    }
    let kf = k as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / kf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    GevreyEstimate { slope, intercept, residual: (ss / kf).sqrt(), points: k, degenerate: false }
}

/// `ln |t_n|` for an exact `t_n` evaluated at a rational point, used by
/// growth fits that leave the f64 range.
pub fn ln_abs(r: &Rational) -> f64 {
    ln_abs_rational(r)
}
