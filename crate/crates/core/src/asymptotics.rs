//! Limits of `t_n(q)` for `0 < q < 1`: the constants `ζ`, `Φ_n`, `Γ(ρ)`,
//! `L(q) = 1 / Π_{j≥1} (1 - φ(ζ q^j))`, and diagnostics for the three
//! weak convergence modes of `a_n = n Φ_n t̃_n(q)` towards `L(q)`:
//! limit inferior, convergence outside a set of density zero, and
//! coefficientwise convergence in `q`.
//!
//! `t̃` is computed from the rescaled datum `φ̃(z) = φ(ζ z)`, whose right
//! inverse is `g(ζ z)/ζ`, so that every formula below is in the `ζ = 1`
//! normalization.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{format_f64, format_rational, rational_to_f64, Rational};
use crate::error::{Error, Result};
use crate::inversion::{right_inverse_capped, right_inverse_from_float_coeffs};
use crate::phi::{PhiKind, PhiSpec};
use crate::ring::{FloatAt, LaurentRing};
use crate::series::TruncatedSeries;

/// Bound on the dropped log-tail of every infinite product. Kept near
/// rounding level so the truncation never dominates.
pub const PRODUCT_TAIL: f64 = 1e-15;

/// `φ(x)`. The fractional family is only defined for `x ≤ 1`.
pub fn phi_eval(spec: &PhiSpec, x: f64) -> Result<f64> {
    Ok(match spec.kind() {
        PhiKind::Catalan => x,
        PhiKind::Explicit(c) => c.iter().rev().fold(0.0, |acc, ci| (acc + rational_to_f64(ci)) * x),
        PhiKind::FractionalCatalan(rho) => {
            if x > 1.0 {
                return Err(Error::DomainViolation(x));
            }
            -((1.0 - x).powf(*rho) - 1.0)
        }
        PhiKind::Exponential(lambda) => lambda.exp() * x.exp_m1(),
        PhiKind::Alternating(inner) => phi_eval(inner, -x)?,
    })
}

/// `φ'(x)`.
pub fn phi_prime(spec: &PhiSpec, x: f64) -> Result<f64> {
    Ok(match spec.kind() {
        PhiKind::Catalan => 1.0,
        PhiKind::Explicit(c) => c
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, ci)| acc * x + (i + 1) as f64 * rational_to_f64(ci)),
        PhiKind::FractionalCatalan(rho) => {
            if x > 1.0 {
                return Err(Error::DomainViolation(x));
            }
            rho * (1.0 - x).powf(rho - 1.0)
        }
        PhiKind::Exponential(lambda) => (lambda + x).exp(),
        PhiKind::Alternating(inner) => -phi_prime(inner, -x)?,
    })
}

/// Smallest positive root of `φ(x) = 1`. Built-in families use their closed
/// form; explicit polynomials are bisected to `|φ(ζ) - 1| ≤ tol`. For an
/// alternating spec this is the `ζ` of the inner spec.
pub fn find_zeta(spec: &PhiSpec, tol: f64) -> Result<f64> {
    if let Some(z) = spec.zeta() {
        return Ok(z);
    }
    match spec.kind() {
        PhiKind::Explicit(c) => {
            if c.iter().all(Zero::is_zero) {
                return Err(Error::NoRoot);
            }
            let mut hi = 1.0;
            while phi_eval(spec, hi)? < 1.0 {
                hi *= 2.0;
                if !hi.is_finite() {
                    return Err(Error::NoRoot);
                }
            }
            let mut lo = 0.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let v = phi_eval(spec, mid)?;
                if (v - 1.0).abs() <= tol && hi - lo <= tol.max(f64::EPSILON * hi) {
                    return Ok(mid);
                }
                if v < 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= f64::EPSILON * hi {
                    break;
                }
            }
            Ok(0.5 * (lo + hi))
        }
        PhiKind::Alternating(inner) => find_zeta(inner, tol),
        _ => Err(Error::NoRoot),
    }
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Γ(x)` by the Lanczos approximation, with reflection below 1/2.
pub fn gamma_fn(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_fn(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Number of factors `J` such that `Σ_{j>J} -ln(1 - q^j) < tail`.
/// Uses `-ln(1 - x) ≤ x/(1 - x)` and a geometric bound on the sum.
fn product_terms(q: f64, tail: f64) -> usize {
    let mut j = 1usize;
    loop {
        let qj = q.powi(j as i32 + 1);
        if qj / ((1.0 - q) * (1.0 - qj)) < tail || j > 100_000 {
            return j;
        }
        j += 1;
    }
}

/// `(q;q)_∞ = Π_{j≥1} (1 - q^j)`.
pub fn q_pochhammer_inf(q: f64) -> Result<f64> {
    check_q(q)?;
    let terms = product_terms(q, PRODUCT_TAIL);
    Ok((1..=terms).map(|j| (-q.powi(j as i32)).ln_1p()).sum::<f64>().exp())
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidQ(q))
    }
}

/// The data fixed by `(φ, q)`: `ζ`, `ρ`, `Γ(ρ)` and `L(q)`.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticContext {
    #[serde(serialize_with = "display")]
    pub spec: PhiSpec,
    /// Nonnegative spec the constants are computed from: the spec itself,
    /// or the inner spec of an alternating wrapper.
    #[serde(skip)]
    pub base: PhiSpec,
    pub zeta: f64,
    pub rho: f64,
    pub q: f64,
    pub l_value: f64,
    pub gamma_rho: f64,
    /// Factors used for `L(q)`.
    pub product_terms: usize,
}

fn display<S: serde::Serializer>(spec: &PhiSpec, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(spec)
}

/// Root-finding tolerance for `ζ` and the tail target for infinite
/// products.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub root: f64,
    pub tail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { root: 1e-15, tail: PRODUCT_TAIL }
    }
}

impl AsymptoticContext {
    pub fn new(spec: &PhiSpec, q: f64) -> Result<Self> {
        Self::with_tolerances(spec, q, Tolerances::default())
    }

    pub fn with_tolerances(spec: &PhiSpec, q: f64, tol: Tolerances) -> Result<Self> {
        check_q(q)?;
        if !(tol.root > 0.0 && tol.tail > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        let base = spec.inner().cloned().unwrap_or_else(|| spec.clone());
        let zeta = find_zeta(&base, tol.root)?;
        let rho = base.rho();
        if rho > 1.0 {
            return Err(Error::InvalidArgument(format!("rho must be <= 1, got {rho}")));
        }
        // Nonnegative coefficients and φ(ζ) = 1 give φ(ζ q^j) ≤ q^j, so the
        // tail of Σ -ln(1 - φ(ζ q^j)) is dominated by that of (q;q)_∞.
        let terms = product_terms(q, tol.tail);
        let mut log_prod = 0.0;
        for j in 1..=terms {
            log_prod += (-phi_eval(&base, zeta * q.powi(j as i32))?).ln_1p();
        }
        Ok(Self {
            spec: spec.clone(),
            base,
            zeta,
            rho,
            q,
            l_value: (-log_prod).exp(),
            gamma_rho: gamma_fn(rho),
            product_terms: terms,
        })
    }
}

/// `Φ_n = Γ(ρ) (1 - φ(ζ (1 - 1/n)))`.
pub fn big_phi(ctx: &AsymptoticContext, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("Phi_n needs n >= 1".into()));
    }
    let x = ctx.zeta * (1.0 - 1.0 / n as f64);
    Ok(ctx.gamma_rho * (1.0 - phi_eval(&ctx.base, x)?))
}

/// `L(q)`.
pub fn limit_constant_l(ctx: &AsymptoticContext) -> f64 {
    ctx.l_value
}

/// `[q^0..q^{j_max}]` of `Π_{j≥1} 1/(1 - φ(ζ q^j))`, exact when `ζ = 1`.
pub fn l_as_q_series(spec: &PhiSpec, j_max: usize) -> Result<Vec<Rational>> {
    if spec.zeta_exact() != Some(Rational::one()) {
        return Err(Error::NotExact(format!("zeta of {spec} is not known to be 1")));
    }
    let ring = LaurentRing;
    let phi = spec.exact_coeffs(j_max)?;
    // Work with series in q, stored as coefficients of a truncated series.
    let mut prod = TruncatedSeries::from_rationals(ring, &[Rational::one()], j_max);
    for j in 1..=j_max {
        let mut factor = vec![Rational::zero(); j_max + 1];
        for (i, c) in phi.iter().enumerate().skip(1) {
            if i * j <= j_max {
                factor[i * j] = c.clone();
            }
        }
        let inv = TruncatedSeries::from_rationals(ring, &factor, j_max).reciprocal_one_minus()?;
        prod = prod.mul(&inv);
    }
    Ok(prod.coeffs().iter().map(|c| c.coeff(0)).collect())
}

/// Floating point version of [`l_as_q_series`] for any `ζ`.
pub fn l_as_q_series_f64(spec: &PhiSpec, j_max: usize) -> Result<Vec<f64>> {
    let zeta = find_zeta(spec, 1e-15)?;
    let phi = rescaled_coeffs(spec, zeta, j_max);
    let ring = FloatAt::new(0.5)?;
    let mut prod = TruncatedSeries::new(ring, {
        let mut v = vec![0.0; j_max + 1];
        v[0] = 1.0;
        v
    });
    for j in 1..=j_max {
        let mut factor = vec![0.0; j_max + 1];
        for (i, c) in phi.iter().enumerate().skip(1) {
            if i * j <= j_max {
                factor[i * j] = *c;
            }
        }
        prod = prod.mul(&TruncatedSeries::new(ring, factor).reciprocal_one_minus()?);
    }
    Ok(prod.into_coeffs())
}

/// `φ_i ζ^i` for `i = 0..=max_n`.
fn rescaled_coeffs(spec: &PhiSpec, zeta: f64, max_n: usize) -> Vec<f64> {
    spec.float_coeffs(max_n)
        .into_iter()
        .enumerate()
        .map(|(i, c)| c * zeta.powi(i as i32))
        .collect()
}

/// A value that is exact when the data allow it.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Real(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Real(x) => *x,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Scalar::Exact(r) => format_rational(r),
            Scalar::Real(x) => format_f64(*x),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => s.serialize_str(&format_rational(r)),
            Scalar::Real(x) => crate::ring::float_to_json(*x).serialize(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationDensity {
    pub delta: f64,
    pub window: (usize, usize),
    /// Fraction of `n` in the window with `|a_n - L| ≥ δ`.
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffRow {
    pub j: usize,
    pub n: usize,
    /// `n Φ_n [q^j] t_n`.
    pub scaled_coeff: Scalar,
    /// `[q^j] L`.
    pub limit: Scalar,
}

/// Per-`j` summary of the coefficientwise table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffSummary {
    pub j: usize,
    pub limit: Scalar,
    /// Smallest `n0` with `n Φ_n [q^j] t_n = [q^j] L` exactly for all
    /// `n0 ≤ n ≤ N`.
    pub stable_from: Option<usize>,
    /// `|N Φ_N [q^j] t_N - [q^j] L|`.
    pub final_gap: f64,
}

pub const DELTA_GRID: [f64; 4] = [0.1, 0.03, 0.01, 0.003];

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub context: AsymptoticContext,
    pub order: usize,
    /// `(n, a_n)` for `1 ≤ n ≤ N`.
    pub sequence: Vec<(usize, f64)>,
    /// Minimum of `a_n` over the last quarter of the range.
    pub liminf_estimate: f64,
    pub deviation: Vec<DeviationDensity>,
    /// Present when `φ` is rational with `ζ = 1` and `ρ = 1`.
    pub coeffwise: Option<Vec<CoeffRow>>,
    pub coeffwise_summary: Option<Vec<CoeffSummary>>,
}

impl ConvergenceReport {
    pub fn a(&self, n: usize) -> f64 {
        self.sequence[n - 1].1
    }

    pub fn density_at(&self, delta: f64) -> Option<f64> {
        self.deviation.iter().find(|d| d.delta == delta).map(|d| d.density)
    }

    /// CSV with columns `n,a_n,L,abs_dev`.
    pub fn to_csv(&self) -> String {
        let l = self.context.l_value;
        let mut out = String::from("n,a_n,L,abs_dev\n");
        for &(n, a) in &self.sequence {
            out += &format!("{n},{},{},{}\n", format_f64(a), format_f64(l), format_f64((a - l).abs()));
        }
        out
    }

    /// CSV with columns `j,n,scaled_coeff,limit`; empty body when the table
    /// was not computed.
    pub fn coeffwise_csv(&self) -> String {
        let mut out = String::from("j,n,scaled_coeff,limit\n");
        for row in self.coeffwise.iter().flatten() {
            out += &format!("{},{},{},{}\n", row.j, row.n, row.scaled_coeff.to_text(), row.limit.to_text());
        }
        out
    }
}

/// Options for [`convergence_report`].
#[derive(Clone, Copy, Debug)]
pub struct ReportOptions {
    /// Largest `q`-degree in the coefficientwise table.
    pub j_max: usize,
    pub deltas: &'static [f64],
    pub tol: Tolerances,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { j_max: 4, deltas: &DELTA_GRID, tol: Tolerances::default() }
    }
}

/// `a_n = n Φ_n t̃_n(q)` for `1 ≤ n ≤ N` with all three diagnostics.
///
/// For an alternating spec the solver runs on the signed datum itself and
/// the sequence uses `(-1)^n t_n`, which is expected to reproduce the
/// inner spec's limits.
pub fn convergence_report(spec: &PhiSpec, q: f64, order: usize, opts: ReportOptions) -> Result<ConvergenceReport> {
    if order < 4 {
        return Err(Error::InvalidArgument("need N >= 4".into()));
    }
    let ctx = AsymptoticContext::with_tolerances(spec, q, opts.tol)?;
    if spec.inner().is_none() && !spec.is_nonnegative() {
        return Err(Error::InvalidArgument("phi must have nonnegative coefficients".into()));
    }
    let phi = rescaled_coeffs(spec, ctx.zeta, order + 1);
    let res = right_inverse_from_float_coeffs(&phi, order + 1, q)?;
    let alternating = spec.inner().is_some();
    let mut sequence = Vec::with_capacity(order);
    for n in 1..=order {
        let t = if alternating && n % 2 == 1 { -res.t[n] } else { res.t[n] };
        sequence.push((n, n as f64 * big_phi(&ctx, n)? * t));
    }
    let l = ctx.l_value;
    let start = order - order / 4;
    let liminf_estimate = sequence[start - 1..].iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let window = (order.div_ceil(2), order);
    let in_window = &sequence[window.0 - 1..];
    let deviation = opts
        .deltas
        .iter()
        .map(|&delta| {
            let bad = in_window.iter().filter(|p| (p.1 - l).abs() >= delta).count();
            DeviationDensity { delta, window, density: bad as f64 / in_window.len() as f64 }
        })
        .collect();
    let (coeffwise, coeffwise_summary) = match coefficientwise_table(spec, order, opts.j_max) {
        Ok((rows, summary)) => (Some(rows), Some(summary)),
        Err(Error::NotExact(_)) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(ConvergenceReport { context: ctx, order, sequence, liminf_estimate, deviation, coeffwise, coeffwise_summary })
}

/// `n Φ_n [q^j] t_n` against `[q^j] L` for `j ≤ j_max`, `1 ≤ n ≤ N`, in
/// exact arithmetic. Needs rational `φ` with `ζ = 1` and `ρ = 1`, where
/// `n Φ_n = n (1 - φ(1 - 1/n))` is rational.
pub fn coefficientwise_table(spec: &PhiSpec, order: usize, j_max: usize) -> Result<(Vec<CoeffRow>, Vec<CoeffSummary>)> {
    if spec.inner().is_some() || spec.zeta_exact() != Some(Rational::one()) || spec.rho() != 1.0 {
        return Err(Error::NotExact(format!("coefficientwise table needs rational phi with zeta = 1 and rho = 1, got {spec}")));
    }
    let limits = l_as_q_series(spec, j_max)?;
    let capped = right_inverse_capped(spec, order + 1, j_max as i64)?;
    let phi = spec.exact_coeffs(order.max(1))?;
    let n_phi: Vec<Rational> = (1..=order)
        .map(|n| {
            let x = Rational::new((n as i64 - 1).into(), (n as i64).into());
            let val = phi.iter().skip(1).rev().fold(Rational::zero(), |acc, c| (acc + c) * &x);
            Rational::from_integer((n as i64).into()) * (Rational::one() - val)
        })
        .collect();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (j, limit) in limits.iter().enumerate() {
        let values: Vec<Rational> = (1..=order).map(|n| &n_phi[n - 1] * capped.t[n].coeff(j as i64)).collect();
        let stable_from = match values.iter().rposition(|v| v != limit) {
            None => Some(1),
            Some(k) if k + 1 < values.len() => Some(k + 2),
            Some(_) => None,
        };
        let final_gap = rational_to_f64(&(values[order - 1].clone() - limit).abs());
        for (i, v) in values.into_iter().enumerate() {
            rows.push(CoeffRow { j, n: i + 1, scaled_coeff: Scalar::Exact(v), limit: Scalar::Exact(limit.clone()) });
        }
        summary.push(CoeffSummary { j, limit: Scalar::Exact(limit.clone()), stable_from, final_gap });
    }
    Ok((rows, summary))
}

/// The constant of `q^{C(n,2)} g_n ζ^n → 1/(φ'(ζ) (q;q)_∞ Π θ(ζ q^j))` for a
/// polynomial `φ`, with `θ(ζ q^j) = (1 - φ(ζ q^j))/(1 - q^j)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolynomialLimit {
    pub zeta: f64,
    pub phi_prime_zeta: f64,
    pub value: f64,
    /// `|(q;q)_∞ Π θ(ζ q^j) - Π (1 - φ(ζ q^j))|`.
    pub consistency_gap: f64,
}

pub fn polynomial_case_limit(spec: &PhiSpec, q: f64) -> Result<PolynomialLimit> {
    check_q(q)?;
    if !matches!(spec.kind(), PhiKind::Explicit(_) | PhiKind::Catalan) {
        return Err(Error::InvalidArgument(format!("{spec} is not a polynomial")));
    }
    let zeta = find_zeta(spec, 1e-15)?;
    let dphi = phi_prime(spec, zeta)?;
    let terms = product_terms(q, PRODUCT_TAIL);
    let (mut log_poch, mut log_theta, mut log_direct) = (0.0, 0.0, 0.0);
    for j in 1..=terms {
        let qj = q.powi(j as i32);
        let one_minus_phi = 1.0 - phi_eval(spec, zeta * qj)?;
        log_poch += (-qj).ln_1p();
        log_theta += one_minus_phi.ln() - (-qj).ln_1p();
        log_direct += one_minus_phi.ln();
    }
    let combined = (log_poch + log_theta).exp();
    Ok(PolynomialLimit {
        zeta,
        phi_prime_zeta: dphi,
        value: 1.0 / (dphi * combined),
        consistency_gap: (combined - log_direct.exp()).abs(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RenewalRow {
    pub q: f64,
    pub n: usize,
    /// `t_n(q) - τ_n`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RenewalReport {
    pub order: usize,
    /// `[q^0] t_n = τ_n` exactly for every `n ≤ N`.
    pub exact_holds: bool,
    pub first_mismatch: Option<usize>,
    pub table: Vec<RenewalRow>,
    /// `|t_n(q) - τ_n|` is nonincreasing as `q` decreases along the grid,
    /// for every `n`.
    pub monotone: bool,
}

/// Compares `t_n` with the renewal sequence `τ = 1/(1 - φ)`: exactly at
/// `q = 0` and numerically along `q_grid`.
pub fn renewal_limit_check(spec: &PhiSpec, order: usize, q_grid: &[f64]) -> Result<RenewalReport> {
    let ring = LaurentRing;
    let phi_exact = spec.exact_coeffs(order)?;
    let tau: Vec<Rational> = TruncatedSeries::from_rationals(ring, &phi_exact, order)
        .reciprocal_one_minus()?
        .coeffs()
        .iter()
        .map(|c| c.coeff(0))
        .collect();
    let capped = right_inverse_capped(spec, order + 1, 0)?;
    let first_mismatch = (0..=order).find(|&n| capped.t[n].coeff(0) != tau[n]);
    let mut grid = q_grid.to_vec();
    grid.sort_by(|a, b| b.total_cmp(a));
    let mut table = Vec::new();
    let mut prev: Option<Vec<f64>> = None;
    let mut monotone = true;
    for &q in &grid {
        check_q(q)?;
        let res = right_inverse_from_float_coeffs(&spec.float_coeffs(order + 1), order + 1, q)?;
        let gaps: Vec<f64> = (0..=order).map(|n| res.t[n] - rational_to_f64(&tau[n])).collect();
        if let Some(p) = &prev {
            let slack = |x: f64| 1e-12 * x.abs().max(1.0);
            monotone &= gaps.iter().zip(p).all(|(g, pg)| g.abs() <= pg.abs() + slack(*pg));
        }
        table.extend(gaps.iter().enumerate().map(|(n, &gap)| RenewalRow { q, n, gap }));
        prev = Some(gaps);
    }
    Ok(RenewalReport { order, exact_holds: first_mismatch.is_none(), first_mismatch, table, monotone })
}

/// Exact comparison of an alternating spec against its inner spec.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlternatingReport {
    pub order: usize,
    /// `n` where `g^{alt}_n ≠ (-1)^{n+1} g_n`.
    pub sign_mismatches: Vec<usize>,
    /// `n` where `|g^{alt}_n| ≠ |g_n|` coefficientwise.
    pub magnitude_mismatches: Vec<usize>,
    /// `n` where `[q^0] t^{alt}_n ≠ (-1)^n τ_n`.
    pub renewal_mismatches: Vec<usize>,
}

impl AlternatingReport {
    pub fn holds(&self) -> bool {
        self.sign_mismatches.is_empty() && self.magnitude_mismatches.is_empty() && self.renewal_mismatches.is_empty()
    }
}

/// Runs the exact solver on `φ(-z)` and on `φ(z)` and compares.
pub fn alternating_compare(inner: &PhiSpec, order: usize) -> Result<AlternatingReport> {
    use crate::inversion::right_inverse_exact;
    let alt = PhiSpec::alternating(inner.clone())?;
    let a = right_inverse_exact(&alt, order)?;
    let b = right_inverse_exact(inner, order)?;
    let tau: Vec<Rational> = TruncatedSeries::from_rationals(LaurentRing, &inner.exact_coeffs(order)?, order)
        .reciprocal_one_minus()?
        .coeffs()
        .iter()
        .map(|c| c.coeff(0))
        .collect();
    let mut report = AlternatingReport {
        order,
        sign_mismatches: Vec::new(),
        magnitude_mismatches: Vec::new(),
        renewal_mismatches: Vec::new(),
    };
    for n in 0..=order {
        let (ga, gb) = (a.g.coeff(n), b.g.coeff(n));
        let twisted = if n % 2 == 0 { -gb } else { gb.clone() };
        if *ga != twisted {
            report.sign_mismatches.push(n);
        }
        let same_mag = ga.len() == gb.len()
            && ga.terms().zip(gb.terms()).all(|((ea, ca), (eb, cb))| ea == eb && ca.abs() == cb.abs());
        if !same_mag {
            report.magnitude_mismatches.push(n);
        }
    }
    for (n, t) in a.t.iter().enumerate() {
        let expected = if n % 2 == 0 { tau[n].clone() } else { -tau[n].clone() };
        if t.coeff(0) != expected {
            report.renewal_mismatches.push(n);
        }
    }
    Ok(report)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn half_half() -> PhiSpec {
        PhiSpec::explicit(vec![rat(1, 2), rat(1, 2)]).unwrap()
    }

    #[test]
    fn phi_eval_examples() {
        assert_eq!(phi_eval(&PhiSpec::catalan(), 0.7).unwrap(), 0.7);
        let e0 = PhiSpec::exponential(0.0).unwrap();
        assert!((phi_eval(&e0, 2f64.ln()).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(phi_eval(&half_half(), 1.0).unwrap(), 1.0);
        let fc = PhiSpec::fractional(0.5).unwrap();
        assert!(matches!(phi_eval(&fc, 1.5), Err(Error::DomainViolation(_))));
        assert_eq!(phi_eval(&fc, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn phi_prime_examples() {
        assert_eq!(phi_prime(&PhiSpec::catalan(), 1.0).unwrap(), 1.0);
        assert_eq!(phi_prime(&half_half(), 1.0).unwrap(), 1.5);
        let e = PhiSpec::exponential(1.0).unwrap();
        let z = e.zeta().unwrap();
        assert!((phi_prime(&e, z).unwrap() - (1.0 + 1f64.exp())).abs() < 1e-13);
    }

    #[test]
    fn zeta_examples() {
        let z = find_zeta(&PhiSpec::exponential(1.0).unwrap(), 1e-15).unwrap();
        assert!((z - 0.313_261_687_518_222_834).abs() < 1e-15);
        assert_eq!(find_zeta(&half_half(), 1e-15).unwrap(), 1.0);
        let z = find_zeta(&PhiSpec::explicit(vec![rat(1, 2)]).unwrap(), 1e-14).unwrap();
        assert!((z - 2.0).abs() < 1e-13);
        let z = find_zeta(&PhiSpec::explicit(vec![rat(1, 3), rat(1, 3)]).unwrap(), 1e-14).unwrap();
        // root of z² + z - 3
        assert!((z - (13f64.sqrt() - 1.0) / 2.0).abs() < 1e-13);
        assert_eq!(find_zeta(&PhiSpec::explicit(vec![]).unwrap(), 1e-14), Err(Error::NoRoot));
    }

    #[test]
    fn gamma_examples() {
        assert!((gamma_fn(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma_fn(2.0) - 1.0).abs() < 1e-14);
        assert!((gamma_fn(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((gamma_fn(0.25) - 3.625_609_908_221_908_3).abs() < 1e-12);
        assert!((gamma_fn(1.5) - 0.886_226_925_452_758).abs() < 1e-14);
    }

    #[test]
    fn big_phi_examples() {
        let ctx = AsymptoticContext::new(&PhiSpec::catalan(), 0.5).unwrap();
        assert!((big_phi(&ctx, 10).unwrap() - 0.1).abs() < 1e-15);
        let ctx = AsymptoticContext::new(&half_half(), 0.5).unwrap();
        assert!((big_phi(&ctx, 10).unwrap() - 0.145).abs() < 1e-15);
        assert!(big_phi(&ctx, 100_000).unwrap() < 1e-4);
    }

    #[test]
    fn limit_constant_examples() {
        let ctx = AsymptoticContext::new(&PhiSpec::catalan(), 0.5).unwrap();
        assert!((ctx.l_value - 3.462_746_619_455_063_6).abs() < 1e-12);
        let ctx = AsymptoticContext::new(&half_half(), 0.5).unwrap();
        assert!((ctx.l_value - 1.0 / 0.459_025_024_746_893_143_637_676).abs() < 1e-12);
        let ctx = AsymptoticContext::new(&PhiSpec::catalan(), 1e-6).unwrap();
        assert!((ctx.l_value - 1.0).abs() < 2e-6);
        assert!(AsymptoticContext::new(&PhiSpec::catalan(), 1.0).is_err());
    }

    #[test]
    fn l_series_examples() {
        let p: Vec<Rational> = l_as_q_series(&PhiSpec::catalan(), 6).unwrap();
        let expect: Vec<Rational> = [1, 1, 2, 3, 5, 7, 11].iter().map(|&k| Rational::from_integer(k.into())).collect();
        assert_eq!(p, expect);
        let s = l_as_q_series(&half_half(), 3).unwrap();
        assert_eq!(s[0], Rational::one());
        assert_eq!(s[1], rat(1, 2));
        let f = l_as_q_series_f64(&half_half(), 3).unwrap();
        assert!((f[1] - 0.5).abs() < 1e-15);
        assert!(l_as_q_series(&PhiSpec::exponential(1.0).unwrap(), 3).is_err());
        assert!((l_as_q_series_f64(&PhiSpec::exponential(1.0).unwrap(), 3).unwrap()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn catalan_report_converges() {
        let rep = convergence_report(&PhiSpec::catalan(), 0.5, 60, ReportOptions::default()).unwrap();
        assert!((rep.a(60) - rep.context.l_value).abs() < 1e-3);
        let window: Vec<_> = rep.sequence[29..].iter().collect();
        assert!(window.iter().all(|p| (p.1 - rep.context.l_value).abs() < 0.01));
        let summary = rep.coeffwise_summary.as_ref().unwrap();
        assert_eq!(summary[2].limit, Scalar::Exact(rat(2, 1)));
        assert_eq!(summary[2].stable_from, Some(3));
        assert!(rep.to_csv().starts_with("n,a_n,L,abs_dev\n1,"));
        let d: Vec<f64> = rep.deviation.iter().map(|d| d.density).collect();
        assert!(d.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn polynomial_limit_examples() {
        let c = polynomial_case_limit(&PhiSpec::catalan(), 0.5).unwrap();
        assert!((c.value - 3.462_746_619_455_063_6).abs() < 1e-12);
        assert!(c.consistency_gap < 1e-10);
        let h = polynomial_case_limit(&half_half(), 0.5).unwrap();
        assert!((h.value - 1.0 / (1.5 * 0.459_025_024_746_893_143_6)).abs() < 1e-12);
        assert!(polynomial_case_limit(&PhiSpec::exponential(1.0).unwrap(), 0.5).is_err());
    }

    #[test]
    fn renewal_examples() {
        let r = renewal_limit_check(&half_half(), 12, &[0.3, 0.01, 0.1]).unwrap();
        assert!(r.exact_holds && r.monotone);
        let gap = r.table.iter().find(|row| row.q == 0.01 && row.n == 2).unwrap().gap;
        assert!(gap > 0.0 && gap < 0.02);
    }

    #[test]
    fn alternating_examples() {
        let r = alternating_compare(&PhiSpec::catalan(), 10).unwrap();
        assert!(r.holds(), "{r:?}");
        let r = alternating_compare(&half_half(), 10).unwrap();
        assert!(r.holds(), "{r:?}");
        let alt = PhiSpec::alternating(PhiSpec::catalan()).unwrap();
        let rep = convergence_report(&alt, 0.5, 40, ReportOptions::default()).unwrap();
        let plain = convergence_report(&PhiSpec::catalan(), 0.5, 40, ReportOptions::default()).unwrap();
        for n in 1..=40 {
            assert!((rep.a(n) - plain.a(n)).abs() < 1e-12 * plain.a(n).abs().max(1.0));
        }
    }
}
