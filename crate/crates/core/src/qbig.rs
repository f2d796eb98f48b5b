//! The regime `q > 1`, where `g` converges: its radius `η` solves
//! `A(η) = 1` with `A(z) = Σ_k φ_k g(z/q) ... g(z/q^k)`, and
//! `g_n ~ C / η^n` with `1/C = A'(η)`.
//!
//! `g` is represented as `g(z) = z h(z/q) / h(z)` with `h` entire, computed
//! from `Σ_k f_k q^{-C(k,2)} z^k h(z/q^k) = z h(z)`. Evaluating `g` through
//! `h` stays accurate up to `z ≈ qη`, beyond the radius of the power series
//! of `g` itself.

use serde::Serialize;

use crate::arith::format_f64;
use crate::error::{Error, Result};
use crate::phi::PhiSpec;
use crate::ring::FloatAt;
use crate::series::TruncatedSeries;

fn check_q(q: f64) -> Result<()> {
    if q > 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidQ(q))
    }
}

/// `f_0..=f_max` with `f_1 = 1`, `f_k = -φ_{k-1}`.
fn f_coeffs(spec: &PhiSpec, max_k: usize) -> Vec<f64> {
    let phi = spec.float_coeffs(max_k);
    (0..=max_k)
        .map(|k| match k {
            0 => 0.0,
            1 => 1.0,
            _ => -phi[k - 1],
        })
        .collect()
}

/// `h_0..h_N` with `h_0 = 1` and
/// `h_n (1 - q^{-n}) = Σ_{2≤k≤n+1} f_k h_{n+1-k} q^{-k(2n+1-k)/2}`.
pub fn h_series_qbig(spec: &PhiSpec, q: f64, order: usize) -> Result<Vec<f64>> {
    check_q(q)?;
    let f = f_coeffs(spec, order + 1);
    let lq = q.ln();
    let mut h = vec![0.0; order + 1];
    h[0] = 1.0;
    for n in 1..=order {
        let mut acc = 0.0;
        for k in 2..=n + 1 {
            if f[k] != 0.0 {
                let e = (k * (2 * n + 1 - k)) as f64 / 2.0;
                acc += f[k] * h[n + 1 - k] * (-e * lq).exp();
            }
        }
        h[n] = acc / (1.0 - (-(n as f64) * lq).exp());
    }
    Ok(h)
}

/// Coefficients of `z h(z/q) / h(z)` to order `N`.
pub fn g_from_h(h: &[f64], q: f64, order: usize) -> Result<Vec<f64>> {
    check_q(q)?;
    if h.first().copied().unwrap_or(0.0) == 0.0 {
        return Err(Error::DivisionByZero("h_0 = 0".into()));
    }
    let ring = FloatAt::new(q)?;
    let pad = |v: Vec<f64>| {
        let mut v = v;
        v.resize(order + 1, 0.0);
        v.truncate(order + 1);
        v
    };
    let hs = TruncatedSeries::new(ring, pad(h.to_vec()));
    // z h(z/q): shift by one after dilating.
    let dil = hs.q_dilate(1);
    let mut num = vec![0.0; order + 1];
    num[1..].copy_from_slice(&dil.coeffs()[..order]);
    let g = TruncatedSeries::new(ring, num).divide(&hs)?.into_coeffs();
    if g[0] != 0.0 || (order >= 1 && (g[1] - 1.0).abs() > 1e-12) {
        return Err(Error::Assertion(format!("g_0 = {}, g_1 = {}", g[0], g.get(1).copied().unwrap_or(0.0))));
    }
    Ok(g)
}

/// `h` together with the evaluation helpers built on it.
#[derive(Clone, Debug)]
pub struct QBigFunction {
    pub q: f64,
    pub h: Vec<f64>,
    phi: Vec<f64>,
}

impl QBigFunction {
    pub fn new(spec: &PhiSpec, q: f64, order: usize) -> Result<Self> {
        let h = h_series_qbig(spec, q, order)?;
        Ok(Self { q, h, phi: spec.float_coeffs(order) })
    }

    fn h_and_prime(&self, x: f64) -> (f64, f64) {
        let (mut v, mut d) = (0.0, 0.0);
        for c in self.h.iter().rev() {
            d = d * x + v;
            v = v * x + c;
        }
        (v, d)
    }

    /// `g(x) = x h(x/q)/h(x)`.
    pub fn g(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        x * self.h_and_prime(x / self.q).0 / self.h_and_prime(x).0
    }

    /// `g'(x)/g(x) = 1/x + h'(x/q)/(q h(x/q)) - h'(x)/h(x)`.
    pub fn log_derivative(&self, x: f64) -> f64 {
        let (a, da) = self.h_and_prime(x / self.q);
        let (b, db) = self.h_and_prime(x);
        1.0 / x + da / (self.q * a) - db / b
    }

    /// `(A(z), A'(z))`, summing `k` until the term is below `1e-15` of the
    /// running sum.
    pub fn a_and_prime(&self, z: f64) -> Result<(f64, f64)> {
        if z == 0.0 {
            return Ok((0.0, 0.0));
        }
        let (mut a, mut da) = (0.0, 0.0);
        let (mut prod, mut logsum) = (1.0, 0.0);
        let mut prev = f64::INFINITY;
        let mut k = 1usize;
        loop {
            let x = z / self.q.powi(k as i32);
            prod *= self.g(x);
            logsum += self.log_derivative(x) / self.q.powi(k as i32);
            let phi_k = self.phi.get(k).copied().unwrap_or(0.0);
            let term = phi_k * prod;
            a += term;
            da += term * logsum;
            // For a polynomial φ there is nothing left once k passes the
            // degree; otherwise stop on relative size.
            if k + 1 >= self.phi.len() {
                break;
            }
            let bound = prod.abs() * self.phi[k + 1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if bound <= 1e-15 * a.abs() || bound == 0.0 {
                break;
            }
            if k > 8 && prod.abs() > prev {
                return Err(Error::NonConvergent(format!("A({z}) terms stopped decreasing at k = {k}")));
            }
            prev = prod.abs();
            k += 1;
        }
        if !a.is_finite() || !da.is_finite() {
            return Err(Error::NonConvergent(format!("A({z}) is not finite")));
        }
        Ok((a, da))
    }

    pub fn a_eval(&self, z: f64) -> Result<f64> {
        Ok(self.a_and_prime(z)?.0)
    }
}

/// Where `η` came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaSearch {
    pub eta: f64,
    pub a_at_eta: f64,
    /// Radius guess from the ratio of the last two coefficients of `g`.
    pub guess: f64,
    pub scan_steps: usize,
    /// False when `A` was not known to be increasing (signed `φ`), so a
    /// smaller root cannot be excluded.
    pub unique: bool,
}

/// Smallest positive root of `A(η) = 1`, by a geometric scan from a
/// ratio-test guess followed by bisection to `|A(η) - 1| ≤ tol`. A signed
/// `φ` gets a finer scan and is flagged as not certified unique.
pub fn find_eta(spec: &PhiSpec, func: &QBigFunction, g: &[f64], tol: f64) -> Result<EtaSearch> {
    let monotone = spec.is_nonnegative();
    let guess = g
        .iter()
        .rev()
        .zip(g.iter().rev().skip(1))
        .find(|(a, b)| **a != 0.0 && **b != 0.0)
        .map(|(a, b)| (b / a).abs())
        .unwrap_or(1.0);
    let step = if monotone { 1.1 } else { 1.01 };
    let max_steps = if monotone { 500 } else { 5000 };
    let start = if monotone { 0.5 * guess } else { 1e-3 * guess };
    let mut lo = 0.0;
    let mut x = start;
    let mut steps = 0;
    if monotone {
        // The guess may already overshoot.
        while func.a_eval(x)? >= 1.0 {
            x /= 2.0;
            steps += 1;
            if steps > 200 {
                return Err(Error::NoBracket("A(z) >= 1 near z = 0".into()));
            }
        }
    }
    let hi = loop {
        let v = func.a_eval(x)?;
        if v >= 1.0 {
            break x;
        }
        lo = x;
        x *= step;
        steps += 1;
        if steps > max_steps || !x.is_finite() {
            return Err(Error::NoBracket(format!("A stays below 1 up to z = {x:e}")));
        }
    };
    let (mut lo, mut hi) = (lo, hi);
    let mut mid = hi;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let v = func.a_eval(mid)?;
        if (v - 1.0).abs() <= tol || hi - lo <= f64::EPSILON * hi {
            break;
        }
        if v < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(EtaSearch { eta: mid, a_at_eta: func.a_eval(mid)?, guess, scan_steps: steps, unique: monotone })
}

/// `C = 1/A'(η)`.
pub fn constant_c(func: &QBigFunction, eta: f64) -> Result<f64> {
    Ok(1.0 / func.a_and_prime(eta)?.1)
}

/// Largest relative coefficient defect of `Σ_k f_k g(z) g(z/q) ... g(z/q^{k-1}) = z`
/// over orders `1..=N`; each order is scaled by the sum of absolute values
/// of its contributions.
pub fn equation_residual(spec: &PhiSpec, g: &[f64], q: f64) -> Result<f64> {
    let order = g.len() - 1;
    let ring = FloatAt::new(q)?;
    let f = f_coeffs(spec, order);
    let gs = TruncatedSeries::new(ring, g.to_vec());
    let mut lhs = vec![0.0; order + 1];
    let mut scale = vec![0.0f64; order + 1];
    let mut prod = gs.clone();
    for (k, fk) in f.iter().enumerate().skip(1) {
        if k > 1 {
            prod = gs.mul(&prod.q_dilate(1));
        }
        if prod.is_zero() {
            break;
        }
        for m in 0..=order {
            let c = fk * prod.coeff(m);
            lhs[m] += c;
            scale[m] += c.abs();
        }
    }
    let mut worst = 0.0f64;
    for m in 1..=order {
        let target = if m == 1 { 1.0 } else { 0.0 };
        let defect = (lhs[m] - target).abs();
        if defect > 0.0 {
            worst = worst.max(defect / scale[m]);
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct QBigResult {
    pub spec: String,
    pub q: f64,
    pub order: usize,
    pub h: Vec<f64>,
    pub g: Vec<f64>,
    pub eta: EtaSearch,
    pub c_formula: f64,
    /// `g_N η^N`.
    pub c_empirical: f64,
    /// `(n, g_n, g_n η^n)`.
    pub ratio_trace: Vec<(usize, f64, f64)>,
    /// Equation residual of `g` (relative, orders `1..=N`).
    pub residual: f64,
}

impl QBigResult {
    /// `|g_{n+1}/g_n - 1/η|`.
    pub fn ratio_gap(&self, n: usize) -> f64 {
        (self.g[n + 1] / self.g[n] - 1.0 / self.eta.eta).abs()
    }

    pub fn relative_c_gap(&self) -> f64 {
        ((self.c_formula - self.c_empirical) / self.c_formula).abs()
    }

    /// CSV with columns `n,g_n,g_n_eta_n`.
    pub fn ratio_csv(&self) -> String {
        let mut out = String::from("n,g_n,g_n_eta_n\n");
        for (n, g, s) in &self.ratio_trace {
            out += &format!("{n},{},{}\n", format_f64(*g), format_f64(*s));
        }
        out
    }
}

/// Full `q > 1` analysis to order `N`: `h`, `g`, `η`, `C` both ways.
pub fn analyze(spec: &PhiSpec, q: f64, order: usize, tol: f64) -> Result<QBigResult> {
    if order < 4 {
        return Err(Error::InvalidArgument("need N >= 4".into()));
    }
    let func = QBigFunction::new(spec, q, order + 1)?;
    let g = g_from_h(&func.h, q, order + 1)?;
    let eta = find_eta(spec, &func, &g, tol)?;
    let c_formula = constant_c(&func, eta.eta)?;
    let ratio_trace: Vec<(usize, f64, f64)> = (1..=order + 1)
        .map(|n| (n, g[n], g[n] * eta.eta.powi(n as i32)))
        .collect();
    let c_empirical = ratio_trace[order - 1].2;
    let residual = equation_residual(spec, &g[..=order], q)?;
    Ok(QBigResult {
        spec: spec.to_string(),
        q,
        order,
        h: func.h[..=order].to_vec(),
        g,
        eta,
        c_formula,
        c_empirical,
        ratio_trace,
        residual,
    })
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::inversion::{binom2, right_inverse_numeric};

    /// Independent oracle: the equations for `h_1..h_N` as a dense linear
    /// system solved by Gaussian elimination.
    fn h_linear_oracle(f: &[f64], q: f64, order: usize) -> Vec<f64> {
        let n_unk = order;
        let mut m = vec![vec![0.0; n_unk + 1]; n_unk];
        for n in 1..=order {
            let row = &mut m[n - 1];
            row[n - 1] -= 1.0;
            for k in 1..=n + 1 {
                let fk = f.get(k).copied().unwrap_or(0.0);
                let c = fk * q.powf(-(binom2(k) as f64)) * q.powf(-((k * (n + 1 - k)) as f64));
                let idx = n + 1 - k;
                if idx == 0 {
                    row[n_unk] -= c;
                } else {
                    row[idx - 1] += c;
                }
            }
        }
        for col in 0..n_unk {
            let piv = (col..n_unk).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
            m.swap(col, piv);
            for r in 0..n_unk {
                if r != col {
                    let factor = m[r][col] / m[col][col];
                    for c in col..=n_unk {
                        m[r][c] -= factor * m[col][c];
                    }
                }
            }
        }
        let mut h = vec![1.0];
        h.extend((0..n_unk).map(|i| m[i][n_unk] / m[i][i]));
        h
    }

    #[test]
    fn h_matches_linear_system() {
        for spec in [PhiSpec::catalan(), PhiSpec::explicit(vec![rat(1, 2), rat(1, 2)]).unwrap()] {
            let h = h_series_qbig(&spec, 2.0, 6).unwrap();
            let oracle = h_linear_oracle(&f_coeffs(&spec, 7), 2.0, 6);
            for (a, b) in h.iter().zip(&oracle) {
                assert!((a - b).abs() <= 1e-14 * b.abs().max(1e-300), "{a} vs {b}");
            }
        }
        let h = h_series_qbig(&PhiSpec::explicit(vec![]).unwrap(), 2.0, 5).unwrap();
        assert_eq!(h, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(h_series_qbig(&PhiSpec::catalan(), 1.0, 5).is_err());
        assert!(h_series_qbig(&PhiSpec::catalan(), 0.5, 5).is_err());
    }

    #[test]
    fn g_from_h_matches_solver() {
        let spec = PhiSpec::catalan();
        let g = g_from_h(&h_series_qbig(&spec, 2.0, 12).unwrap(), 2.0, 12).unwrap();
        let direct = right_inverse_numeric(&spec, 12, 2.0).unwrap();
        for n in 0..=12 {
            assert!((g[n] - direct.g.coeff(n)).abs() <= 1e-12 * g[n].abs().max(1.0));
        }
        // g - g(z) g(z/2) = z
        assert!(equation_residual(&spec, &g[..=10], 2.0).unwrap() < 1e-12);
        let id = g_from_h(&[1.0], 2.0, 4).unwrap();
        assert_eq!(id, vec![0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn catalan_q2_analysis() {
        let r = analyze(&PhiSpec::catalan(), 2.0, 100, 1e-13).unwrap();
        assert!((r.eta.a_at_eta - 1.0).abs() < 1e-10);
        assert!(r.relative_c_gap() < 1e-4, "{} vs {}", r.c_formula, r.c_empirical);
        assert!(r.ratio_gap(100) < 1e-6);
        assert!(r.c_formula > 0.0);
        assert!(r.residual < 1e-10);
        let func = QBigFunction::new(&PhiSpec::catalan(), 2.0, 40).unwrap();
        assert_eq!(func.a_eval(0.0).unwrap(), 0.0);
        let xs: Vec<f64> = (1..20).map(|i| i as f64 * r.eta.eta / 10.0).collect();
        let a: Vec<f64> = xs.iter().map(|&x| func.a_eval(x).unwrap()).collect();
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn eta_shrinks_with_extra_mass() {
        let base = analyze(&PhiSpec::catalan(), 2.0, 60, 1e-13).unwrap().eta.eta;
        let more = analyze(&PhiSpec::explicit(vec![rat(1, 1), rat(1, 2)]).unwrap(), 2.0, 60, 1e-13)
            .unwrap()
            .eta
            .eta;
        assert!(more < base);
    }

    #[test]
    fn zero_phi_has_no_bracket() {
        let r = analyze(&PhiSpec::explicit(vec![]).unwrap(), 2.0, 20, 1e-12);
        assert!(matches!(r, Err(Error::NoBracket(_))));
    }

    #[test]
    fn ratio_csv_header() {
        let r = analyze(&PhiSpec::catalan(), 3.0, 20, 1e-13).unwrap();
        assert!(r.ratio_csv().starts_with("n,g_n,g_n_eta_n\n1,1.0000000000000000e0,"));
    }
}
