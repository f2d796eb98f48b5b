//! One function per subcommand. Each grid cell produces its JSON value,
//! its CSV rows and a one-line summary; cells run on a worker pool and are
//! put back in input order, so output never depends on scheduling.

use num_traits::Zero;
use qinvert_core::arith::{format_f64, format_rational, parse_rational, rational_to_f64};
use qinvert_core::asymptotics::{polynomial_case_limit, convergence_report, ReportOptions, Scalar, Tolerances};
use qinvert_core::formal::{g_kappa, g_kappa_f64, q_extremal_zeros, verify_formal_solution, PolyF};
use qinvert_core::inversion::{right_inverse_exact, right_inverse_numeric};
use qinvert_core::qbig::analyze;
use qinvert_core::ring::float_to_json;
use qinvert_core::tuples::{l_statistic, verify_min_lemmas, Compositions};
use qinvert_core::{PhiSpec, Rational};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{CommandKind, ModeArg, RunConfig};
use crate::error::CliError;

/// Result of one grid cell.
pub struct Cell {
    pub json: Value,
    pub csv: String,
    pub summary: String,
}

/// All cells of a run plus the CSV header shared by them.
pub struct Report {
    pub header: &'static str,
    pub cells: Vec<Cell>,
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command {
        CommandKind::Coeffs => coeffs(cfg),
        CommandKind::Asymptotics => asymptotics(cfg),
        CommandKind::Qbig => qbig(cfg),
        CommandKind::Formal => formal(cfg),
        CommandKind::Tuples => tuples(cfg),
    }
}

fn phi(cfg: &RunConfig) -> Result<PhiSpec, CliError> {
    let s = cfg.phi.as_deref().ok_or_else(|| CliError::Config("--phi is required".into()))?;
    Ok(s.parse::<PhiSpec>()?)
}

fn need_q(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.q_grid.is_empty() {
        Err(CliError::Config("--q is required".into()))
    } else {
        Ok(())
    }
}

/// Runs `f` on every item with `cfg.jobs` workers; results keep input
/// order and the first failing item (in input order) decides the error.
fn parallel<T: Sync, F>(cfg: &RunConfig, items: &[T], f: F) -> Result<Vec<Cell>, CliError>
where
    F: Fn(&T) -> Result<Cell, CliError> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Internal(format!("worker pool: {e}")))?;
    let out: Vec<Result<Cell, CliError>> = pool.install(|| items.par_iter().map(&f).collect());
    out.into_iter().collect()
}

fn coeffs(cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = phi(cfg)?;
    let mode = cfg
        .mode
        .unwrap_or(if cfg.q_grid.is_empty() { ModeArg::Exact } else { ModeArg::Numeric });
    // -N is the last t index, and t_n needs g_{n+1}.
    let order = cfg.order + 1;
    match mode {
        ModeArg::Exact => {
            if !cfg.q_grid.is_empty() {
                return Err(CliError::Config("exact mode computes Laurent polynomials in q; drop --q".into()));
            }
            let r = right_inverse_exact(&spec, order)?;
            if let Some(n) = (1..r.eps.len()).find(|&n| !r.eps[n].coeff(0).is_zero()) {
                return Err(CliError::Internal(format!("renewal defect eps_{n} has a nonzero constant term")));
            }
            let mut csv = String::new();
            for (n, g) in r.g.coeffs().iter().enumerate() {
                let (t, e) = match (r.t.get(n), r.eps.get(n)) {
                    (Some(t), Some(e)) => (t.to_string(), e.to_string()),
                    _ => (String::new(), String::new()),
                };
                csv += &format!("{n},{g},{t},{e}\n");
            }
            let mut json = r.to_json();
            json["mode"] = "exact".into();
            let summary = format!("t_{} = {}", cfg.order, r.t[cfg.order]);
            Ok(Report { header: "n,g_n,t_n,eps_n", cells: vec![Cell { json, csv, summary }] })
        }
        ModeArg::Numeric => {
            need_q(cfg)?;
            let cells = parallel(cfg, &cfg.q_grid, |q| {
                let qf = rational_to_f64(q);
                let r = right_inverse_numeric(&spec, order, qf)?;
                let qt = format_rational(q);
                let mut csv = String::new();
                for (n, g) in r.g.coeffs().iter().enumerate() {
                    let (t, e) = match (r.t.get(n), r.eps.get(n)) {
                        (Some(t), Some(e)) => (format_f64(*t), format_f64(*e)),
                        _ => (String::new(), String::new()),
                    };
                    csv += &format!("{qt},{n},{},{t},{e}\n", format_f64(*g));
                }
                let mut json = r.to_json();
                json["mode"] = "numeric".into();
                json["q"] = qt.clone().into();
                let summary = format!("q={qt} t_{} = {}", cfg.order, format_f64(r.t[cfg.order]));
                Ok(Cell { json, csv, summary })
            })?;
            Ok(Report { header: "q,n,g_n,t_n,eps_n", cells })
        }
    }
}

fn asymptotics(cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = phi(cfg)?;
    if cfg.mode == Some(ModeArg::Exact) {
        return Err(CliError::Config("asymptotics runs in numeric mode at fixed q".into()));
    }
    need_q(cfg)?;
    let opts = ReportOptions { tol: Tolerances { root: cfg.tol_root, tail: cfg.tol_tail }, ..ReportOptions::default() };
    let cells = parallel(cfg, &cfg.q_grid, |q| {
        let qf = rational_to_f64(q);
        let qt = format_rational(q);
        let report = convergence_report(&spec, qf, cfg.order, opts)?;
        let poly = if spec.degree().is_some() && spec.inner().is_none() {
            Some(polynomial_case_limit(&spec, qf)?)
        } else {
            None
        };
        let mut csv = String::new();
        for line in report.to_csv().lines().skip(1) {
            csv += &format!("{qt},{line}\n");
        }
        let densities: Vec<String> = report
            .deviation
            .iter()
            .map(|d| format!("density({})={}", d.delta, format_f64(d.density)))
            .collect();
        let summary = format!(
            "q={qt} zeta={} L={} liminf={} {}",
            format_f64(report.context.zeta),
            format_f64(report.context.l_value),
            format_f64(report.liminf_estimate),
            densities.join(" ")
        );
        let json = json!({ "q": qt, "report": report, "polynomial_limit": poly });
        Ok(Cell { json, csv, summary })
    })?;
    Ok(Report { header: "q,n,a_n,L,abs_dev", cells })
}

fn qbig(cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = phi(cfg)?;
    need_q(cfg)?;
    let cells = parallel(cfg, &cfg.q_grid, |q| {
        let qf = rational_to_f64(q);
        let qt = format_rational(q);
        let r = analyze(&spec, qf, cfg.order, cfg.tol_root)?;
        let mut csv = String::new();
        for line in r.ratio_csv().lines().skip(1) {
            csv += &format!("{qt},{line}\n");
        }
        let summary = format!(
            "q={qt} eta={} C_formula={} C_empirical={} residual={}",
            format_f64(r.eta.eta),
            format_f64(r.c_formula),
            format_f64(r.c_empirical),
            format_f64(r.residual)
        );
        let mut json = serde_json::to_value(&r).map_err(|e| CliError::Internal(e.to_string()))?;
        json["q"] = qt.into();
        Ok(Cell { json, csv, summary })
    })?;
    Ok(Report { header: "q,n,g_n,g_n_eta_n", cells })
}

fn formal_f(cfg: &RunConfig) -> Result<PolyF, CliError> {
    match (&cfg.f, &cfg.phi) {
        (Some(f), None) => Ok(f.parse()?),
        (None, Some(_)) => Ok(PolyF::from_phi(&phi(cfg)?)?),
        (Some(_), Some(_)) => Err(CliError::Config("give either --f or --phi, not both".into())),
        (None, None) => Err(CliError::Config("--f is required".into())),
    }
}

fn formal(cfg: &RunConfig) -> Result<Report, CliError> {
    let f = formal_f(cfg)?;
    need_q(cfg)?;
    let kappa = cfg.kappa.as_deref().map(parse_rational).transpose()?;
    let cells = parallel(cfg, &cfg.q_grid, |q| {
        let qt = format_rational(q);
        let zeros = q_extremal_zeros(&f, q)?;
        let seeds: Vec<Scalar> = match &kappa {
            Some(k) => vec![Scalar::Exact(k.clone())],
            None => zeros.iter().filter(|z| z.extremal).map(|z| z.kappa.clone()).collect(),
        };
        let mut solutions = Vec::new();
        let mut csv = String::new();
        let mut verdicts = Vec::new();
        for seed in &seeds {
            let kt = seed.to_text();
            let sol = match seed {
                Scalar::Exact(k) => exact_solution(&f, k, q, cfg.order)?,
                Scalar::Real(k) => float_solution(&f, *k, q, cfg)?,
            };
            for (n, (gn, rn)) in sol.g_text.iter().zip(&sol.residual_text).enumerate() {
                csv += &format!("{qt},{kt},{n},{gn},{rn}\n");
            }
            verdicts.push(format!(
                "kappa={kt}: residual {} to order {}",
                if sol.zero { "vanishes" } else { "does not vanish" },
                cfg.order
            ));
            solutions.push(json!({
                "kappa": seed,
                "exact": matches!(seed, Scalar::Exact(_)),
                "g": sol.g,
                "residual": sol.residual,
                "residual_zero": sol.zero,
            }));
        }
        let summary = if verdicts.is_empty() {
            format!("q={qt} f={f}: no q-extremal real zero")
        } else {
            format!("q={qt} f={f}: {}", verdicts.join("; "))
        };
        let json = json!({ "q": qt, "f": f.to_string(), "zeros": zeros, "solutions": solutions });
        Ok(Cell { json, csv, summary })
    })?;
    Ok(Report { header: "q,kappa,n,g_n,residual_n", cells })
}

/// A formal solution with its residual, as JSON and as CSV text.
struct Solution {
    g: Vec<Value>,
    residual: Vec<Value>,
    g_text: Vec<String>,
    residual_text: Vec<String>,
    zero: bool,
}

fn exact_solution(f: &PolyF, kappa: &Rational, q: &Rational, order: usize) -> Result<Solution, CliError> {
    let g = g_kappa(f, kappa, q, order)?;
    let res = verify_formal_solution(&g, f.coeffs());
    if !res.is_zero() {
        return Err(CliError::Internal(format!("exact residual of g_kappa for kappa={kappa} is nonzero")));
    }
    let text = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
    let (g_text, residual_text) = (text(g.coeffs()), text(res.coeffs()));
    Ok(Solution {
        g: g_text.iter().map(|s| Value::from(s.as_str())).collect(),
        residual: residual_text.iter().map(|s| Value::from(s.as_str())).collect(),
        g_text,
        residual_text,
        zero: true,
    })
}

/// Numeric verdict: every residual coefficient within `tol_eq` times the
/// largest `|g_n|` (at least 1).
fn float_solution(f: &PolyF, kappa: f64, q: &Rational, cfg: &RunConfig) -> Result<Solution, CliError> {
    let g = g_kappa_f64(f, kappa, rational_to_f64(q), cfg.order)?;
    let fc: Vec<f64> = f.coeffs().iter().map(rational_to_f64).collect();
    let res = verify_formal_solution(&g, &fc);
    let scale = g.coeffs().iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let num = |v: &[f64]| v.iter().map(|x| float_to_json(*x)).collect();
    let text = |v: &[f64]| v.iter().map(|x| format_f64(*x)).collect();
    Ok(Solution {
        g: num(g.coeffs()),
        residual: num(res.coeffs()),
        g_text: text(g.coeffs()),
        residual_text: text(res.coeffs()),
        zero: res.coeffs().iter().all(|r| r.abs() <= cfg.tol_eq * scale),
    })
}

fn tuples(cfg: &RunConfig) -> Result<Report, CliError> {
    let (n, i) = match (cfg.n, cfg.i) {
        (Some(n), Some(i)) => (n, i),
        _ => return Err(CliError::Config("tuples needs --n and --i".into())),
    };
    let report = verify_min_lemmas(n, i)?;
    let mut it = Compositions::new(n, i);
    let mut table = Vec::new();
    let mut csv = String::new();
    while let Some(parts) = it.advance() {
        let l = l_statistic(parts);
        let text: Vec<String> = parts.iter().map(u64::to_string).collect();
        csv += &format!("{},{l}\n", text.join(" "));
        table.push(json!({ "parts": parts, "L": l }));
    }
    let argmin: Vec<String> = report
        .argmin
        .iter()
        .map(|p| format!("({})", p.iter().map(u64::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    let summary = format!(
        "min L = {} at {}; lemma (i) {}, (ii) {}, (iii) {}",
        report.min,
        argmin.join(" "),
        verdict(report.lemma_i),
        verdict(report.lemma_ii),
        verdict(report.lemma_iii)
    );
    let json = json!({ "lemmas": report, "table": table });
    Ok(Report { header: "parts,L", cells: vec![Cell { json, csv, summary }] })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "fails"
    }
}
