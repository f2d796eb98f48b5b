//! Flags, the optional TOML file that mirrors them, and the resolved
//! [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use num_traits::{Signed, Zero};
use qinvert_core::arith::{format_rational, parse_rational};
use qinvert_core::Rational;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Largest number of grid cells accepted from `a:b:step`.
const MAX_GRID: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Flags shared by every subcommand. Each one can also come from
/// `--config`; a flag on the command line wins.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// Datum phi: catalan, fractional:<rho>, exponential:<lambda>,
    /// explicit:<c1,c2,...>, optionally prefixed with alt:
    #[arg(long)]
    pub phi: Option<String>,
    /// Polynomial f with f(0)=0, f'(0)=1, e.g. "z - z^2"
    #[arg(long = "f")]
    pub f: Option<String>,
    /// A value (rational or decimal) or a grid a:b:step
    #[arg(long)]
    pub q: Option<String>,
    /// Order
    #[arg(short = 'N', long = "order")]
    pub order: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Root-finding tolerance
    #[arg(long)]
    pub tol_root: Option<f64>,
    /// Tail target for infinite products
    #[arg(long)]
    pub tol_tail: Option<f64>,
    /// Equality tolerance for numeric verdicts
    #[arg(long)]
    pub tol_eq: Option<f64>,
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    #[arg(long)]
    pub csv: bool,
    /// Output file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// TOML file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Zero of f seeding a formal solution
    #[arg(long)]
    pub kappa: Option<String>,
    /// Tuple sum
    #[arg(long = "n")]
    pub n: Option<u64>,
    /// Number of tuple parts
    #[arg(long = "i")]
    pub i: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    phi: Option<String>,
    f: Option<String>,
    q: Option<String>,
    #[serde(alias = "N")]
    order: Option<usize>,
    mode: Option<ModeArg>,
    tol_root: Option<f64>,
    tol_tail: Option<f64>,
    tol_eq: Option<f64>,
    output: Option<OutputFormat>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    kappa: Option<String>,
    n: Option<u64>,
    i: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Coeffs,
    Asymptotics,
    Qbig,
    Formal,
    Tuples,
}

impl CommandKind {
    fn default_order(self) -> usize {
        match self {
            CommandKind::Coeffs => 10,
            CommandKind::Asymptotics => 60,
            CommandKind::Qbig => 100,
            CommandKind::Formal => 8,
            CommandKind::Tuples => 0,
        }
    }
}

/// Everything a run depends on. Serialized into the JSON output, so it
/// leaves out the thread count, which never changes results.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub phi: Option<String>,
    pub f: Option<String>,
    pub q: Option<String>,
    #[serde(serialize_with = "rationals_as_text")]
    pub q_grid: Vec<Rational>,
    #[serde(rename = "N")]
    pub order: usize,
    pub mode: Option<ModeArg>,
    pub tol_root: f64,
    pub tol_tail: f64,
    pub tol_eq: f64,
    pub output: OutputFormat,
    pub out: Option<PathBuf>,
    pub kappa: Option<String>,
    pub n: Option<u64>,
    pub i: Option<usize>,
    #[serde(skip)]
    pub jobs: usize,
}

fn rationals_as_text<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

impl RunConfig {
    pub fn resolve(command: CommandKind, flags: Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let output = if flags.csv {
            OutputFormat::Csv
        } else if flags.json {
            OutputFormat::Json
        } else {
            file.output.unwrap_or(OutputFormat::Json)
        };
        let q = flags.q.or(file.q);
        let q_grid = match &q {
            Some(s) => parse_grid(s)?,
            None => Vec::new(),
        };
        let jobs = flags
            .jobs
            .or(file.jobs)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        let cfg = RunConfig {
            command,
            phi: flags.phi.or(file.phi),
            f: flags.f.or(file.f),
            q,
            q_grid,
            order: flags.order.or(file.order).unwrap_or(command.default_order()),
            mode: flags.mode.or(file.mode),
            tol_root: flags.tol_root.or(file.tol_root).unwrap_or(1e-15),
            tol_tail: flags.tol_tail.or(file.tol_tail).unwrap_or(1e-15),
            tol_eq: flags.tol_eq.or(file.tol_eq).unwrap_or(1e-12),
            output,
            out: flags.out.or(file.out),
            kappa: flags.kappa.or(file.kappa),
            n: flags.n.or(file.n),
            i: flags.i.or(file.i),
            jobs,
        };
        for (name, t) in [("tol-root", cfg.tol_root), ("tol-tail", cfg.tol_tail), ("tol-eq", cfg.tol_eq)] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive, got {t}")));
            }
        }
        if cfg.jobs == 0 {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        Ok(cfg)
    }
}

/// A single value, or `a:b:step` meaning `a, a+step, ...` up to `b`,
/// computed in exact rationals so grid points do not drift.
pub fn parse_grid(s: &str) -> Result<Vec<Rational>, CliError> {
    let bad = |e: qinvert_core::Error| CliError::Config(format!("bad --q {s:?}: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![parse_rational(v).map_err(bad)?]),
        [a, b, step] => {
            let (a, b, step) = (
                parse_rational(a).map_err(bad)?,
                parse_rational(b).map_err(bad)?,
                parse_rational(step).map_err(bad)?,
            );
            if !step.is_positive() {
                return Err(CliError::Config(format!("grid step must be positive in {s:?}")));
            }
            if a > b {
                return Err(CliError::Config(format!("empty grid {s:?}")));
            }
            let count = ((&b - &a) / &step).floor();
            if count >= Rational::from_integer(MAX_GRID.into()) {
                return Err(CliError::Config(format!("grid {s:?} has more than {MAX_GRID} points")));
            }
            let mut out = Vec::new();
            let mut x = a;
            while x <= b {
                out.push(x.clone());
                x += &step;
            }
            debug_assert!(!out.is_empty() && !step.is_zero());
            Ok(out)
        }
        _ => Err(CliError::Config(format!("--q expects a value or a:b:step, got {s:?}"))),
    }
}
