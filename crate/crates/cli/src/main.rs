//! `qinvert`: batch front end for the q-Lagrange inversion engine.
//!
//! Exit codes: 0 success, 2 configuration error, 3 domain error (the
//! engine's error name goes to stderr), 4 failed internal check.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::commands::Report;
use crate::config::{CommandKind, Flags, OutputFormat, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "qinvert", version, about = "Right inverses under q-composition: coefficients, limits and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// g_n, t_n and the renewal defect eps_n, exact or at fixed q
    Coeffs(Flags),
    /// Normalized sequence a_n, L(q) and convergence diagnostics for 0 < q < 1
    Asymptotics(Flags),
    /// Radius eta, constant C and ratio trace for q > 1
    Qbig(Flags),
    /// q-extremal zeros of f and the formal solutions they seed
    Formal(Flags),
    /// L statistic over compositions of n into i parts, with the minimum lemmas
    Tuples(Flags),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, flags) = match cli.command {
        Command::Coeffs(f) => (CommandKind::Coeffs, f),
        Command::Asymptotics(f) => (CommandKind::Asymptotics, f),
        Command::Qbig(f) => (CommandKind::Qbig, f),
        Command::Formal(f) => (CommandKind::Formal, f),
        Command::Tuples(f) => (CommandKind::Tuples, f),
    };
    match execute(kind, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(kind: CommandKind, flags: Flags) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(kind, flags)?;
    let report = commands::run(&cfg)?;
    let text = render(&cfg, &report)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Internal(format!("stdout: {e}")))?;
        }
    }
    for cell in &report.cells {
        eprintln!("{}", cell.summary);
    }
    Ok(())
}

fn render(cfg: &RunConfig, report: &Report) -> Result<String, CliError> {
    match cfg.output {
        OutputFormat::Csv => {
            let mut out = format!("{}\n", report.header);
            for cell in &report.cells {
                out += &cell.csv;
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let doc = json!({
                "config": cfg,
                "results": report.cells.iter().map(|c| &c.json).collect::<Vec<_>>(),
                "versions": {
                    "qinvert": env!("CARGO_PKG_VERSION"),
                    "qinvert-core": qinvert_core::VERSION,
                },
            });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}
