//! Command-line front end: `ecp curve`, `ecp ground-state`, `ecp constants`
//! and `ecp selfcheck`.
//!
//! Exit codes: 0 success, 1 computational failure, 2 usage or configuration
//! error.

// Comparisons are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod format;

use clap::{Args, Parser, Subcommand};
use config::{CurveConfig, Settings, TableConfig, CURVE_KEYS, TABLE_KEYS};
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Usage(String),
    Computation(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Computation(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Computation(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(name = "ecp", version, about = "Effective classical potential and ground state of the Coulomb system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimized W1 or W2 on an r0 grid, as CSV or JSON.
    Curve(CurveArgs),
    /// Variational ground-state frequencies and energies of orders 1 to 3, as JSON.
    GroundState(TableArgs),
    /// Perturbative constants and reexpansion coefficients, as JSON.
    Constants(TableArgs),
    /// Run every registered numerical invariant and report residuals.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args)]
struct CurveArgs {
    /// key = value file with any of the options below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Order of the potential: 1 or 2.
    #[arg(long)]
    order: Option<String>,
    /// Inverse temperature in atomic units, or "zero".
    #[arg(long)]
    beta: Option<String>,
    /// Distance grid start:stop:steps, both ends included.
    #[arg(long)]
    r0: Option<String>,
    /// Trial frequencies: iso or aniso [default: iso].
    #[arg(long)]
    mode: Option<String>,
    /// Data file; the manifest is written next to it.
    #[arg(long)]
    out: Option<String>,
    /// csv or json [default: csv].
    #[arg(long)]
    format: Option<String>,
    /// Significant digits of numeric output [default: 10].
    #[arg(long)]
    precision: Option<String>,
}

#[derive(Args)]
struct TableArgs {
    /// key = value file with out and precision; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSON data file; the manifest is written next to it.
    #[arg(long)]
    out: Option<String>,
    /// Significant digits of numeric output [default: 10].
    #[arg(long)]
    precision: Option<String>,
}

#[derive(Args)]
struct SelfcheckArgs {
    /// Replace every check's tolerance by this value.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn settings(config: Option<&PathBuf>, allowed: &[&str]) -> Result<Settings, Failure> {
    config.map_or_else(|| Ok(Settings::default()), |p| Settings::from_file(p, allowed))
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Curve(a) => {
            let mut s = settings(a.config.as_ref(), CURVE_KEYS)?;
            for (key, value) in [
                ("order", a.order),
                ("beta", a.beta),
                ("r0", a.r0),
                ("mode", a.mode),
                ("out", a.out),
                ("format", a.format),
                ("precision", a.precision),
            ] {
                s.set(key, value);
            }
            commands::curve(&CurveConfig::from_settings(&s)?)
        }
        Command::GroundState(a) => commands::ground_state(&table_config(a)?),
        Command::Constants(a) => commands::constants(&table_config(a)?),
        Command::Selfcheck(a) => {
            if let Some(t) = a.tolerance {
                if !(t >= 0.0) {
                    return Err(Failure::Usage(format!("tolerance must be non-negative, got {t}")));
                }
            }
            commands::selfcheck(a.tolerance, &mut std::io::stdout().lock())
        }
    }
}

fn table_config(a: TableArgs) -> Result<TableConfig, Failure> {
    let mut s = settings(a.config.as_ref(), TABLE_KEYS)?;
    s.set("out", a.out);
    s.set("precision", a.precision);
    TableConfig::from_settings(&s)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}
