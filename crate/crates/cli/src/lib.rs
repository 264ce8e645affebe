//! Command-line front end: phase lines, sphere fields, animation frames,
//! closed-form tables and the acceptance checks.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::FormulaConfig;
use crate::config::{resolve, SharedArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("{0} acceptance check(s) failed")]
    Verification(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Verification(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<spinwigner::Error> for CliError {
    fn from(e: spinwigner::Error) -> Self {
        use spinwigner::Error::*;
        match e {
            InvalidModel(_) | InvalidSweep(_) | InvalidLabel(_) | InvalidParameter(_) | SiteOutOfRange { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "spinwigner", version, about = "Spin Wigner functions of small cyclic spin chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep a coupling and write equal-angle values, derivatives and critical points.
    Phaseline(SharedArgs),
    /// Sample reduced Wigner functions on the sphere at one coupling.
    Sphere(SharedArgs),
    /// Sphere fields at every point of a sweep, one directory per frame.
    Animate(SharedArgs),
    /// Classical and thermodynamic-limit transverse Ising formulas.
    Formulas(FormulaArgs),
    /// Run the acceptance checks.
    Verify,
}

#[derive(Args, Debug)]
pub struct FormulaArgs {
    /// Comma-separated couplings λ.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.5, 1.0, 1.5, 2.0])]
    pub values: Vec<f64>,
    /// Comma-separated XY anisotropies for the factorization table.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.3, 0.5, 0.8])]
    pub gammas: Vec<f64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn print_report(report: &commands::Report) {
    println!("wrote {} files to {}", report.files.len(), report.out.display());
    for c in &report.critical_points {
        println!("  {c}");
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Phaseline(args) => print_report(&commands::phaseline(&resolve("phaseline", args)?)?),
        Command::Sphere(args) => print_report(&commands::sphere(&resolve("sphere", args)?)?),
        Command::Animate(args) => print_report(&commands::animate(&resolve("animate", args)?)?),
        Command::Formulas(args) => {
            let cfg = FormulaConfig { values: args.values, gammas: args.gammas, out: args.out };
            let (report, table) = commands::formulas(&cfg)?;
            print!("{table}");
            print_report(&report);
        }
        Command::Verify => {
            let outcomes = commands::verify();
            for o in &outcomes {
                println!("{o}");
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} passed, {failed} failed", outcomes.len() - failed);
            if failed > 0 {
                return Err(CliError::Verification(failed));
            }
        }
    }
    Ok(())
}
