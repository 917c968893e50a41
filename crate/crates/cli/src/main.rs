//! `milnor`: signature tables for linking forms, skew-isometric structures
//! and fibered knots.

mod commands;
mod input;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use milnor_core::{Backend, CycloNumber, FlavorKind, FloatComplex};

use commands::Points;
use output::{Format, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] milnor_core::Error),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    fn parse(path: &Path, e: &serde_json::Error) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "milnor", version, about = "Twisted Milnor signatures, signature jumps and Levine-Tristram profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON input file.
    #[arg(long)]
    input: PathBuf,
    /// Evaluation point `N/k`, meaning exp(2πik/N). Repeatable.
    #[arg(long = "xi", value_name = "N/k", conflicts_with = "grid")]
    xi: Vec<String>,
    /// Evaluate at every primitive `N/k` with N up to this bound.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    grid: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Use floating-point complex arithmetic with this zero tolerance.
    #[arg(long, value_name = "EPS")]
    float_tol: Option<f64>,
}

impl Common {
    fn points(&self) -> Points {
        if !self.xi.is_empty() {
            Points::List(self.xi.clone())
        } else if let Some(n) = self.grid {
            Points::Grid(n)
        } else {
            Points::Auto
        }
    }

    fn backend(&self) -> Backend {
        match self.float_tol {
            Some(tolerance) => Backend::FloatComplex { tolerance },
            None => Backend::ExactCyclotomic { order: 1 },
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Milnor ξ-signatures and the total signature.
    Signature(Common),
    /// Signature jumps of a linking form.
    Jumps {
        #[command(flatten)]
        common: Common,
        /// Also run the trace route where dévissage applies; exit 3 on
        /// disagreement.
        #[arg(long)]
        check_both_routes: bool,
    },
    /// Levine-Tristram signatures against the fibered total signature.
    LtProfile(Common),
    /// Agreement of the two jump routes (linking forms) or of the
    /// Blanchfield and fibered pipelines (Seifert matrices).
    Crosscheck(Common),
    /// The elementary form e(n, eps, xi, F) and its trace pushforward.
    Elementary {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        eps: i32,
        #[arg(long, value_name = "N/k")]
        xi: String,
        #[arg(long, value_enum)]
        flavor: Flavor,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum Flavor {
    Real,
    Complex,
}

/// Rendered output and whether every cross-check passed.
struct Report {
    table: Option<Table>,
    json: Option<serde_json::Value>,
    format: Format,
    checks_passed: bool,
}

impl Report {
    fn table(table: Table, format: Format) -> Self {
        Report {
            table: Some(table),
            json: None,
            format,
            checks_passed: true,
        }
    }
}

fn with_backend<T>(
    common: &Common,
    exact: impl FnOnce(&input::Input, &Points, Backend) -> Result<T, CliError>,
    float: impl FnOnce(&input::Input, &Points, Backend) -> Result<T, CliError>,
) -> Result<T, CliError> {
    let input = input::load(&common.input)?;
    let points = common.points();
    match common.backend() {
        b @ Backend::ExactCyclotomic { .. } => exact(&input, &points, b),
        b @ Backend::FloatComplex { tolerance } => {
            milnor_core::FieldFlavor::float(FlavorKind::Complex, tolerance)?;
            float(&input, &points, b)
        }
    }
}

fn run(cli: Cli) -> Result<Report, CliError> {
    match cli.command {
        Command::Signature(c) => {
            let t = with_backend(&c, commands::signature::<CycloNumber>, commands::signature::<FloatComplex>)?;
            Ok(Report::table(t, c.format))
        }
        Command::Jumps {
            common: c,
            check_both_routes,
        } => {
            let (t, ok) = with_backend(
                &c,
                |i, p, b| commands::jumps::<CycloNumber>(i, p, b, check_both_routes),
                |i, p, b| commands::jumps::<FloatComplex>(i, p, b, check_both_routes),
            )?;
            Ok(Report {
                checks_passed: ok,
                ..Report::table(t, c.format)
            })
        }
        Command::LtProfile(c) => {
            let t = with_backend(&c, commands::lt_profile::<CycloNumber>, commands::lt_profile::<FloatComplex>)?;
            Ok(Report::table(t, c.format))
        }
        Command::Crosscheck(c) => {
            let (t, ok) = with_backend(&c, commands::crosscheck::<CycloNumber>, commands::crosscheck::<FloatComplex>)?;
            Ok(Report {
                checks_passed: ok,
                ..Report::table(t, c.format)
            })
        }
        Command::Elementary {
            n,
            eps,
            xi,
            flavor,
            format,
        } => {
            let kind = match flavor {
                Flavor::Real => FlavorKind::Real,
                Flavor::Complex => FlavorKind::Complex,
            };
            let e = commands::elementary(n, eps, &xi, kind)?;
            Ok(match format {
                Format::Json => Report {
                    table: None,
                    json: Some(e.to_json()),
                    format,
                    checks_passed: true,
                },
                Format::Csv => Report::table(e.table(), format),
            })
        }
    }
}

fn emit(report: &Report) -> Result<(), CliError> {
    // everything is computed before the first byte is written
    let mut buf = Vec::new();
    if let Some(t) = &report.table {
        t.write(report.format, &mut buf)?;
    }
    if let Some(v) = &report.json {
        serde_json::to_writer_pretty(&mut buf, v)?;
        buf.push(b'\n');
    }
    let mut out = std::io::stdout().lock();
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

/// 0 on success, 3 when a cross-check fails, 2 for every other error.
fn exit_code(outcome: &Result<bool, CliError>) -> u8 {
    match outcome {
        Ok(true) => 0,
        Ok(false) | Err(CliError::Core(milnor_core::Error::CrossCheck(_))) => 3,
        Err(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(cli).and_then(|r| emit(&r).map(|_| r.checks_passed));
    match &outcome {
        Ok(false) => eprintln!("error: cross-check failed"),
        Err(e) => eprintln!("error: {e}"),
        Ok(true) => {}
    }
    ExitCode::from(exit_code(&outcome))
}
