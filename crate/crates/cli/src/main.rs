//! `kitai-lab`: runs one experiment and writes a versioned JSON report.
//!
//! Exit status: 0 when every asserted check passes, 1 when a check fails
//! or is undecided, 2 on usage, configuration or I/O errors.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use kitai_core::numeric::{Ball, DEFAULT_PRECISION, MAX_PRECISION};
use kitai_core::report::{Report, RunConfig, Status};
use kitai_core::Error as CoreError;

#[derive(Debug, Parser)]
#[command(name = "kitai-lab", version, about = "Certified experiments on I + lambda T")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "KITAI_PRECISION", default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    /// Report path; the report goes to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write an `n,norm_mid,norm_rad` table.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Leave the timestamp out of the report.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Laguerre identity and decay study of (I - cV)^n 1.
    Laguerre(commands::LaguerreArgs),
    /// Decay certificates for (I + lambda V)^(+-n) f.
    Witness(commands::WitnessArgs),
    /// Function side against sequence side through J*.
    Xval(commands::XvalArgs),
    /// Certified orbit norms of (I + lambda T)^(+-n) x.
    Orbit(commands::OrbitArgs),
    /// The sequence c_n = (n! prod |w_j|)^(1/n).
    Weights(commands::WeightsArgs),
    /// Polynomial growth exponent of (I + T)^n x.
    Atzmon(commands::AtzmonArgs),
    /// Two-sided orbit smallness check.
    Qn(commands::QnArgs),
    /// Block realization and pushed certificates.
    Transfer(commands::TransferArgs),
    /// Permutation constructions.
    Permute(commands::PermuteArgs),
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Check(anyhow::Error),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Verification(_) => Failure::Check(e.into()),
            _ => Failure::Usage(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<CoreError>() {
            Ok(core) => core.into(),
            Err(e) => Failure::Usage(e),
        }
    }
}

fn timestamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{secs}")
}

fn write_csv(path: &PathBuf, rows: &[(u64, Ball)]) -> anyhow::Result<()> {
    let mut s = String::from("n,norm_mid,norm_rad\n");
    for (n, b) in rows {
        s.push_str(&format!("{n},{:e},{:e}\n", b.mid().to_f64(), b.rad().to_f64()));
    }
    std::fs::write(path, s).with_context(|| format!("cannot write {}", path.display()))
}

fn run(cli: Cli) -> Result<Status, Failure> {
    if !(16..=MAX_PRECISION).contains(&cli.precision) {
        return Err(Failure::Usage(anyhow::anyhow!(
            "precision {} outside 16..={MAX_PRECISION}",
            cli.precision
        )));
    }
    let prec = cli.precision;
    let (name, out) = match &cli.command {
        Command::Laguerre(a) => ("laguerre", commands::laguerre(a, prec)?),
        Command::Witness(a) => ("witness", commands::witness(a, prec)?),
        Command::Xval(a) => ("xval", commands::xval(a, prec)?),
        Command::Orbit(a) => ("orbit", commands::orbit(a, prec)?),
        Command::Weights(a) => ("weights", commands::weights(a, prec)?),
        Command::Atzmon(a) => ("atzmon", commands::atzmon(a, prec)?),
        Command::Qn(a) => ("qn", commands::qn(a, prec)?),
        Command::Transfer(a) => ("transfer", commands::transfer(a, prec)?),
        Command::Permute(a) => ("permute", commands::permute(a)?),
    };
    let mut report = Report::new(
        name,
        out.inputs,
        RunConfig {
            precision: prec,
            thresholds: out.thresholds,
            seed: out.seed,
        },
    );
    report.results = out.results;
    report.checks = out.checks;
    if !cli.no_timestamp {
        report.timestamp = Some(timestamp());
    }
    let json = report.to_json();
    match &cli.out {
        Some(p) => std::fs::write(p, &json).with_context(|| format!("cannot write report {}", p.display()))?,
        None => std::io::stdout()
            .write_all(json.as_bytes())
            .context("cannot write report to stdout")?,
    }
    if let Some(p) = &cli.csv {
        write_csv(p, &out.table)?;
    }
    for c in &report.checks {
        eprintln!("{:>9}  {}: {}", format!("{:?}", c.status).to_lowercase(), c.name, c.detail);
    }
    Ok(report.overall())
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(Failure::Check(e)) => {
            eprintln!("check failed: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
