mod commands;
mod config;
mod reproduce;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{
    CountCompareArgs, DeltaArgs, PhaseplotArgs, RecordArgs, ReproduceArgs, SpectrumArgs, TrigDensityArgs,
};

#[derive(Parser)]
#[command(name = "gspec", version, about = "Coupling-constant spectra of one-dimensional Dirac operators")]
struct Cli {
    /// Flat key/value TOML file mirroring the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Real spectrum on [0, R] or complex roots in a rectangle, as JSON lines.
    Spectrum(SpectrumArgs),
    /// Empirical counting slope against the predicted density, as JSON.
    CountCompare(CountCompareArgs),
    /// Phase plot of the determinant: PREFIX.ppm and PREFIX.csv.
    Phaseplot(PhaseplotArgs),
    /// Angle defect on a uniform γ grid, as CSV.
    Delta(DeltaArgs),
    /// Zero density of cos x + α cos βx, brute force against prediction.
    TrigDensity(TrigDensityArgs),
    /// Text record of a potential, readable back with `--potential @file`.
    Record(RecordArgs),
    /// Data for one of the worked examples 2.1 to 2.5.
    Reproduce(ReproduceArgs),
}

/// Failure classes, mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = config::load(cli.config.as_deref())?;
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => config::threads_from(&file)?,
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Spectrum(a) => commands::spectrum(config::resolve(a, &file)?),
        Command::CountCompare(a) => commands::count_compare(config::resolve(a, &file)?),
        Command::Phaseplot(a) => commands::phaseplot(config::resolve(a, &file)?),
        Command::Delta(a) => commands::delta(config::resolve(a, &file)?),
        Command::TrigDensity(a) => commands::trig_density(config::resolve(a, &file)?),
        Command::Record(a) => commands::record(config::resolve(a, &file)?),
        Command::Reproduce(a) => reproduce::run(config::resolve(a, &file)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (kind, msg) = match &f {
                Failure::Usage(m) => ("invalid input", m),
                Failure::Numerical(m) => ("numerical failure", m),
                Failure::Io(m) => ("i/o error", m),
            };
            eprintln!("gspec: {kind}: {msg}");
            ExitCode::from(f.code())
        }
    }
}
