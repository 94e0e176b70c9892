mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "freqgate", version, about = "Frequency-bin gate synthesis and modulator analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Master seed; overrides the seeds in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Suppress progress and summaries on stdout.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimize a processor for the target gate and write a run directory.
    Synthesize(Common),
    /// Evaluate a saved genome against the target gate.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Genome file, one gene per line.
        #[arg(long)]
        genome: PathBuf,
    },
    /// Write sensitivity sweeps of the truncated first-sideband coefficient.
    Sensitivity(Common),
    /// Compare the analytic spectra against the sampled oracle.
    OracleCheck(Common),
    /// Finite-difference sensitivity sweep of any mixer parameter.
    Sweep(Common),
}

/// How a command failed; selects the exit code.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
    Tolerance(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
            Failure::Tolerance(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synthesize(c) => commands::synthesize(&c),
        Command::Evaluate { common, genome } => commands::evaluate(&common, &genome),
        Command::Sensitivity(c) => commands::sensitivity(&c),
        Command::OracleCheck(c) => commands::oracle_check(&c),
        Command::Sweep(c) => commands::sweep(&c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Config(e) => eprintln!("invalid configuration: {e:#}"),
                Failure::Runtime(e) => eprintln!("error: {e:#}"),
                Failure::Tolerance(msg) => eprintln!("tolerance exceeded: {msg}"),
            }
            ExitCode::from(failure.code())
        }
    }
}
