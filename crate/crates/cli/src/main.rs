//! `hqf`: leave-one-patient-out experiments for the hybrid forecaster.
//!
//! Exit codes: 0 success, 2 configuration, 3 ingestion, 4 training,
//! 5 evaluation.

mod commands;
mod config;
mod failure;
mod layout;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hqf_core::data::CorruptionKind;
use log::error;

use crate::config::{parse_variants, RunConfig};
use crate::failure::CliResult;

#[derive(Parser)]
#[command(
    name = "hqf",
    version,
    about = "Hybrid quantum-classical vital-sign forecasting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the recordings of a manifest and report durations and imputations.
    Ingest {
        #[arg(long)]
        manifest: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 240)]
        window: usize,
        #[arg(long, default_value_t = 60)]
        max_horizon: usize,
    },
    /// Train the configured variants, one checkpoint per (variant, fold).
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Fold subset such as `1-5,9`; defaults to the config's, then all.
        #[arg(long)]
        folds: Option<String>,
        /// Comma-separated variants, a subset of the configured ones.
        #[arg(long)]
        variant: Option<String>,
        /// Parallel fold workers; 0 means one per core.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Score trained models on their held-out subjects.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Test-time corruption sweep.
    Ablate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Patient-wise ranking from the evaluation tables.
    Rank {
        #[arg(long)]
        config: PathBuf,
    },
    /// Generate a synthetic corpus with a manifest.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 53)]
        subjects: usize,
        #[arg(long, default_value_t = 480)]
        duration: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Noise,
    Missing,
}

fn load(path: &Path, jobs: Option<usize>) -> CliResult<RunConfig> {
    let mut config = RunConfig::load(path)?;
    if let Some(j) = jobs {
        config.jobs = j;
    }
    Ok(config)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Ingest {
            manifest,
            output,
            window,
            max_horizon,
        } => commands::cmd_ingest(&manifest, output.as_deref(), window, max_horizon),
        Command::Train {
            config,
            folds,
            variant,
            jobs,
        } => {
            let mut config = load(&config, jobs)?;
            if let Some(list) = variant {
                config.select_variants(&parse_variants(&list)?)?;
            }
            commands::cmd_train(&config, folds.as_deref())
        }
        Command::Evaluate { config, jobs } => commands::cmd_evaluate(&load(&config, jobs)?),
        Command::Ablate { config, kind, jobs } => {
            let kind = match kind {
                KindArg::Noise => CorruptionKind::GaussianNoise,
                KindArg::Missing => CorruptionKind::Missing,
            };
            commands::cmd_ablate(&load(&config, jobs)?, kind)
        }
        Command::Rank { config } => commands::cmd_rank(&load(&config, None)?),
        Command::Synth {
            out,
            subjects,
            duration,
            seed,
        } => commands::cmd_synth(&out, subjects, duration, seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            error!("{failure}");
            failure.exit_code()
        }
    }
}
