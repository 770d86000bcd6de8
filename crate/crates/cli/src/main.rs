use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use piqfc_cli::commands;
use piqfc_cli::CliError;

/// Simulate and analyze polarization-entangled photon pairs through a
/// dual-polarization frequency converter.
#[derive(Parser)]
#[command(name = "piqfc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate coincidence counts for one scenario and write a record file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Scenario name; required when the config defines several.
        #[arg(long)]
        scenario: Option<String>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct a state from a record file and report metrics with
    /// bootstrap uncertainties.
    Analyze {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of bootstrap resamples.
        #[arg(long)]
        resamples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit eta_max and g to "power_W efficiency" calibration data.
    FitEfficiency {
        /// Calibration data file.
        data: PathBuf,
        /// Report the smallest pump power reaching this efficiency.
        #[arg(long)]
        target: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate and analyze every scenario of a config.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        resamples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            config,
            scenario,
            seed,
            out,
        } => {
            let cfg = commands::load_config(&config, seed, None)?;
            let (records, summary) = commands::cmd_simulate(&cfg, scenario.as_deref())?;
            emit(out.as_deref(), &records)?;
            eprintln!("{summary}");
            Ok(())
        }
        Command::Analyze {
            records,
            config,
            scenario,
            seed,
            resamples,
            out,
        } => {
            let cfg = commands::load_config(&config, seed, resamples)?;
            let text = commands::read_file(&records)?;
            let report = commands::cmd_analyze(&cfg, scenario.as_deref(), &text)?;
            emit(out.as_deref(), &report)
        }
        Command::FitEfficiency { data, target, out } => {
            let text = commands::read_file(&data)?;
            let report = commands::cmd_fit_efficiency(&text, target)?;
            emit(out.as_deref(), &report)
        }
        Command::Pipeline {
            config,
            seed,
            resamples,
            out,
        } => {
            let cfg = commands::load_config(&config, seed, resamples)?;
            let report = commands::cmd_pipeline(&cfg)?;
            emit(out.as_deref(), &report)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
