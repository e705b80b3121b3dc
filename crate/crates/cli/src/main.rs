use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use zenopure_cli::commands;
use zenopure_cli::experiment::figure1_config;
use zenopure_cli::{CliError, Experiment, Overrides, Report};

/// Purification of a quantum system by repeated confirmation of a probe.
///
/// Exit codes: 0 ok, 1 config or runtime error, 2 degenerate spectrum,
/// 3 tolerance breach in `compare`.
#[derive(Parser)]
#[command(name = "zenopure", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Leading eigenvalues of V and the purification conditions.
    Spectrum(ConfigArgs),
    /// CSV of probability, yield, fidelity and purity per step.
    Purify(ConfigArgs),
    /// Engine against the oscillator closed forms.
    Compare(ConfigArgs),
    /// Yield and unitarity defect at fixed total time.
    Zeno(ConfigArgs),
    /// Every table listed under `outputs` in the config.
    Run(ConfigArgs),
    /// `purify` for the reference run (Ω = ω = 1, g = 0.2, α = 0.5, β = 1, τ = 2π/Ω₊).
    Figure1(Common),
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Fock cutoff for both oscillators (highest number state kept).
    #[arg(long, value_name = "N")]
    cutoff: Option<usize>,
    /// Number of confirmations.
    #[arg(long, value_name = "N")]
    steps: Option<usize>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Write the table here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            cutoff: self.cutoff,
            steps: self.steps,
            seed: self.seed,
        }
    }
}

fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Figure1(c) => {
            let config = figure1_config(c.cutoff.unwrap_or(30), c.steps.unwrap_or(10));
            let overrides = Overrides { cutoff: None, steps: None, seed: c.seed };
            commands::purify(&Experiment::from_config(config, &PathBuf::new(), overrides)?)
        }
        Command::Spectrum(a) | Command::Purify(a) | Command::Compare(a) | Command::Zeno(a) | Command::Run(a) => {
            let exp = Experiment::load(&a.config, a.common.overrides())?;
            match command {
                Command::Spectrum(_) => commands::spectrum(&exp),
                Command::Purify(_) => commands::purify(&exp),
                Command::Compare(_) => commands::compare(&exp),
                Command::Zeno(_) => commands::zeno(&exp, a.common.jobs),
                _ => commands::run_outputs(&exp, a.common.jobs),
            }
        }
    }
}

fn out_path(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Figure1(c) => c.out.as_ref(),
        Command::Spectrum(a) | Command::Purify(a) | Command::Compare(a) | Command::Zeno(a) | Command::Run(a) => {
            a.common.out.as_ref()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(CliError::EXIT_CODE),
            };
        }
    };
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CliError::EXIT_CODE);
        }
    };
    let written = match out_path(&cli.command) {
        Some(path) => fs::write(path, &report.text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout().write_all(report.text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(CliError::EXIT_CODE);
    }
    ExitCode::from(report.status.code())
}
