use std::path::PathBuf;
use std::process::ExitCode;

use brickfly::{Axis, CliError, ControllerKind, ExperimentConfig, Outcome, RunOptions};
use clap::{Parser, Subcommand};

/// Identify a velocity-stabilized rotorcraft and fly sliding-mode missions.
#[derive(Debug, Parser)]
#[command(name = "brickfly", version)]
struct Cli {
    /// TOML experiment file; the `paper-nominal` preset when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweep points and step records.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sine-sweep one axis and fit a first-order model.
    Sysid {
        /// Overrides `sweep.axis`.
        #[arg(long, value_enum)]
        axis: Option<Axis>,
    },
    /// Compare step responses of the plant with a first-order model (MAPD).
    Validate,
    /// Fly one point-to-point mission.
    Navigate {
        /// Overrides `mission.controller`.
        #[arg(long, value_enum)]
        controller: Option<ControllerKind>,
    },
    /// Fly the mission under SMC and PD with identical wind.
    Compare,
    /// Print heuristic PD gains for the configured models.
    TunePd,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::preset("paper-nominal")?,
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let opts = RunOptions {
        out_dir: cli.out.clone().unwrap_or_else(|| cfg.output_dir.clone()),
        jobs: cli.jobs,
    };
    match cli.command {
        Command::Sysid { axis } => brickfly::sysid(&cfg, axis.unwrap_or(cfg.sweep.axis), &opts),
        Command::Validate => brickfly::validate(&cfg, &opts),
        Command::Navigate { controller } => {
            brickfly::navigate(&cfg, controller.unwrap_or(cfg.mission.controller), &opts)
        }
        Command::Compare => brickfly::compare(&cfg, &opts),
        Command::TunePd => brickfly::tune_pd(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for path in &outcome.artifacts {
                println!("wrote {}", path.display());
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("brickfly: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
