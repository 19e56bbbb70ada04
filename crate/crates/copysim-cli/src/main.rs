//! Command-line front end: deterministic experiment runs with CSV/JSON
//! emission and per-run manifests.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use copysim_cli::config::{self, Experiment, RunConfig};
use copysim_cli::{recipes, runner};

#[derive(Parser)]
#[command(
    name = "copysim",
    version,
    about = "Inter-copy collapse simulations: feasibility frontiers, collapse \
             dynamics, and measurement-statistics experiments",
    long_about = None,
    after_help = "Each experiment accepts --defaults to print its parameter keys \
                  with default values. Unknown parameter keys are rejected. \
                  COPYSIM_THREADS limits the worker pool."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter override, may repeat: --set key=value (value parsed as JSON).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// RNG seed for stochastic experiments.
    #[arg(long)]
    seed: Option<u64>,
    /// Output base directory (default "runs"); each run gets a
    /// digest-named subdirectory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the experiment's parameter defaults as JSON and exit.
    #[arg(long)]
    defaults: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Joint-measurability feasibility frontier as CSV
    #[command(name = "povm-frontier")]
    PovmFrontier(RunArgs),
    /// Inter-copy collapse evolution time series
    #[command(name = "collapse-evolve")]
    CollapseEvolve(RunArgs),
    /// Quantum-jump Monte Carlo outcome histogram
    #[command(name = "collapse-jump")]
    CollapseJump(RunArgs),
    /// Discretized-bath model vs the jump-operator rates
    #[command(name = "bath-compare")]
    BathCompare(RunArgs),
    /// Sequential-measurement bound, single- or many-copy
    #[command(name = "seq-bound")]
    SeqBound(RunArgs),
    /// Readout-probability harmonics and their spectrum
    #[command(name = "born-spectrum")]
    BornSpectrum(RunArgs),
    /// Three-state interference functional
    #[command(name = "sorkin")]
    Sorkin(RunArgs),
    /// Print one ready-to-run command per acceptance check
    Recipes,
}

impl Command {
    fn experiment(&self) -> Option<(Experiment, &RunArgs)> {
        match self {
            Command::PovmFrontier(a) => Some((Experiment::PovmFrontier, a)),
            Command::CollapseEvolve(a) => Some((Experiment::CollapseEvolve, a)),
            Command::CollapseJump(a) => Some((Experiment::CollapseJump, a)),
            Command::BathCompare(a) => Some((Experiment::BathCompare, a)),
            Command::SeqBound(a) => Some((Experiment::SeqBound, a)),
            Command::BornSpectrum(a) => Some((Experiment::BornSpectrum, a)),
            Command::Sorkin(a) => Some((Experiment::Sorkin, a)),
            Command::Recipes => None,
        }
    }
}

fn defaults_json(experiment: Experiment) -> String {
    let value = match experiment {
        Experiment::PovmFrontier => {
            serde_json::to_value(config::PovmFrontierParams::default())
        }
        Experiment::CollapseEvolve => {
            serde_json::to_value(config::CollapseEvolveParams::default())
        }
        Experiment::CollapseJump => serde_json::to_value(config::CollapseJumpParams::default()),
        Experiment::BathCompare => serde_json::to_value(config::BathCompareParams::default()),
        Experiment::SeqBound => serde_json::to_value(config::SeqBoundParams::default()),
        Experiment::BornSpectrum => serde_json::to_value(config::BornSpectrumParams::default()),
        Experiment::Sorkin => serde_json::to_value(config::SorkinParams::default()),
    };
    serde_json::to_string_pretty(&value.expect("defaults serialize")).expect("defaults render")
}

fn build_config(experiment: Experiment, args: &RunArgs) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let parsed = RunConfig::from_json(&text)?;
            if parsed.experiment != experiment {
                bail!(
                    "config file is for '{}' but the '{}' subcommand was invoked",
                    parsed.experiment.name(),
                    experiment.name()
                );
            }
            parsed
        }
        None => RunConfig::new(experiment),
    };
    config.apply_overrides(&args.set)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.output_dir = Some(out.clone());
    }
    Ok(config)
}

fn execute() -> Result<()> {
    if let Ok(threads) = std::env::var("COPYSIM_THREADS") {
        let n: usize = threads
            .parse()
            .context("COPYSIM_THREADS must be a positive integer")?;
        copysim::exec::configure_threads(n.max(1));
    }

    let cli = Cli::parse();
    match &cli.command {
        Command::Recipes => {
            print!("{}", recipes::render_recipes());
            Ok(())
        }
        command => {
            let (experiment, args) = command.experiment().expect("run subcommand");
            if args.defaults {
                println!("{}", defaults_json(experiment));
                return Ok(());
            }
            let config = build_config(experiment, args)?;
            let (manifest, dir) = runner::run(&config)?;
            println!("run complete: {}", dir.display());
            for output in &manifest.outputs {
                println!("  {}  {}", &output.sha256[..12], output.name);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let payload = serde_json::json!({
                "error": {
                    "message": format!("{err:#}"),
                }
            });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}
