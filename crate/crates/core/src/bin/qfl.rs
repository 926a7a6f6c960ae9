//! Command-line entry point for config-driven experiment runs.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use qfl::harness::{preset, run_experiment, Command, ExperimentConfig, PRESETS};

#[derive(Parser)]
#[command(name = "qfl", version, about = "Blind and private training of variational quantum classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Train one classifier on one client's data.
    TrainSingle(RunArgs),
    /// Train a shared classifier over several clients with differential privacy.
    TrainFederated(RunArgs),
    /// Reconstruct a client's input from its shared gradient.
    Attack(RunArgs),
    /// Check delegated evaluation against direct simulation and audit blindness.
    UbqcSelftest(RunArgs),
    /// Single-client training over a grid of input-noise strengths.
    RobustnessSweep(RunArgs),
    /// Federated training over a grid of privacy strengths.
    DpSweep(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// `key = value` config file, or the manifest.json of an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset instead of a config file.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured backend.
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Direct,
    Mbqc,
    Ubqc,
}

impl BackendArg {
    fn tag(self) -> &'static str {
        match self {
            BackendArg::Direct => "direct",
            BackendArg::Mbqc => "mbqc",
            BackendArg::Ubqc => "ubqc",
        }
    }
}

fn resolve(command: Command, args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut config = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::load(command, &text)?
        }
        (None, Some(name)) => match preset(name) {
            Some((c, text)) if c == command => ExperimentConfig::parse(command, text)?,
            Some(_) => bail!("preset {name} belongs to another command"),
            None => {
                let names: Vec<&str> = PRESETS.iter().filter(|p| p.1 == command).map(|p| p.0).collect();
                bail!("unknown preset {name}; available: {}", names.join(", "))
            }
        },
        (None, None) => ExperimentConfig::parse(command, "")?,
    };
    if let Some(b) = args.backend {
        config.set("backend", b.tag())?;
    }
    if let Some(seed) = args.seed {
        config = config.with_seed(seed);
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Sub::TrainSingle(a) => (Command::TrainSingle, a),
        Sub::TrainFederated(a) => (Command::TrainFederated, a),
        Sub::Attack(a) => (Command::Attack, a),
        Sub::UbqcSelftest(a) => (Command::UbqcSelftest, a),
        Sub::RobustnessSweep(a) => (Command::RobustnessSweep, a),
        Sub::DpSweep(a) => (Command::DpSweep, a),
    };
    let outcome = resolve(command, args).and_then(|config| Ok(run_experiment(&config, &args.out)?));
    match outcome {
        Ok(o) => {
            println!("{}", serde_json::to_string_pretty(&o.summary).unwrap_or_default());
            if o.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("qfl: {} reported failures", command.tag());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("qfl: {e:#}");
            ExitCode::from(2)
        }
    }
}
