//! Command-line front end for the jump and balance design studies.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use monotrack_cli::config::{self, parse_config, parse_config_str, ExperimentConfig, StudySpec};
use monotrack_cli::runner;

#[derive(Parser)]
#[command(
    name = "monotrack",
    about = "Jump and single-wheel-balance design studies for a bicycle-style robot",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment config (JSON). Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweep points.
    #[arg(long, default_value_t = 2)]
    workers: usize,
    /// Exit nonzero if any sweep point fails.
    #[arg(long)]
    strict: bool,
    /// Recorded in the manifest; the studies are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one jump and emit its trace, metrics, and plot.
    Jump(RunArgs),
    /// Link-mass sensitivity sweep.
    SweepMass(RunArgs),
    /// Gear-ratio landscape over both drives.
    SweepGear(RunArgs),
    /// Gross-scale study (single or coupled q_h drive).
    SweepScale(RunArgs),
    /// Out-of-plane axis orientation sweep.
    BalancePsi(RunArgs),
    /// Extra-DoF effort comparison.
    BalanceDof(RunArgs),
    /// Parse and validate a config without running anything.
    Validate {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
    },
}

fn default_study(name: &str) -> StudySpec {
    let text = format!(r#"{{ "study": {{ "kind": "{name}" }} }}"#);
    parse_config_str(&text).expect("default study parses").study
}

fn load_config(args: &RunArgs, study_name: &str) -> Result<ExperimentConfig, String> {
    let mut config = match &args.config {
        Some(path) => parse_config(path).map_err(|e| e.to_string())?,
        None => ExperimentConfig {
            morphology: monotrack_core::MorphologySpec::nominal(),
            simulation: monotrack_core::SimConfig::default(),
            study: default_study(study_name),
            output: config::OutputSpec::default(),
            seed: 0,
        },
    };
    if config.study.name() != study_name {
        return Err(format!(
            "config selects study \"{}\" but the {study_name} command was invoked",
            config.study.name()
        ));
    }
    config.seed = args.seed;
    Ok(config)
}

fn execute(args: RunArgs, study_name: &str) -> ExitCode {
    let config = match load_config(&args, study_name) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("{message}");
            return ExitCode::from(2);
        }
    };
    match runner::run(&config, &args.out, args.workers, args.strict) {
        Ok(manifest) => {
            println!(
                "{}: {} points, {} failed, {:.2}s -> {}",
                manifest.study,
                manifest.points_total,
                manifest.points_failed,
                manifest.duration_seconds,
                args.out.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Jump(args) => execute(args, "jump"),
        Command::SweepMass(args) => execute(args, "sweep-mass"),
        Command::SweepGear(args) => execute(args, "sweep-gear"),
        Command::SweepScale(args) => execute(args, "sweep-scale"),
        Command::BalancePsi(args) => execute(args, "balance-psi"),
        Command::BalanceDof(args) => execute(args, "balance-dof"),
        Command::Validate { config } => match parse_config(&config) {
            Ok(parsed) => {
                println!("ok: study {}", parsed.study.name());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(2)
            }
        },
    }
}
