use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stft_phase::experiment::{self, ExperimentConfig, Outcome};
use stft_phase::Result;

#[derive(Parser)]
#[command(name = "stft-phase", version, about = "Multi-window STFT phase retrieval experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summed ambiguity heatmaps, stability masks and coverage radii.
    Coverage(Common),
    /// Measure, optionally add noise, and retrieve with the configured window family.
    Retrieve(Common),
    /// Retrieve with a single Gauss window at each configured threshold.
    Baseline(Common),
    /// Peeled retrieval with randomly drawn Hermite degree sets.
    RandomStudy(Common),
    /// Randomized checks of the noise-propagation inequalities.
    VerifyBounds(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `outputs`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed, overriding `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.outputs = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Coverage(c) => experiment::cmd_coverage(&c.config()?),
        Command::Retrieve(c) => experiment::cmd_retrieve(&c.config()?),
        Command::Baseline(c) => experiment::cmd_baseline(&c.config()?),
        Command::RandomStudy(c) => experiment::cmd_random_study(&c.config()?),
        Command::VerifyBounds(c) => experiment::cmd_verify_bounds(&c.config()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            println!("manifest: {}", outcome.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
