use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wdlab::config::{Command, ExperimentConfig};
use wdlab::{dispatch, Options};

#[derive(Parser)]
#[command(name = "wdlab", version, about = "Weighted doubly degenerate diffusion experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML experiment configuration.
    #[arg(long, global = true, default_value = "wdlab.toml")]
    config: PathBuf,
    /// Output directory for the CSV reports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for randomized test families (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Permit the g = 0 calibration mode.
    #[arg(long, global = true)]
    allow_unweighted: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Validation battery for the configured weight.
    WeightCheck,
    /// Certify the selected inequalities against test families.
    Inequalities,
    /// One solver run with envelope comparison and rate fits.
    Simulate,
    /// Cartesian sweep over (alpha, p, m).
    Sweep,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::WeightCheck => Command::WeightCheck,
        Cmd::Inequalities => Command::Inequalities,
        Cmd::Simulate => Command::Simulate,
        Cmd::Sweep => Command::Sweep,
    };
    let opts = Options {
        seed: cli.seed,
        jobs: cli.jobs.max(1),
        allow_unweighted: cli.allow_unweighted,
    };
    let result = ExperimentConfig::load(&cli.config).and_then(|cfg| dispatch(command, cfg, &cli.out, &opts));
    match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("one or more checks failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
