//! Configuration-driven experiments over the weighted-diffusion library.
//!
//! Each subcommand validates its configuration up front, computes, and
//! writes CSV reports into an output directory.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use config::{Command, ExperimentConfig};

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// False when a check failed; the files are written either way.
    pub passed: bool,
    /// One human-readable line per check or run.
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// Options shared by all subcommands.
#[derive(Debug, Clone)]
pub struct Options {
    pub seed: Option<u64>,
    pub jobs: usize,
    pub allow_unweighted: bool,
}

/// Validates `cfg` for `command` and runs it, writing into `out`.
pub fn dispatch(command: Command, mut cfg: ExperimentConfig, out: &Path, opts: &Options) -> Result<Outcome> {
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    cfg.validate(command, opts.allow_unweighted)
        .context("invalid configuration")?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    match command {
        Command::WeightCheck => commands::weight_check::run(&cfg, out),
        Command::Inequalities => commands::inequalities::run(&cfg, out),
        Command::Simulate => commands::simulate::run(&cfg, out, opts.allow_unweighted),
        Command::Sweep => commands::sweep::run(&cfg, out, opts.jobs, opts.allow_unweighted),
    }
}
