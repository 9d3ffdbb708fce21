//! `simulate`: one solver run with envelope comparison and rate fits.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use weighted_diffusion::fit::{fit_rates, FitWindow, RateModel};
use weighted_diffusion::solver::{Checkpoint, Solver};
use weighted_diffusion::{Envelope, FitReport, Trajectory};

use crate::config::{CheckpointFormat, ExperimentConfig};
use crate::output::{num, opt, Table};
use crate::Outcome;

/// A finished run with its fits; a refused fit keeps the reason.
pub struct RunResult {
    pub trajectory: Trajectory,
    pub envelope: Option<Envelope>,
    pub support_fit: Result<FitReport, String>,
    pub sup_fit: Result<FitReport, String>,
    pub solver: Solver<f64>,
    pub final_state: weighted_diffusion::State,
}

/// Runs the solver (optionally from a checkpoint) and fits both envelopes.
pub fn execute(cfg: &ExperimentConfig, allow_unweighted: bool) -> Result<RunResult> {
    let mut config = cfg.solver_config(allow_unweighted)?;
    let checkpoint = cfg.solver.resume.as_deref().map(read_checkpoint).transpose()?;
    if let Some(cp) = &checkpoint {
        // The domain may have been doubled before the checkpoint was taken.
        config.grid.r_max = *cp.faces.last().context("checkpoint has no faces")?;
        config.grid.n_cells = cp.u.len();
    }
    let eq = config.eq;
    let weight = config.weight.weight().cloned();
    let mut solver = Solver::new(config)?;
    let mut state = match &checkpoint {
        Some(cp) => solver.restore(cp).context("restoring the checkpoint")?,
        None => solver.initial_state()?,
    };
    let trajectory = solver.run_from(&mut state)?;
    let s = &cfg.solver;
    let fit = |model, decades| {
        fit_rates(
            &trajectory,
            model,
            weight.as_ref(),
            &eq,
            FitWindow::LastDecades(decades),
        )
        .map_err(|e| e.to_string())
    };
    let support_fit = fit(RateModel::SupportEnvelope, s.fit_support_decades);
    let sup_fit = fit(RateModel::SupEnvelope, s.fit_sup_decades);
    let envelope = match weight {
        Some(w) => Some(Envelope::new(eq, w, trajectory.mass0)?),
        None => None,
    };
    Ok(RunResult {
        trajectory,
        envelope,
        support_fit,
        sup_fit,
        solver,
        final_state: state,
    })
}

fn read_checkpoint(path: &Path) -> Result<Checkpoint<f64>> {
    let file = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    let cp = if path.extension().is_some_and(|e| e == "bin") {
        Checkpoint::read_binary(file)
    } else {
        Checkpoint::read_text(file)
    };
    cp.with_context(|| format!("reading {}", path.display()))
}

pub const TRAJECTORY_COLUMNS: [&str; 5] = ["t", "sup_u", "support_radius", "mass", "dt_last"];
pub const ENVELOPE_COLUMNS: [&str; 7] = [
    "t",
    "sup_u",
    "sup_envelope",
    "sup_ratio",
    "support_radius",
    "support_envelope",
    "support_ratio",
];
pub const FIT_COLUMNS: [&str; 13] = [
    "model",
    "status",
    "t_lo",
    "t_hi",
    "points",
    "slope",
    "expected_slope",
    "slope_rel_error",
    "c_fit",
    "ratio_min",
    "ratio_max",
    "band",
    "detail",
];

pub fn trajectory_table(traj: &Trajectory) -> Table {
    let mut t = Table::new(&TRAJECTORY_COLUMNS);
    for d in &traj.rows {
        t.push(vec![
            num(d.t),
            num(d.sup_u),
            num(d.support_radius),
            num(d.mass),
            num(d.dt_last),
        ]);
    }
    t
}

/// Measured values beside the unit-prefactor envelopes; envelope cells are
/// empty where an envelope is undefined (no weight, or before the gate).
pub fn envelope_table(run: &RunResult) -> Table {
    let mut t = Table::new(&ENVELOPE_COLUMNS);
    for d in &run.trajectory.rows {
        let (sup_env, supp_env) = match &run.envelope {
            Some(e) => (e.sup_envelope(d.t).ok(), e.support_envelope(d.t).ok()),
            None => (None, None),
        };
        t.push(vec![
            num(d.t),
            num(d.sup_u),
            opt(sup_env),
            opt(sup_env.map(|e| d.sup_u / e)),
            num(d.support_radius),
            opt(supp_env),
            opt(supp_env.map(|e| d.support_radius / e)),
        ]);
    }
    t
}

pub fn fit_table(run: &RunResult) -> Table {
    let mut t = Table::new(&FIT_COLUMNS);
    for (model, fit) in [
        (RateModel::SupportEnvelope, &run.support_fit),
        (RateModel::SupEnvelope, &run.sup_fit),
    ] {
        match fit {
            Ok(f) => t.push(vec![
                model.name().into(),
                "ok".into(),
                num(f.t_lo),
                num(f.t_hi),
                f.points.to_string(),
                num(f.slope),
                opt(f.expected_slope),
                opt(f.slope_rel_error()),
                num(f.c_fit),
                num(f.ratio_min),
                num(f.ratio_max),
                num(f.band()),
                String::new(),
            ]),
            Err(msg) => {
                let mut row = vec![model.name().into(), "refused".into()];
                row.extend(std::iter::repeat_n(String::new(), FIT_COLUMNS.len() - 3));
                row.push(msg.clone());
                t.push(row);
            }
        }
    }
    t
}

/// Writes the checkpoint of the final state, if configured.
pub fn write_checkpoint(run: &RunResult, format: CheckpointFormat, out: &Path) -> Result<PathBuf> {
    let cp = run.solver.checkpoint(&run.final_state);
    let path = out.join(match format {
        CheckpointFormat::Text => "checkpoint.txt",
        CheckpointFormat::Binary => "checkpoint.bin",
    });
    let file = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    match format {
        CheckpointFormat::Text => cp.write_text(file)?,
        CheckpointFormat::Binary => cp.write_binary(file)?,
    }
    Ok(path)
}

/// Writes `trajectory.csv`, `envelopes.csv` and `fit_summary.csv`.
pub fn run(cfg: &ExperimentConfig, out: &Path, allow_unweighted: bool) -> Result<Outcome> {
    let result = execute(cfg, allow_unweighted)?;
    let mut files = vec![
        trajectory_table(&result.trajectory).write(out, "trajectory.csv", cfg.seed)?,
        envelope_table(&result).write(out, "envelopes.csv", cfg.seed)?,
        fit_table(&result).write(out, "fit_summary.csv", cfg.seed)?,
    ];
    if let Some(format) = cfg.solver.checkpoint {
        files.push(write_checkpoint(&result, format, out)?);
    }
    let traj = &result.trajectory;
    let last = traj.rows.last().context("empty trajectory")?;
    let mut lines = vec![format!(
        "t = {:.6e}, sup u = {:.6e}, support = {:.6e}, steps = {}, mass drift = {:.3e}",
        last.t,
        last.sup_u,
        last.support_radius,
        traj.steps,
        traj.max_mass_drift()
    )];
    for (name, fit) in [("support", &result.support_fit), ("sup", &result.sup_fit)] {
        lines.push(match fit {
            Ok(f) => format!(
                "{name} fit: slope {:.6} (expected {}), c_fit {:.6e}, band {:.4}",
                f.slope,
                f.expected_slope.map_or("n/a".into(), |e| format!("{e:.6}")),
                f.c_fit,
                f.band()
            ),
            Err(msg) => format!("{name} fit refused: {msg}"),
        });
    }
    Ok(Outcome {
        passed: true,
        lines,
        files,
    })
}
