//! `sweep`: independent runs over `alphas × ps × ms`, aggregated in a fixed order.

use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;

use crate::commands::simulate::{execute, trajectory_table};
use crate::config::{sweep_label, ExperimentConfig};
use crate::output::{num, opt, Table};
use crate::Outcome;

pub const SWEEP_COLUMNS: [&str; 17] = [
    "index",
    "alpha",
    "p",
    "m",
    "status",
    "steps",
    "t_final",
    "sup_final",
    "support_final",
    "r_max",
    "mass_drift",
    "support_slope",
    "expected_slope",
    "slope_rel_error",
    "sup_band",
    "sup_c_fit",
    "detail",
];

struct PointResult {
    row: Vec<String>,
    trajectory: Option<Table>,
    ok: bool,
}

fn run_point(
    cfg: &ExperimentConfig,
    index: usize,
    point: (Option<f64>, f64, f64),
    allow_unweighted: bool,
) -> PointResult {
    let (alpha, p, m) = point;
    let head = vec![index.to_string(), opt(alpha), num(p), num(m)];
    let outcome = cfg
        .with_point(alpha, p, m)
        .and_then(|c| execute(&c, allow_unweighted))
        .with_context(|| sweep_label(alpha, p, m));
    match outcome {
        Ok(run) => {
            let traj = &run.trajectory;
            let last = traj.rows.last().expect("trajectory has the initial row");
            let (slope, expected, rel, mut detail) = match &run.support_fit {
                Ok(f) => (
                    num(f.slope),
                    opt(f.expected_slope),
                    opt(f.slope_rel_error()),
                    String::new(),
                ),
                Err(e) => (
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("support fit refused: {e}"),
                ),
            };
            let (band, c_fit) = match &run.sup_fit {
                Ok(f) => (num(f.band()), num(f.c_fit)),
                Err(e) => {
                    if !detail.is_empty() {
                        detail.push_str("; ");
                    }
                    detail.push_str(&format!("sup fit refused: {e}"));
                    (String::new(), String::new())
                }
            };
            let mut row = head;
            row.extend([
                "ok".into(),
                traj.steps.to_string(),
                num(last.t),
                num(last.sup_u),
                num(last.support_radius),
                num(traj.r_max),
                num(traj.max_mass_drift()),
                slope,
                expected,
                rel,
                band,
                c_fit,
                detail,
            ]);
            PointResult {
                row,
                trajectory: Some(trajectory_table(traj)),
                ok: true,
            }
        }
        Err(e) => {
            let mut row = head;
            row.push("error".into());
            row.extend(std::iter::repeat_n(String::new(), SWEEP_COLUMNS.len() - 6));
            row.push(format!("{e:#}"));
            PointResult {
                row,
                trajectory: None,
                ok: false,
            }
        }
    }
}

/// Writes `sweep.csv` and one `trajectory_<index>.csv` per successful point.
/// Rows follow the point order regardless of `jobs`. Passes iff every run
/// completed.
pub fn run(cfg: &ExperimentConfig, out: &Path, jobs: usize, allow_unweighted: bool) -> Result<Outcome> {
    let points = cfg.sweep_points();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let results: Vec<PointResult> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, &pt)| run_point(cfg, i, pt, allow_unweighted))
            .collect()
    });
    let mut table = Table::new(&SWEEP_COLUMNS);
    let (mut files, mut lines, mut passed) = (Vec::new(), Vec::new(), true);
    for (i, r) in results.into_iter().enumerate() {
        passed &= r.ok;
        lines.push(format!(
            "{} {}",
            if r.ok { "ok" } else { "error" },
            r.row[1..4].join(" ")
        ));
        if let Some(t) = r.trajectory {
            files.push(t.write(out, &format!("trajectory_{i:03}.csv"), cfg.seed)?);
        }
        table.push(r.row);
    }
    files.insert(0, table.write(out, "sweep.csv", cfg.seed)?);
    Ok(Outcome { passed, lines, files })
}
