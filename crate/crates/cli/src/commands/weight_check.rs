//! `weight-check`: the validation battery for one weight.

use std::path::Path;

use anyhow::Result;
use weighted_diffusion::checks::{
    check_monotone_quantities, check_structural_conditions, log_grid, validate_envelope, validate_inverse_scaling,
    validate_lambda_bounds, validate_sandwich, zygmund_inverse_asymptotics, ValidationReport,
};
use weighted_diffusion::weight::WeightKind;

use crate::config::ExperimentConfig;
use crate::output::{num, Table};
use crate::Outcome;

/// Runs every check, writes `weight_check.csv`, `conditions.csv` and, for a
/// Zygmund weight, `zygmund_asymptotics.csv`. Passes iff every applicable
/// check holds.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let w = cfg.require_weight()?;
    let eq = cfg.equation()?;
    let sec = &cfg.weight_check;
    let grid = log_grid(sec.s_min, sec.s_max, sec.points);
    let zs = log_grid(1e-2, 1e3, 40);
    let lambdas: Vec<f64> = log_grid(0.01, 100.0, 21).into_iter().filter(|&l| l != 1.0).collect();

    let mut reports: Vec<Result<ValidationReport, String>> = vec![Ok(validate_envelope(&w, &grid))];
    reports.push(validate_sandwich(&w, &grid).map_err(|e| format!("sandwich: {e}")));
    reports.push(validate_lambda_bounds(&w, &grid).map_err(|e| format!("Lambda bounds: {e}")));
    reports.push(validate_inverse_scaling(&w, &zs, &lambdas).map_err(|e| format!("inverse scaling: {e}")));
    let monotone_grid = log_grid(1e-2, 1e5, 120);
    match check_monotone_quantities(&w, &eq, &monotone_grid) {
        Ok(reps) => reports.extend(reps.into_iter().map(Ok)),
        Err(e) => reports.push(Err(format!("monotone quantities: {e}"))),
    }

    let mut table = Table::new(&[
        "weight",
        "check",
        "verdict",
        "worst_violation",
        "worst_at",
        "tolerance",
        "points",
        "applicable",
        "error",
    ]);
    let mut passed = true;
    let mut lines = Vec::new();
    for rep in &reports {
        match rep {
            Ok(r) => {
                passed &= r.passed();
                lines.push(format!("{} {}", r.verdict(), r.check));
                table.push(vec![
                    w.label(),
                    r.check.clone(),
                    r.verdict().into(),
                    num(r.worst_violation),
                    num(r.worst_at),
                    num(r.tolerance),
                    r.points.to_string(),
                    r.applicable.to_string(),
                    String::new(),
                ]);
            }
            Err(msg) => {
                passed = false;
                lines.push(format!("FAIL {msg}"));
                table.push(vec![
                    w.label(),
                    msg.split(':').next().unwrap_or_default().into(),
                    "FAIL".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "0".into(),
                    "true".into(),
                    msg.clone(),
                ]);
            }
        }
    }
    let mut files = vec![table.write(out, "weight_check.csv", cfg.seed)?];

    let cond = check_structural_conditions(&w, &eq);
    let mut ctable = Table::new(&["weight", "N", "p", "condition", "holds"]);
    for (name, holds) in [
        ("(N-p)a1/(a1+1) + (p-1)(a1 - a2/(a2+1)) >= 0", cond.cond_nn),
        ("(N+1)a1/(a1+1) >= a2", cond.cond_p),
        ("1 > a2 >= a1 >= a2/(a2+1)", cond.alpha_range_sur_n),
        ("1 >= a2 > a1 >= a2/(a2+1) and N >= 2", cond.alpha_range_sufficient),
        ("a2 < 1", cond.alpha2_lt_1),
        ("a2 < min(N, p/(p-1))", cond.alpha2_lt_min),
    ] {
        ctable.push(vec![
            w.label(),
            eq.dim_n().to_string(),
            num(eq.p()),
            name.into(),
            holds.to_string(),
        ]);
    }
    files.push(ctable.write(out, "conditions.csv", cfg.seed)?);

    if let WeightKind::Zygmund { alpha, beta, c } = *w.kind() {
        let rows = zygmund_inverse_asymptotics(alpha, beta, c, &sec.taus)?;
        let mut ztable = Table::new(&["tau", "inverse", "A", "abs_A_minus_1"]);
        for r in &rows {
            ztable.push(vec![num(r.tau), num(r.inverse), num(r.a), num((r.a - 1.0).abs())]);
        }
        files.push(ztable.write(out, "zygmund_asymptotics.csv", cfg.seed)?);
    }
    Ok(Outcome { passed, lines, files })
}
