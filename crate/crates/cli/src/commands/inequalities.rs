//! `inequalities`: certifies the selected inequalities against test families.

use std::path::Path;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weighted_diffusion::checks::{log_grid, ValidationReport};
use weighted_diffusion::inequality::{
    f_profile_check, family_in_ball, lambda_comparison_check, sobolev_profile_checks, standard_family,
    verify_inequality, InequalityKind, TestFunction,
};
use weighted_diffusion::{Equation, InequalityReport, Weight};

use crate::config::ExperimentConfig;
use crate::output::{num, opt, Table};
use crate::Outcome;

/// `count` bumps `A(1 − (r/ρ)²)₊^k` with `ρ ∈ [0.05R, R)`, `k ∈ {1..4}`,
/// `A ∈ [0.1, 10)`, drawn from a ChaCha8 stream seeded by `(seed, R)`.
pub fn random_bumps(seed: u64, radius: f64, count: usize) -> Vec<TestFunction<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ radius.to_bits());
    (0..count)
        .map(|_| TestFunction::Bump {
            radius: radius * rng.random_range(0.05..1.0),
            k: rng.random_range(1..=4),
            amplitude: rng.random_range(0.1..10.0),
        })
        .collect()
}

/// The family used for one inequality.
pub fn family_for(kind: &InequalityKind<f64>, seed: u64, random: usize) -> Vec<TestFunction<f64>> {
    match *kind {
        InequalityKind::BoundedSobolev { radius, .. } => {
            let mut fam = family_in_ball(radius);
            fam.extend(random_bumps(seed, radius, random));
            fam
        }
        _ => standard_family(),
    }
}

fn parameter(kind: &InequalityKind<f64>) -> (String, String) {
    match *kind {
        InequalityKind::Poincare => (String::new(), String::new()),
        InequalityKind::RadialSobolev { q, r0 } => (num(q), num(r0)),
        InequalityKind::BoundedSobolev { q, radius } => (num(q), num(radius)),
    }
}

/// Profile checks attached to one inequality.
pub fn profile_checks(kind: &InequalityKind<f64>, w: &Weight, eq: &Equation) -> Result<Vec<ValidationReport>> {
    Ok(match *kind {
        InequalityKind::Poincare => Vec::new(),
        InequalityKind::RadialSobolev { q, r0 } => {
            let (_, mut reps) = sobolev_profile_checks(w, eq, q, r0)?;
            reps.push(f_profile_check(w, eq, q, &log_grid(1e-3, 1e3, 200))?);
            reps
        }
        InequalityKind::BoundedSobolev { radius, .. } => vec![lambda_comparison_check(w, radius, 200)?],
    })
}

/// Writes `inequalities.csv` (one row per inequality and test function),
/// `inequality_summary.csv`, `profile_checks.csv` and `criterion_profile.csv`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let kinds = cfg.inequality_kinds()?;
    let w = cfg.require_weight()?;
    let eq = cfg.equation()?;
    let (label, n, p) = (w.label(), eq.dim_n().to_string(), num(eq.p()));

    let mut rows = Table::new(&[
        "kind",
        "weight",
        "N",
        "p",
        "q",
        "param",
        "function",
        "lhs",
        "rhs",
        "ratio",
        "certified",
        "verdict",
    ]);
    let mut summary = Table::new(&[
        "kind",
        "weight",
        "N",
        "p",
        "q",
        "param",
        "beta_sup",
        "stated_bound",
        "kqp",
        "certified",
        "numeric_constant",
        "worst_ratio",
        "functions",
        "verdict",
    ]);
    let mut checks = Table::new(&[
        "kind",
        "param",
        "check",
        "verdict",
        "worst_violation",
        "worst_at",
        "tolerance",
        "points",
    ]);
    let mut samples = Table::new(&["kind", "param", "r", "value"]);
    let (mut passed, mut lines) = (true, Vec::new());

    for kind in &kinds {
        let family = family_for(kind, cfg.seed, cfg.inequalities.random_bumps);
        let report: InequalityReport = verify_inequality(*kind, &w, &eq, &family)?;
        let (q, param) = parameter(kind);
        for row in &report.rows {
            let ok = row.ratio <= report.certified * (1.0 + weighted_diffusion::inequality::VERDICT_SLACK);
            rows.push(vec![
                kind.name().into(),
                label.clone(),
                n.clone(),
                p.clone(),
                q.clone(),
                param.clone(),
                row.label.clone(),
                num(row.lhs),
                num(row.rhs),
                num(row.ratio),
                num(report.certified),
                if ok { "PASS" } else { "FAIL" }.into(),
            ]);
        }
        summary.push(vec![
            kind.name().into(),
            label.clone(),
            n.clone(),
            p.clone(),
            q.clone(),
            param.clone(),
            opt(report.beta_sup),
            num(report.stated_bound),
            opt(report.kqp),
            num(report.certified),
            opt(report.numeric_constant),
            num(report.worst_ratio),
            report.rows.len().to_string(),
            report.verdict().into(),
        ]);
        passed &= report.passed;
        lines.push(format!(
            "{} {} param={} worst_ratio={:.6e} certified={:.6e}",
            report.verdict(),
            kind.name(),
            param,
            report.worst_ratio,
            report.certified
        ));
        for &(r, v) in &report.samples {
            samples.push(vec![kind.name().into(), param.clone(), num(r), num(v)]);
        }
        for rep in profile_checks(kind, &w, &eq)? {
            passed &= rep.passed();
            lines.push(format!(
                "{} {} param={} {}",
                rep.verdict(),
                kind.name(),
                param,
                rep.check
            ));
            checks.push(vec![
                kind.name().into(),
                param.clone(),
                rep.check.clone(),
                rep.verdict().into(),
                num(rep.worst_violation),
                num(rep.worst_at),
                num(rep.tolerance),
                rep.points.to_string(),
            ]);
        }
    }
    let files = vec![
        rows.write(out, "inequalities.csv", cfg.seed)?,
        summary.write(out, "inequality_summary.csv", cfg.seed)?,
        checks.write(out, "profile_checks.csv", cfg.seed)?,
        samples.write(out, "criterion_profile.csv", cfg.seed)?,
    ];
    Ok(Outcome { passed, lines, files })
}
