//! Validators for the structural hypotheses on a weight.
//!
//! Every validator samples a grid and reports the worst relative violation
//! rather than failing fast, so a report can be written even for a weight
//! that is not admissible.

use crate::error::Result;
use crate::scalar::{lit, wide, Real};
use crate::weight::{EquationParams, WeightKind, WeightSpec};

/// Default relative tolerance for pointwise inequality checks.
pub const ENVELOPE_TOL: f64 = 1e-10;
/// Tolerance for finite-difference monotonicity checks (relative slope).
pub const MONOTONE_TOL: f64 = 1e-6;
/// Relative finite-difference step `h = 1e-5·s`.
pub const FD_STEP: f64 = 1e-5;

/// Outcome of one sampled check.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub check: String,
    /// Worst relative violation found (0 when the inequality holds everywhere).
    pub worst_violation: f64,
    /// Sample point where the worst violation occurred.
    pub worst_at: f64,
    pub tolerance: f64,
    pub points: usize,
    /// False when the hypothesis guaranteeing the property does not hold;
    /// the check still runs and its numbers are reported.
    pub applicable: bool,
}

impl ValidationReport {
    pub(crate) fn new(check: impl Into<String>, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            worst_violation: 0.0,
            worst_at: f64::NAN,
            tolerance,
            points: 0,
            applicable: true,
        }
    }

    pub(crate) fn record(&mut self, at: f64, violation: f64) {
        self.points += 1;
        let violation = if violation.is_nan() { f64::INFINITY } else { violation };
        if violation > self.worst_violation || self.worst_at.is_nan() {
            self.worst_violation = violation.max(0.0);
            self.worst_at = at;
        }
    }

    /// Whether the sampled property held within tolerance.
    pub fn holds(&self) -> bool {
        self.worst_violation <= self.tolerance
    }

    /// PASS unless the check is applicable and violated.
    pub fn passed(&self) -> bool {
        !self.applicable || self.holds()
    }

    pub fn verdict(&self) -> &'static str {
        match (self.applicable, self.holds()) {
            (_, true) => "PASS",
            (true, false) => "FAIL",
            (false, false) => "N/A",
        }
    }
}

/// Log-spaced grid of `n ≥ 2` points on `[lo, hi]`.
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(
        n >= 2 && lo > T::zero() && hi > lo,
        "log grid needs 0 < lo < hi and n >= 2"
    );
    let (a, b) = (lo.ln(), hi.ln());
    let last: T = lit((n - 1) as f64);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + (b - a) * lit::<T>(i as f64) / last).exp()
            }
        })
        .collect()
}

pub(crate) fn excess<T: Real>(value: T, bound: T) -> f64 {
    // Relative amount by which `value` exceeds `bound`.
    let scale = bound.abs().max(value.abs()).max(T::min_positive_value());
    wide(((value - bound) / scale).max(T::zero()))
}

/// Checks `α₁ g(s)/s ≤ g'(s) ≤ α₂ g(s)/s` on a sorted positive grid.
pub fn validate_envelope<T: Real>(w: &WeightSpec<T>, samples: &[T]) -> ValidationReport {
    let mut rep = ValidationReport::new("envelope a1*g/s <= g' <= a2*g/s", ENVELOPE_TOL);
    for &s in samples {
        let gs = w.g(s) / s;
        let gp = w.g_prime(s);
        let lower = excess(w.alpha1() * gs, gp);
        let upper = excess(gp, w.alpha2() * gs);
        rep.record(wide(s), lower.max(upper));
    }
    rep
}

/// Checks `g(s)s/(α₂+1) ≤ ∫₀ˢ g ≤ g(s)s/(α₁+1)`.
pub fn validate_sandwich<T: Real>(w: &WeightSpec<T>, samples: &[T]) -> Result<ValidationReport> {
    let mut rep = ValidationReport::new("sandwich g*s/(a2+1) <= int_0^s g <= g*s/(a1+1)", ENVELOPE_TOL);
    for &s in samples {
        let integral = w.primitive(s)?;
        let gs = w.g(s) * s;
        let lower = excess(gs / (w.alpha2() + T::one()), integral);
        let upper = excess(integral, gs / (w.alpha1() + T::one()));
        rep.record(wide(s), lower.max(upper));
    }
    Ok(rep)
}

/// Checks `α₁/(α₁+1)·g/s ≤ Λ ≤ α₂/(α₂+1)·g/s`.
pub fn validate_lambda_bounds<T: Real>(w: &WeightSpec<T>, samples: &[T]) -> Result<ValidationReport> {
    let mut rep = ValidationReport::new("lambda bounds a1/(a1+1) g/s <= G' <= a2/(a2+1) g/s", ENVELOPE_TOL);
    let (a1, a2) = (w.alpha1(), w.alpha2());
    for &s in samples {
        let lam = w.lambda(s)?;
        let gs = w.g(s) / s;
        let lower = excess(a1 / (a1 + T::one()) * gs, lam);
        let upper = excess(lam, a2 / (a2 + T::one()) * gs);
        rep.record(wide(s), lower.max(upper));
    }
    Ok(rep)
}

/// Checks the inverse scaling laws
/// `g⁻¹(z)λ^{1/α₂} ≤ g⁻¹(zλ) ≤ g⁻¹(z)λ^{1/α₁}` for `λ > 1` and the mirrored
/// bounds for `λ < 1`, on every pair from `zs × lambdas`.
pub fn validate_inverse_scaling<T: Real>(w: &WeightSpec<T>, zs: &[T], lambdas: &[T]) -> Result<ValidationReport> {
    let mut rep = ValidationReport::new("inverse scaling of g^-1 under z -> lambda*z", ENVELOPE_TOL);
    let (e1, e2) = (T::one() / w.alpha1(), T::one() / w.alpha2());
    for &z in zs {
        let base = w.invert_g(z)?;
        for &lam in lambdas {
            let scaled = w.invert_g(z * lam)?;
            let (lo, hi) = if lam > T::one() {
                (base * lam.powf(e2), base * lam.powf(e1))
            } else {
                (base * lam.powf(e1), base * lam.powf(e2))
            };
            let v = excess(lo, scaled).max(excess(scaled, hi));
            rep.record(wide(z * lam), v);
        }
    }
    Ok(rep)
}

/// Flags for the closed-form structural conditions on `(α₁, α₂, N, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionReport {
    /// `(N−p)α₁/(α₁+1) + (p−1)(α₁ − α₂/(α₂+1)) ≥ 0`.
    pub cond_nn: bool,
    /// `(N+1)α₁/(α₁+1) ≥ α₂`.
    pub cond_p: bool,
    /// `1 > α₂ ≥ α₁ ≥ α₂/(α₂+1)` (range required by the sup estimate).
    pub alpha_range_sur_n: bool,
    /// `1 ≥ α₂ > α₁ ≥ α₂/(α₂+1)` with `N ≥ 2` (sufficient range for both conditions).
    pub alpha_range_sufficient: bool,
    pub alpha2_lt_1: bool,
    /// `α₂ < min(N, p/(p−1))`.
    pub alpha2_lt_min: bool,
}

pub fn check_structural_conditions<T: Real>(w: &WeightSpec<T>, eq: &EquationParams<T>) -> ConditionReport {
    let (a1, a2) = (w.alpha1(), w.alpha2());
    let (n, p) = (eq.n(), eq.p());
    let one = T::one();
    let nn = (n - p) * a1 / (a1 + one) + (p - one) * (a1 - a2 / (a2 + one));
    let pp = (n + one) * a1 / (a1 + one) - a2;
    ConditionReport {
        cond_nn: nn >= T::zero(),
        cond_p: pp >= T::zero(),
        alpha_range_sur_n: one > a2 && a2 >= a1 && a1 >= a2 / (a2 + one),
        alpha_range_sufficient: one >= a2 && a2 > a1 && a1 >= a2 / (a2 + one) && eq.dim_n() >= 2,
        alpha2_lt_1: a2 < one,
        alpha2_lt_min: a2 < n.min(eq.p_conjugate()),
    }
}

/// Monotonicity direction expected of a sampled quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Trend {
    NonDecreasing,
    NonIncreasing,
}

fn monotone_check<T: Real>(
    name: &str,
    trend: Trend,
    applicable: bool,
    grid: &[T],
    quantity: impl Fn(T) -> Result<T>,
) -> Result<ValidationReport> {
    let mut rep = ValidationReport::new(name, MONOTONE_TOL);
    rep.applicable = applicable;
    let step: T = lit(FD_STEP);
    for &s in grid {
        let h = step * s;
        let q0 = quantity(s)?;
        let qp = quantity(s + h)?;
        let qm = quantity(s - h)?;
        // Relative logarithmic slope s·Q'/Q.
        let slope = (qp - qm) / (lit::<T>(2.0) * h) * s / q0.abs().max(T::min_positive_value());
        let signed = match trend {
            Trend::NonDecreasing => -slope,
            Trend::NonIncreasing => slope,
        };
        rep.record(wide(s), wide(signed.max(T::zero())));
    }
    Ok(rep)
}

/// Finite-difference checks of the monotone quantities built from `Λ`:
///
/// * `Λ^{p−1} s^{N−1}` non-decreasing (guaranteed by `cond_nn`),
/// * `Λ^{−1} s^{−(N−1)/(p−1)}` non-increasing (guaranteed by `cond_nn`),
/// * `Λ^{−1} s^{N−1}` non-decreasing (guaranteed by `cond_p`),
/// * `g(s)s^{−α₁}` non-decreasing and `g(s)s^{−α₂}` non-increasing (always).
pub fn check_monotone_quantities<T: Real>(
    w: &WeightSpec<T>,
    eq: &EquationParams<T>,
    grid: &[T],
) -> Result<Vec<ValidationReport>> {
    let cond = check_structural_conditions(w, eq);
    let (n, p) = (eq.n(), eq.p());
    let one = T::one();
    Ok(vec![
        monotone_check(
            "Lambda^(p-1) s^(N-1) non-decreasing",
            Trend::NonDecreasing,
            cond.cond_nn,
            grid,
            |s| Ok(w.lambda(s)?.powf(p - one) * s.powf(n - one)),
        )?,
        monotone_check(
            "Lambda^-1 s^-((N-1)/(p-1)) non-increasing",
            Trend::NonIncreasing,
            cond.cond_nn,
            grid,
            |s| Ok(s.powf(-(n - one) / (p - one)) / w.lambda(s)?),
        )?,
        monotone_check(
            "Lambda^-1 s^(N-1) non-decreasing",
            Trend::NonDecreasing,
            cond.cond_p,
            grid,
            |s| Ok(s.powf(n - one) / w.lambda(s)?),
        )?,
        monotone_check("g(s) s^-a1 non-decreasing", Trend::NonDecreasing, true, grid, |s| {
            Ok(w.g(s) * s.powf(-w.alpha1()))
        })?,
        monotone_check("g(s) s^-a2 non-increasing", Trend::NonIncreasing, true, grid, |s| {
            Ok(w.g(s) * s.powf(-w.alpha2()))
        })?,
    ])
}

/// One row of the Zygmund inverse asymptotics table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRow<T> {
    pub tau: T,
    pub inverse: T,
    /// `A(τ) = g⁻¹(τ)·α^{−β/α} τ^{−1/α} (log τ)^{β/α}`, which tends to 1.
    pub a: T,
}

/// Tabulates the correction factor `A(τ)` of the Zygmund inverse against its
/// leading-order form `α^{β/α} τ^{1/α} (log τ)^{−β/α}`.
pub fn zygmund_inverse_asymptotics<T: Real>(alpha: T, beta: T, c: T, taus: &[T]) -> Result<Vec<AsymptoticRow<T>>> {
    let w = WeightSpec::zygmund(alpha, beta, c)?;
    taus.iter()
        .map(|&tau| {
            if !(tau > T::E()) {
                return Err(crate::error::Error::InvalidParameter(format!(
                    "asymptotic table needs tau > e, got {tau}"
                )));
            }
            let inverse = w.invert_g(tau)?;
            let a = inverse * alpha.powf(-beta / alpha) * tau.powf(-T::one() / alpha) * tau.ln().powf(beta / alpha);
            Ok(AsymptoticRow { tau, inverse, a })
        })
        .collect()
}

/// Whether the weight is one of the built-in families (closed-form checks are exact there).
pub fn is_builtin<T: Real>(w: &WeightSpec<T>) -> bool {
    !matches!(w.kind(), WeightKind::Custom { .. })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn grid() -> Vec<f64> {
        log_grid(1e-3, 1e3, 200)
    }

    #[test]
    fn power_envelope_is_saturated() {
        for alpha in [0.3, 0.5, 1.0, 1.7] {
            let w = WeightSpec::power(alpha).unwrap();
            let rep = validate_envelope(&w, &grid());
            assert!(rep.passed(), "{rep:?}");
            assert!(rep.worst_violation < 1e-14);
        }
    }

    #[test]
    fn zygmund_envelope_passes() {
        let w = WeightSpec::zygmund(0.5, 1.0, 2.0).unwrap();
        assert!(validate_envelope(&w, &grid()).passed());
    }

    #[test]
    fn expm1_weight_fails_envelope() {
        // s·g'/g = s e^s/(e^s − 1) ≈ 10 at s = 10, beyond any declared α₂ below 10.
        let w = WeightSpec::custom(
            "expm1",
            Arc::new(|s: f64| s.exp_m1()),
            Arc::new(|s: f64| s.exp()),
            1.0,
            2.0,
        )
        .unwrap();
        let samples = log_grid(1e-3, 10.0, 100);
        let rep = validate_envelope(&w, &samples);
        assert!(!rep.passed());
        let ratio = 10.0 * 10f64.exp() / 10f64.exp_m1();
        assert!(ratio > 9.99);
        assert_eq!(rep.worst_at, 10.0);
    }

    #[test]
    fn structural_condition_examples() {
        let eq = EquationParams::new(3, 2.0, 2.0).unwrap();
        let w = WeightSpec::power(0.5).unwrap();
        let c = check_structural_conditions(&w, &eq);
        assert!(c.cond_nn && c.cond_p && c.alpha_range_sur_n && c.alpha2_lt_1 && c.alpha2_lt_min);

        let skew = WeightSpec::custom("skew", Arc::new(|s: f64| s), Arc::new(|_| 1.0), 0.1, 0.9).unwrap();
        let c = check_structural_conditions(&skew, &eq);
        assert!(!c.alpha_range_sur_n);
    }

    #[test]
    fn equal_exponents_satisfy_both_conditions() {
        for (n, p) in [(2, 1.5), (3, 2.0), (4, 3.5), (5, 1.1)] {
            let eq = EquationParams::new(n, p, 2.0).unwrap();
            for alpha in [0.1, 0.5, 0.99] {
                let c = check_structural_conditions(&WeightSpec::power(alpha).unwrap(), &eq);
                assert!(c.cond_nn && c.cond_p, "n={n} p={p} alpha={alpha}");
            }
        }
    }

    #[test]
    fn monotone_quantities_power() {
        let eq = EquationParams::new(3, 2.0, 2.0).unwrap();
        let w = WeightSpec::power(0.5).unwrap();
        let reps = check_monotone_quantities(&w, &eq, &grid()).unwrap();
        assert_eq!(reps.len(), 5);
        for r in &reps {
            assert!(r.applicable && r.passed(), "{r:?}");
        }
    }

    #[test]
    fn monotone_check_runs_when_condition_fails() {
        // cond_nn fails for α₁ = 0.1, α₂ = 0.9, N = 2, p = 1.9.
        let eq = EquationParams::new(2, 1.9, 2.0).unwrap();
        let w = WeightSpec::custom(
            "two-power",
            Arc::new(|s: f64| s.powf(0.1) + s.powf(0.9)),
            Arc::new(|s: f64| 0.1 * s.powf(-0.9) + 0.9 * s.powf(-0.1)),
            0.1,
            0.9,
        )
        .unwrap();
        assert!(!check_structural_conditions(&w, &eq).cond_nn);
        let reps = check_monotone_quantities(&w, &eq, &log_grid(1e-2, 1e2, 40)).unwrap();
        assert!(!reps[0].applicable);
        assert!(reps[0].passed());
    }

    #[test]
    fn asymptotic_factor_is_exactly_one_without_log() {
        let rows = zygmund_inverse_asymptotics(1.0f64, 1e-12, 2.0, &[1e2, 1e4]).unwrap();
        for r in rows {
            assert!((r.a - 1.0).abs() < 1e-9, "{r:?}");
        }
    }
}
