//! Rate fits of solver trajectories against the large-time envelopes.
//!
//! * Support: least-squares slope of `log R(t)` against `log log(e + t M^k)`,
//!   which tends to `1/α` for a power weight.
//! * Sup: the ratio `sup u(t) / envelope(t)` at unit prefactor, its max/min
//!   band, and the prefactor fitted by least squares on the log envelope.

use crate::envelope::{EnvelopeParams, LOG_GATE};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::solver::Trajectory;
use crate::weight::{EquationParams, WeightKind, WeightSpec};

/// Minimum number of decades a fit must span.
pub const MIN_DECADES: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateModel {
    SupEnvelope,
    SupportEnvelope,
}

impl RateModel {
    pub fn name(&self) -> &'static str {
        match self {
            RateModel::SupEnvelope => "sup_envelope",
            RateModel::SupportEnvelope => "support_envelope",
        }
    }
}

/// Time window of a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitWindow<T> {
    /// The last `d` decades of the trajectory.
    LastDecades(T),
    /// Closed interval of times.
    Range(T, T),
}

#[derive(Debug, Clone)]
pub struct FitReport<T> {
    pub model: RateModel,
    pub t_lo: T,
    pub t_hi: T,
    pub points: usize,
    /// Support: slope against `log log`. Sup: slope of `log(ratio)` against `log t`.
    pub slope: T,
    pub intercept: T,
    /// `1/α` for a support fit with a power weight.
    pub expected_slope: Option<T>,
    /// Fitted envelope prefactor, `exp(mean log ratio)`.
    pub c_fit: T,
    pub ratio_min: T,
    pub ratio_max: T,
}

impl<T: Real> FitReport<T> {
    /// `max/min` of the measured-to-envelope ratio over the window.
    pub fn band(&self) -> T {
        self.ratio_max / self.ratio_min
    }

    /// `|slope − expected|/expected`, when an expected slope exists.
    pub fn slope_rel_error(&self) -> Option<T> {
        self.expected_slope.map(|e| ((self.slope - e) / e).abs())
    }
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> Result<(T, T)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::FitRefused(format!(
            "need at least two paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n: T = lit(x.len() as f64);
    let mx = x.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = y.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&xi, &yi) in x.iter().zip(y) {
        sxx = sxx + (xi - mx) * (xi - mx);
        sxy = sxy + (xi - mx) * (yi - my);
    }
    if !(sxx > T::zero()) {
        return Err(Error::FitRefused("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fits a trajectory against the sup or support envelope of `weight`.
///
/// Only rows in the large-time regime `log(t M^k) ≥ 2` are used. Unweighted
/// runs (`weight = None`) have no envelope and are refused, as are windows
/// spanning fewer than [`MIN_DECADES`] decades of large-time data.
pub fn fit_rates<T: Real>(
    traj: &Trajectory<T>,
    model: RateModel,
    weight: Option<&WeightSpec<T>>,
    eq: &EquationParams<T>,
    window: FitWindow<T>,
) -> Result<FitReport<T>> {
    let weight = weight
        .ok_or_else(|| Error::FitRefused(format!("{} is undefined without a weight (g = 0 run)", model.name())))?;
    let par = EnvelopeParams::new(*eq, weight.clone(), traj.mass0)?;
    let gate: T = lit(LOG_GATE);
    let large: Vec<_> = traj
        .rows
        .iter()
        .filter(|r| r.t > T::zero() && par.scaled_time(r.t).ln() >= gate)
        .collect();
    let (first, last) = match (large.first(), large.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => return Err(Error::FitRefused("no output times in the large-time regime".into())),
    };
    let ten: T = lit(10.0);
    let decades = |lo: T, hi: T| (hi / lo).log10();
    if decades(first, last) < lit(MIN_DECADES) {
        return Err(Error::FitRefused(format!(
            "large-time data span {:.3} decades, need {MIN_DECADES}",
            decades(first, last)
        )));
    }
    let (t_lo, t_hi) = match window {
        FitWindow::LastDecades(d) => (last / ten.powf(d), last),
        FitWindow::Range(a, b) => (a, b),
    };
    let rows: Vec<_> = large.into_iter().filter(|r| r.t >= t_lo && r.t <= t_hi).collect();
    if rows.len() < 3 {
        return Err(Error::FitRefused(format!(
            "only {} output times fall in the window",
            rows.len()
        )));
    }
    let span = decades(rows[0].t, rows[rows.len() - 1].t);

    let (x, y, ratios): (Vec<T>, Vec<T>, Vec<T>) = match model {
        RateModel::SupportEnvelope => {
            if span < lit(MIN_DECADES) {
                return Err(Error::FitRefused(format!(
                    "window spans {span:.3} decades, need {MIN_DECADES}"
                )));
            }
            let mut out = (Vec::new(), Vec::new(), Vec::new());
            for r in &rows {
                if !(r.support_radius > T::zero()) {
                    return Err(Error::FitRefused(format!("support radius is zero at t = {:e}", r.t)));
                }
                let l = (T::E() + par.scaled_time(r.t)).ln();
                out.0.push(l.ln());
                out.1.push(r.support_radius.ln());
                out.2.push(r.support_radius / par.support_envelope(r.t)?);
            }
            out
        }
        RateModel::SupEnvelope => {
            let mut out = (Vec::new(), Vec::new(), Vec::new());
            for r in &rows {
                let ratio = r.sup_u / par.sup_envelope(r.t)?;
                if !(ratio > T::zero()) {
                    return Err(Error::FitRefused(format!("sup u vanishes at t = {:e}", r.t)));
                }
                out.0.push(r.t.ln());
                out.1.push(ratio.ln());
                out.2.push(ratio);
            }
            out
        }
    };
    let (slope, intercept) = linear_fit(&x, &y)?;
    let n: T = lit(ratios.len() as f64);
    let c_fit = (ratios.iter().fold(T::zero(), |a, &r| a + r.ln()) / n).exp();
    let expected_slope = match (model, weight.kind()) {
        (RateModel::SupportEnvelope, WeightKind::Power { alpha }) => Some(T::one() / *alpha),
        _ => None,
    };
    Ok(FitReport {
        model,
        t_lo: rows[0].t,
        t_hi: rows[rows.len() - 1].t,
        points: rows.len(),
        slope,
        intercept,
        expected_slope,
        c_fit,
        ratio_min: ratios.iter().fold(T::infinity(), |a, &b| a.min(b)),
        ratio_max: ratios.iter().fold(T::zero(), |a, &b| a.max(b)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Diagnostics;
    use approx::assert_relative_eq;

    fn synthetic(c_sup: f64, c_r: f64) -> (Trajectory<f64>, WeightSpec<f64>, EquationParams<f64>) {
        let w = WeightSpec::power(0.5).unwrap();
        let eq = EquationParams::new(3, 2.0, 2.0).unwrap();
        let par = EnvelopeParams::new(eq, w.clone(), 1.0).unwrap();
        let rows = (0..=60)
            .map(|i| {
                let t = 10f64.powf(i as f64 * 0.25);
                Diagnostics {
                    t,
                    sup_u: par.sup_envelope(t).map_or(1.0, |e| c_sup * e),
                    support_radius: c_r * par.support_envelope(t).unwrap(),
                    mass: 1.0,
                    dt_last: 0.0,
                }
            })
            .collect();
        let traj = Trajectory {
            rows,
            mass0: 1.0,
            r_max: 1e9,
            steps: 0,
        };
        (traj, w, eq)
    }

    #[test]
    fn exact_envelopes_recovered() {
        let (traj, w, eq) = synthetic(3.0, 1.5);
        let s = fit_rates(
            &traj,
            RateModel::SupportEnvelope,
            Some(&w),
            &eq,
            FitWindow::LastDecades(5.0),
        )
        .unwrap();
        assert_relative_eq!(s.c_fit, 1.5, max_relative = 1e-12);
        assert!(s.band() < 1.0 + 1e-12);
        // log log(e + t) against log R = log 1.5 + 2 log log(e + t).
        assert_relative_eq!(s.slope, 2.0, max_relative = 1e-10);
        assert!(s.slope_rel_error().unwrap() < 1e-10);

        let u = fit_rates(
            &traj,
            RateModel::SupEnvelope,
            Some(&w),
            &eq,
            FitWindow::LastDecades(1.0),
        )
        .unwrap();
        assert_relative_eq!(u.c_fit, 3.0, max_relative = 1e-12);
        assert!(u.slope.abs() < 1e-12);
        assert!(u.expected_slope.is_none());
    }

    #[test]
    fn refusals() {
        let (traj, w, eq) = synthetic(1.0, 1.0);
        let short = FitWindow::Range(1e10, 1e11);
        assert!(matches!(
            fit_rates(&traj, RateModel::SupportEnvelope, Some(&w), &eq, short),
            Err(Error::FitRefused(_))
        ));
        assert!(matches!(
            fit_rates(
                &traj,
                RateModel::SupportEnvelope,
                None,
                &eq,
                FitWindow::LastDecades(5.0)
            ),
            Err(Error::FitRefused(_))
        ));
        let mut brief = traj.clone();
        brief.rows.retain(|r| r.t <= 1e2);
        assert!(matches!(
            fit_rates(
                &brief,
                RateModel::SupEnvelope,
                Some(&w),
                &eq,
                FitWindow::LastDecades(1.0)
            ),
            Err(Error::FitRefused(_))
        ));
    }

    #[test]
    fn linear_fit_exact() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let (s, i) = linear_fit(&x, &y).unwrap();
        assert_relative_eq!(s, 2.5, max_relative = 1e-14);
        assert_relative_eq!(i, -1.0, max_relative = 1e-14);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }
}
