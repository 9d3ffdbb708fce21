//! Adaptive Gauss–Kronrod quadrature on finite and semi-infinite intervals.
//!
//! The finite-interval driver is a global bisection scheme over 15-point
//! Kronrod panels with QUADPACK-style error estimates. Semi-infinite
//! integrals of decaying integrands are truncated where the integrand falls
//! below a fixed fraction of its sampled peak, and the cutoff is then doubled
//! until the added piece is negligible.

use crate::error::{Error, Result};
use crate::scalar::{lit, resolvable, wide, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss 7-point weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and limits for the adaptive driver.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_panels: 4000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Value of an integral together with its estimated absolute error.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error: T,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    resabs: T,
    splittable: bool,
}

fn kronrod<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Panel<T> {
    let half = (b - a) * lit(0.5);
    let center = (a + b) * lit(0.5);
    let f_center = f(center);
    let mut res_k = f_center * lit(WGK[7]);
    let mut res_g = f_center * lit(WG[3]);
    let mut res_abs = f_center.abs() * lit(WGK[7]);
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w: T = lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + lit::<T>(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * lit(0.5);
    let mut res_asc = lit::<T>(WGK[7]) * (f_center - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + lit::<T>(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != T::zero() && error != T::zero() {
        let ratio: T = (error * lit(200.0) / res_asc).powf(lit(1.5));
        error = res_asc * ratio.min(T::one());
    }
    let eps50 = T::epsilon() * lit(50.0);
    if res_abs > T::min_positive_value() / eps50 {
        error = error.max(eps50 * res_abs);
    }
    let width_floor = (a.abs().max(b.abs())) * T::epsilon() * lit(1000.0);
    Panel {
        a,
        b,
        value,
        error,
        resabs: res_abs,
        splittable: (b - a).abs() > width_floor.max(T::min_positive_value()),
    }
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, opts: QuadOptions) -> Result<QuadResult<T>> {
    integrate_with_breaks(f, &[a, b], opts)
}

/// Adaptive integral over `[breaks[0], breaks[last]]`, seeding one panel per
/// consecutive pair of break points.
pub fn integrate_with_breaks<T: Real, F: Fn(T) -> T>(f: F, breaks: &[T], opts: QuadOptions) -> Result<QuadResult<T>> {
    if breaks.len() < 2 {
        return Err(Error::InvalidParameter(
            "quadrature needs at least two break points".into(),
        ));
    }
    if breaks.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("quadrature bounds must be finite".into()));
    }
    let rel_tol: T = resolvable(opts.rel_tol);
    let abs_tol: T = lit(opts.abs_tol);
    let mut panels: Vec<Panel<T>> = breaks
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| kronrod(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 15 * panels.len();
    if panels.is_empty() {
        return Ok(QuadResult {
            value: T::zero(),
            abs_error: T::zero(),
            evaluations: 0,
        });
    }
    loop {
        let total: T = panels.iter().fold(T::zero(), |s, p| s + p.value);
        let err: T = panels.iter().fold(T::zero(), |s, p| s + p.error);
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::NumericFailure {
                what: "adaptive quadrature (non-finite integrand)".into(),
                error_estimate: wide(err),
            });
        }
        let target = abs_tol.max(rel_tol * total.abs());
        if err <= target {
            return Ok(QuadResult {
                value: total,
                abs_error: err,
                evaluations,
            });
        }
        // Once every remaining panel sits on its rounding floor nothing
        // further can be gained by bisection.
        let roundoff: T = panels.iter().fold(T::zero(), |s, p| s + p.resabs) * T::epsilon() * lit(100.0);
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.splittable)
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i);
        let Some(idx) = worst else {
            return if err <= target.max(roundoff) {
                Ok(QuadResult {
                    value: total,
                    abs_error: err,
                    evaluations,
                })
            } else {
                Err(Error::NumericFailure {
                    what: "adaptive quadrature (panels reached minimal width)".into(),
                    error_estimate: wide(err),
                })
            };
        };
        if err <= roundoff {
            return Ok(QuadResult {
                value: total,
                abs_error: err,
                evaluations,
            });
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::NumericFailure {
                what: "adaptive quadrature (panel budget exhausted)".into(),
                error_estimate: wide(err),
            });
        }
        let p = panels.swap_remove(idx);
        let mid = (p.a + p.b) * lit(0.5);
        panels.push(kronrod(&f, p.a, mid));
        panels.push(kronrod(&f, mid, p.b));
        evaluations += 30;
    }
}

/// Integral of a non-negative decaying integrand over `[a, ∞)`.
///
/// The cutoff is the first point of a geometric probe sequence where the
/// integrand drops below `1e-16` of the peak sampled so far while still
/// decreasing. The cutoff is then doubled until the added piece is below the
/// relative tolerance; that last addition is folded into the error estimate.
pub fn integrate_tail<T: Real, F: Fn(T) -> T>(f: F, a: T, opts: QuadOptions) -> Result<QuadResult<T>> {
    if !a.is_finite() || a < T::zero() {
        return Err(Error::InvalidParameter(
            "tail integral needs a finite non-negative start".into(),
        ));
    }
    let cutoff_ratio: T = lit(1e-16);
    let limit: T = lit(1e12);
    let step0 = a.max(T::one()) * lit(0.25);
    let mut breaks = vec![a];
    let mut peak = f(a).abs();
    let mut prev = peak;
    let mut offset = step0;
    loop {
        let x = a + offset;
        let fx = f(x).abs();
        breaks.push(x);
        if !fx.is_finite() {
            return Err(Error::CriterionInfinite(format!(
                "integrand not finite at r = {:e}",
                wide(x)
            )));
        }
        peak = peak.max(fx);
        if fx <= peak * cutoff_ratio && fx <= prev {
            break;
        }
        if x > limit {
            return Err(Error::CriterionInfinite(format!(
                "integrand has not decayed below 1e-16 of its peak by r = {:e}",
                wide(limit)
            )));
        }
        prev = fx;
        offset = offset * lit(2.0);
    }
    let mut result = integrate_with_breaks(&f, &breaks, opts)?;
    let rel_tol: T = resolvable(opts.rel_tol);
    let mut b = *breaks.last().expect("non-empty");
    for _ in 0..60 {
        let next = b + (b - a);
        let piece = integrate(&f, b, next, opts)?;
        result.value = result.value + piece.value;
        result.abs_error = result.abs_error + piece.abs_error;
        result.evaluations += piece.evaluations;
        if piece.value.abs() <= rel_tol * result.value.abs() || piece.value == T::zero() {
            result.abs_error = result.abs_error + piece.value.abs();
            return Ok(result);
        }
        b = next;
        if b > limit {
            break;
        }
    }
    Err(Error::CriterionInfinite(
        "tail integral did not converge under cutoff doubling".into(),
    ))
}

/// Geometric break points `a + (b-a)·10^{-k}` clustering panels towards `a`,
/// for integrands with a weak singularity at the left end.
pub fn graded_breaks<T: Real>(a: T, b: T, levels: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(levels + 2);
    out.push(a);
    for k in (1..=levels).rev() {
        out.push(a + (b - a) * lit::<T>(10f64.powi(-(k as i32))));
    }
    out.push(b);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 0.0, epsilon = 1e-13);
        let r = integrate(|x: f64| x.powi(4), -1.0, 3.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, (243.0 + 1.0) / 5.0, max_relative = 1e-14);
    }

    #[test]
    fn weak_endpoint_singularity() {
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate_tail(|x: f64| (-x).exp(), 1.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, (-1.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn divergent_tail_is_reported() {
        let err = integrate_tail(|x: f64| 1.0 / (1.0 + x), 0.0, QuadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::CriterionInfinite(_)));
    }

    #[test]
    fn single_precision_runs() {
        let r = integrate(|x: f32| x.sin(), 0.0, std::f32::consts::PI, QuadOptions::rel(1e-6)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-5);
    }
}
