//! The admissible weight class `f(x) = exp(g(|x|))` and the functions
//! derived from `g`.
//!
//! A weight is admissible when `g(0) = 0`, `g > 0` away from the origin and
//! its logarithmic derivative is pinched between two exponents,
//!
//! ```text
//! α₁ g(s)/s ≤ g'(s) ≤ α₂ g(s)/s,   s > 0.
//! ```
//!
//! From `g` we build the smoothed primitive `G(s) = (1/s)∫₀ˢ g`, its
//! derivative `Λ = G'` (with `Λ(0) = 0`) and `Λ' = G''`, plus the inverse
//! `g⁻¹` used by every envelope.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{graded_breaks, integrate_with_breaks, QuadOptions};
use crate::scalar::{lit, resolvable, wide, Real};

/// Shared closure type for user-supplied weights.
pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Built-in and user-supplied families of `g`.
#[derive(Clone)]
pub enum WeightKind<T> {
    /// `g(s) = s^α`.
    Power { alpha: T },
    /// `g(s) = s^α [log(c + s)]^β`.
    Zygmund { alpha: T, beta: T, c: T },
    /// User-supplied `g` and `g'`; the envelope exponents are declared, not inferred.
    Custom {
        name: String,
        g: ScalarFn<T>,
        g_prime: ScalarFn<T>,
    },
}

impl<T: fmt::Debug> fmt::Debug for WeightKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::Power { alpha } => write!(f, "Power(alpha={alpha:?})"),
            WeightKind::Zygmund { alpha, beta, c } => {
                write!(f, "Zygmund(alpha={alpha:?}, beta={beta:?}, c={c:?})")
            }
            WeightKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// An admissible weight together with its envelope exponents `α₁ ≤ α₂`.
#[derive(Debug, Clone)]
pub struct WeightSpec<T> {
    kind: WeightKind<T>,
    alpha1: T,
    alpha2: T,
    domain_cap: T,
}

const DEFAULT_DOMAIN_CAP: f64 = 1e15;

impl<T: Real> WeightSpec<T> {
    /// `g(s) = s^α`, with `α₁ = α₂ = α`.
    pub fn power(alpha: T) -> Result<Self> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power weight exponent must be positive, got {alpha}"
            )));
        }
        Ok(Self {
            kind: WeightKind::Power { alpha },
            alpha1: alpha,
            alpha2: alpha,
            domain_cap: lit(DEFAULT_DOMAIN_CAP),
        })
    }

    /// `g(s) = s^α [log(c+s)]^β`, with `α₁ = α`, `α₂ = α + β`.
    pub fn zygmund(alpha: T, beta: T, c: T) -> Result<Self> {
        if !(alpha > T::zero()) || !(beta > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "Zygmund weight needs alpha > 0 and beta > 0, got alpha={alpha}, beta={beta}"
            )));
        }
        if !(c > T::one()) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Zygmund weight needs c > 1, got c={c}"
            )));
        }
        Ok(Self {
            kind: WeightKind::Zygmund { alpha, beta, c },
            alpha1: alpha,
            alpha2: alpha + beta,
            domain_cap: lit(DEFAULT_DOMAIN_CAP),
        })
    }

    /// A user-supplied weight with declared exponents. The declaration is
    /// checked later by [`validate_envelope`](crate::checks::validate_envelope).
    pub fn custom(name: impl Into<String>, g: ScalarFn<T>, g_prime: ScalarFn<T>, alpha1: T, alpha2: T) -> Result<Self> {
        if !(alpha1 > T::zero()) || !(alpha2 >= alpha1) {
            return Err(Error::InvalidParameter(format!(
                "declared exponents must satisfy 0 < alpha1 <= alpha2, got {alpha1}, {alpha2}"
            )));
        }
        if g(T::zero()) != T::zero() {
            return Err(Error::InvalidParameter("custom weight must satisfy g(0) = 0".into()));
        }
        Ok(Self {
            kind: WeightKind::Custom {
                name: name.into(),
                g,
                g_prime,
            },
            alpha1,
            alpha2,
            domain_cap: lit(DEFAULT_DOMAIN_CAP),
        })
    }

    /// Overrides the largest `s` the inverse is allowed to search.
    pub fn with_domain_cap(mut self, cap: T) -> Self {
        self.domain_cap = cap;
        self
    }

    pub fn kind(&self) -> &WeightKind<T> {
        &self.kind
    }

    pub fn alpha1(&self) -> T {
        self.alpha1
    }

    pub fn alpha2(&self) -> T {
        self.alpha2
    }

    pub fn domain_cap(&self) -> T {
        self.domain_cap
    }

    /// Short human-readable label used in reports.
    pub fn label(&self) -> String {
        match &self.kind {
            WeightKind::Power { alpha } => format!("power(alpha={alpha})"),
            WeightKind::Zygmund { alpha, beta, c } => {
                format!("zygmund(alpha={alpha};beta={beta};c={c})")
            }
            WeightKind::Custom { name, .. } => format!("custom({name})"),
        }
    }

    /// `g(s)` for `s ≥ 0`.
    pub fn g(&self, s: T) -> T {
        if s <= T::zero() {
            return T::zero();
        }
        match &self.kind {
            WeightKind::Power { alpha } => s.powf(*alpha),
            WeightKind::Zygmund { alpha, beta, c } => s.powf(*alpha) * (*c + s).ln().powf(*beta),
            WeightKind::Custom { g, .. } => g(s),
        }
    }

    /// `g'(s)` for `s > 0`.
    pub fn g_prime(&self, s: T) -> T {
        match &self.kind {
            WeightKind::Power { alpha } => *alpha * s.powf(*alpha - T::one()),
            WeightKind::Zygmund { alpha, beta, c } => {
                let log = (*c + s).ln();
                *alpha * s.powf(*alpha - T::one()) * log.powf(*beta)
                    + s.powf(*alpha) * *beta * log.powf(*beta - T::one()) / (*c + s)
            }
            WeightKind::Custom { g_prime, .. } => g_prime(s),
        }
    }

    /// The density `f = e^{g}` evaluated at radius `s`.
    pub fn f(&self, s: T) -> T {
        self.g(s).exp()
    }

    /// `∫₀ˢ g(z) dz`.
    pub fn primitive(&self, s: T) -> Result<T> {
        if s <= T::zero() {
            return Ok(T::zero());
        }
        match &self.kind {
            WeightKind::Power { alpha } => Ok(s.powf(*alpha + T::one()) / (*alpha + T::one())),
            _ => {
                // The integrand is bounded by g(1) z^{α₁} below 1; grading the
                // panels towards 0 resolves the derivative singularity there.
                let breaks = graded_breaks(T::zero(), s, 8);
                let r = integrate_with_breaks(|z| self.g(z), &breaks, QuadOptions::rel(1e-13))?;
                Ok(r.value)
            }
        }
    }

    /// `G(s) = (1/s) ∫₀ˢ g`.
    pub fn big_g(&self, s: T) -> Result<T> {
        if !(s > T::zero()) {
            return Err(Error::InvalidParameter(format!("G(s) needs s > 0, got {s}")));
        }
        match &self.kind {
            WeightKind::Power { alpha } => Ok(s.powf(*alpha) / (*alpha + T::one())),
            _ => Ok(self.primitive(s)? / s),
        }
    }

    /// `Λ(s) = G'(s) = g(s)/s − G(s)/s`, with `Λ(0) = 0`.
    pub fn lambda(&self, s: T) -> Result<T> {
        if s <= T::zero() {
            return Ok(T::zero());
        }
        match &self.kind {
            WeightKind::Power { alpha } => Ok(*alpha / (*alpha + T::one()) * s.powf(*alpha - T::one())),
            _ => Ok((self.g(s) - self.big_g(s)?) / s),
        }
    }

    /// `Λ'(s) = G''(s) = (2G(s) − 2g(s) + s g'(s)) / s²`.
    pub fn lambda_prime(&self, s: T) -> Result<T> {
        if !(s > T::zero()) {
            return Err(Error::InvalidParameter(format!("Λ'(s) needs s > 0, got {s}")));
        }
        match &self.kind {
            WeightKind::Power { alpha } => {
                Ok(*alpha * (*alpha - T::one()) / (*alpha + T::one()) * s.powf(*alpha - lit(2.0)))
            }
            _ => {
                let two: T = lit(2.0);
                Ok((two * self.big_g(s)? - two * self.g(s) + s * self.g_prime(s)) / (s * s))
            }
        }
    }

    /// `g⁻¹(z)` for `z > 0`, to `|g(s) − z| ≤ 1e-12·max(1, z)`.
    ///
    /// Power weights use the closed form. Otherwise the bracket `[0, hi]` is
    /// grown geometrically up to the domain cap, then refined by safeguarded
    /// Newton steps that fall back to bisection.
    pub fn invert_g(&self, z: T) -> Result<T> {
        if !(z > T::zero()) || !z.is_finite() {
            return Err(Error::InvalidParameter(format!("g⁻¹(z) needs finite z > 0, got {z}")));
        }
        if let WeightKind::Power { alpha } = &self.kind {
            return Ok(z.powf(T::one() / *alpha));
        }
        let two: T = lit(2.0);
        let mut lo = T::zero();
        let mut hi = T::one();
        while self.g(hi) < z {
            lo = hi;
            hi = hi * two;
            if hi > self.domain_cap {
                return Err(Error::OutOfRange {
                    value: wide(z),
                    detail: format!("exceeds g(domain_cap) with domain_cap = {:e}", wide(self.domain_cap)),
                });
            }
        }
        let tol = resolvable::<T>(1e-12) * z.max(T::one());
        let mut s = (lo + hi) * lit(0.5);
        for _ in 0..400 {
            let residual = self.g(s) - z;
            if residual.abs() <= tol {
                return Ok(s);
            }
            if residual > T::zero() {
                hi = s;
            } else {
                lo = s;
            }
            let slope = self.g_prime(s);
            let newton = s - residual / slope;
            s = if slope > T::zero() && newton > lo && newton < hi {
                newton
            } else {
                (lo + hi) * lit(0.5)
            };
            if hi - lo <= T::epsilon() * hi {
                break;
            }
        }
        let residual = (self.g(s) - z).abs();
        // Bracket collapsed to adjacent floats: the residual is as small as
        // the scalar type allows.
        if residual <= tol || hi - lo <= T::epsilon() * hi * lit(4.0) {
            Ok(s)
        } else {
            Err(Error::NumericFailure {
                what: "inversion of g".into(),
                error_estimate: wide(residual),
            })
        }
    }
}

/// Dimension and nonlinearity exponents of the equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationParams<T> {
    dim_n: u32,
    p: T,
    m: T,
    beta: T,
}

impl<T: Real> EquationParams<T> {
    /// Parameters in the weighted regime: `N ≥ 2`, `1 < p < N`, `p + m − 3 > 0`.
    pub fn new(dim_n: u32, p: T, m: T) -> Result<Self> {
        if dim_n < 2 {
            return Err(Error::InvalidParameter(format!(
                "spatial dimension must satisfy N >= 2, got N = {dim_n}"
            )));
        }
        let n: T = lit(dim_n as f64);
        if !(p > T::one() && p < n) {
            return Err(Error::InvalidParameter(format!(
                "degeneracy condition 1 < p < N violated: p = {p}, N = {dim_n}"
            )));
        }
        Self::calibration(dim_n, p, m)
    }

    /// Parameters for unweighted calibration runs: only `N ≥ 1`, `p > 1` and
    /// `p + m − 3 > 0` are enforced.
    pub fn calibration(dim_n: u32, p: T, m: T) -> Result<Self> {
        if dim_n < 1 {
            return Err(Error::InvalidParameter("spatial dimension must be at least 1".into()));
        }
        if !(p > T::one()) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("p must exceed 1, got p = {p}")));
        }
        if !(p + m - lit(3.0) > T::zero()) || !m.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "degeneracy condition p + m - 3 > 0 violated: p = {p}, m = {m}"
            )));
        }
        Ok(Self {
            dim_n,
            p,
            m,
            beta: (p - T::one()) / (p + m - lit(2.0)),
        })
    }

    pub fn dim_n(&self) -> u32 {
        self.dim_n
    }

    /// `N` as a scalar.
    pub fn n(&self) -> T {
        lit(self.dim_n as f64)
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn m(&self) -> T {
        self.m
    }

    /// `β = (p−1)/(p+m−2)`, the exponent of the change of variable `v = u^{1/β}`.
    pub fn beta(&self) -> T {
        self.beta
    }

    /// `p + m − 3`, the time-scaling exponent.
    pub fn kappa(&self) -> T {
        self.p + self.m - lit(3.0)
    }

    /// Conjugate exponent `p' = p/(p−1)`.
    pub fn p_conjugate(&self) -> T {
        self.p / (self.p - T::one())
    }

    /// Requires `α₂ < min(N, p/(p−1))`.
    pub fn check_weight(&self, w: &WeightSpec<T>) -> Result<()> {
        let bound = self.n().min(self.p_conjugate());
        if w.alpha2() < bound {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "weight exponent condition alpha2 < min(N, p/(p-1)) violated: alpha2 = {}, bound = {}",
                w.alpha2(),
                bound
            )))
        }
    }
}

/// `ω_{N−1}`, the surface area of the unit sphere in `R^N` (2 for `N = 1`).
pub fn sphere_area<T: Real>(dim_n: u32) -> T {
    let n = dim_n as f64;
    let area = 2.0 * std::f64::consts::PI.powf(n / 2.0) / statrs::function::gamma::gamma(n / 2.0);
    lit(area)
}
