//! Explicit constants of the weighted Poincaré, radial Sobolev and
//! bounded-ball Sobolev inequalities, the Hardy criterion behind them, and
//! empirical certification against families of radial test functions.
//!
//! The three inequalities, for compactly supported radial `v` and the measure
//! `dμ = r^{N−1} e^{g(r)} dr`, are
//!
//! ```text
//! ∫ Λ^p |v|^p dμ              ≤ C ∫ |v'|^p dμ,
//! (∫ |v|^q dμ)^{1/q}          ≤ Γ (∫ |v'|^p dμ)^{1/p},
//! (∫_{B_R} |v|^q df)^{1/q}    ≤ C (∫_{B_R} |∇v|^p df)^{1/p} Λ(R)^{N/a−1},
//! ```
//!
//! with `a = pq/(q−p)`. The first is reported unrooted, the last over `R^N`.

use std::sync::Arc;

use crate::checks::{check_structural_conditions, excess, log_grid, ValidationReport};
use crate::error::{Error, Result};
use crate::measure::RadialMeasure;
use crate::quadrature::{graded_breaks, integrate_tail, integrate_with_breaks, QuadOptions};
use crate::scalar::{lit, wide, Real};
use crate::weight::{sphere_area, EquationParams, ScalarFn, WeightSpec};

/// Relative slack allowed between an empirical ratio and its certified constant.
pub const VERDICT_SLACK: f64 = 1e-8;
/// Number of log-spaced points in the criterion grid.
pub const CRITERION_POINTS: usize = 400;
/// Left end of the criterion grid.
pub const CRITERION_R_MIN: f64 = 1e-4;
/// Largest `g` value the criterion grid reaches, keeping `e^g` representable.
pub const G_CAP: f64 = 300.0;
/// Relative tolerance of the pointwise profile bounds (quadrature limited).
pub const PROFILE_TOL: f64 = 1e-8;

const CRITERION_REL_TOL: f64 = 1e-10;
const GOLDEN_ITERS: usize = 80;

/// `K(q,p) = (1 + q/p′)^{1/q} (1 + p′/q)^{1/p′}` with `p′ = p/(p−1)`.
pub fn k_qp<T: Real>(q: T, p: T) -> Result<T> {
    if !(p > T::one()) || !(q >= p) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "K(q,p) needs 1 < p <= q < inf, got q = {q}, p = {p}"
        )));
    }
    let pc = p / (p - T::one());
    Ok((T::one() + q / pc).powf(T::one() / q) * (T::one() + pc / q).powf(T::one() / pc))
}

/// `c₄(α) = (1/α − 1)^{1/α−1} e^{−(1/α−1)}`, the maximum of `x^{1/α−1} e^{−x}`.
pub fn c4<T: Real>(alpha: T) -> Result<T> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(Error::InvalidParameter(format!("c4 needs 0 < alpha <= 1, got {alpha}")));
    }
    let b = T::one() / alpha - T::one();
    // 0^0 = 1 at alpha = 1.
    Ok(b.powf(b) * (-b).exp())
}

/// The two densities and exponents of a Hardy inequality
/// `(∫ |v|^q w)^{1/q} ≤ C (∫ |v'|^p φ)^{1/p}` for `v` vanishing at infinity.
#[derive(Clone)]
pub struct HardyPair<T> {
    pub w_density: ScalarFn<T>,
    pub phi_density: ScalarFn<T>,
    pub q: T,
    pub p: T,
}

impl<T: Real> HardyPair<T> {
    pub fn new(w_density: ScalarFn<T>, phi_density: ScalarFn<T>, q: T, p: T) -> Result<Self> {
        if !(p > T::one()) || !(q >= p) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Hardy pair needs 1 < p <= q < inf, got q = {q}, p = {p}"
            )));
        }
        Ok(Self {
            w_density,
            phi_density,
            q,
            p,
        })
    }

    /// `w = Λ^p r^{N−1} e^g`, `φ = r^{N−1} e^g`, `q = p`.
    pub fn poincare(w: &WeightSpec<T>, eq: &EquationParams<T>) -> Self {
        let (wl, wm) = (w.clone(), w.clone());
        let (n, p) = (eq.dim_n(), eq.p());
        let density = move |wt: &WeightSpec<T>, r: T| RadialMeasure::growing(wt, n).density(r);
        let w_density: ScalarFn<T> = Arc::new(move |r| {
            let lambda = wl.lambda(r).unwrap_or_else(|_| T::nan());
            lambda.powf(p) * density(&wl, r)
        });
        let phi_density: ScalarFn<T> = Arc::new(move |r| density(&wm, r));
        Self {
            w_density,
            phi_density,
            q: p,
            p,
        }
    }

    /// `w = φ = r^{N−1} e^g` with exponents `(q, p)`.
    pub fn sobolev(w: &WeightSpec<T>, eq: &EquationParams<T>, q: T) -> Result<Self> {
        let wm = w.clone();
        let n = eq.dim_n();
        let density: ScalarFn<T> = Arc::new(move |r| RadialMeasure::growing(&wm, n).density(r));
        Self::new(density.clone(), density, q, eq.p())
    }

    fn dual(&self, r: T) -> T {
        (self.phi_density)(r).powf(-T::one() / (self.p - T::one()))
    }

    fn product(&self, i1: T, i2: T) -> T {
        i1.powf(T::one() / self.q) * i2.powf((self.p - T::one()) / self.p)
    }
}

/// Sampled criterion product `(∫₀ʳ w)^{1/q} (∫ᵣ^∞ φ^{1−p′})^{1/p′}` and its supremum.
#[derive(Debug, Clone)]
pub struct CriterionProfile<T> {
    pub beta_sup: T,
    pub argmax: T,
    /// The maximum sits at the end of the grid, so `beta_sup` is a lower
    /// estimate of a supremum approached at infinity.
    pub at_boundary: bool,
    pub samples: Vec<(T, T)>,
}

fn segment<T: Real>(f: &dyn Fn(T) -> T, a: T, b: T) -> Result<T> {
    let breaks = if a == T::zero() {
        graded_breaks(a, b, 8)
    } else {
        vec![a, b]
    };
    let v = integrate_with_breaks(f, &breaks, QuadOptions::rel(CRITERION_REL_TOL))?.value;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NumericFailure {
            what: format!("criterion integral on [{a:e}, {b:e}]"),
            error_estimate: f64::INFINITY,
        })
    }
}

/// Evaluates the criterion product on [`CRITERION_POINTS`] log-spaced radii
/// in `[CRITERION_R_MIN, r_max]` and refines the discrete maximum by
/// golden-section search in `log r`.
pub fn hardy_criterion_sup<T: Real>(pair: &HardyPair<T>, r_max: T) -> Result<CriterionProfile<T>> {
    let r_min: T = lit(CRITERION_R_MIN);
    if !(r_max > r_min) || !r_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "criterion grid needs r_max > {CRITERION_R_MIN}, got {r_max}"
        )));
    }
    let grid = log_grid(r_min, r_max, CRITERION_POINTS);
    let w = |r: T| (pair.w_density)(r);
    let dual = |r: T| pair.dual(r);

    let mut i1 = Vec::with_capacity(grid.len());
    let mut acc = segment(&w, T::zero(), grid[0])?;
    i1.push(acc);
    for s in grid.windows(2) {
        acc = acc + segment(&w, s[0], s[1])?;
        i1.push(acc);
    }
    let last = grid.len() - 1;
    let mut i2 = vec![T::zero(); grid.len()];
    i2[last] = integrate_tail(dual, grid[last], QuadOptions::rel(CRITERION_REL_TOL))?.value;
    if !i2[last].is_finite() {
        return Err(Error::CriterionInfinite(format!(
            "dual tail from r = {:e}",
            wide(grid[last])
        )));
    }
    for k in (0..last).rev() {
        i2[k] = i2[k + 1] + segment(&dual, grid[k], grid[k + 1])?;
    }

    let samples: Vec<(T, T)> = grid
        .iter()
        .enumerate()
        .map(|(k, &r)| (r, pair.product(i1[k], i2[k])))
        .collect();
    if let Some(&(r, _)) = samples.iter().find(|s| !s.1.is_finite()) {
        return Err(Error::NumericFailure {
            what: format!("criterion product at r = {:e}", wide(r)),
            error_estimate: f64::INFINITY,
        });
    }
    let k = (0..samples.len())
        .max_by(|&a, &b| samples[a].1.partial_cmp(&samples[b].1).expect("finite"))
        .expect("non-empty grid");
    let (mut beta_sup, mut argmax) = (samples[k].1, samples[k].0);

    // Refine on [r_{k−1}, r_{k+1}], anchored at r_{k−1} for I₁ and r_{k+1} for I₂.
    let lo = k.saturating_sub(1);
    let hi = (k + 1).min(last);
    if hi > lo {
        let eval = |r: T| -> Result<T> {
            let a = i1[lo]
                + if r > grid[lo] {
                    segment(&w, grid[lo], r)?
                } else {
                    T::zero()
                };
            let b = i2[hi]
                + if r < grid[hi] {
                    segment(&dual, r, grid[hi])?
                } else {
                    T::zero()
                };
            Ok(pair.product(a, b))
        };
        let inv_phi: T = lit(0.618_033_988_749_894_8);
        let (mut a, mut b) = (grid[lo].ln(), grid[hi].ln());
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let mut f1 = eval(x1.exp())?;
        let mut f2 = eval(x2.exp())?;
        for _ in 0..GOLDEN_ITERS {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = eval(x2.exp())?;
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = eval(x1.exp())?;
            }
        }
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f > beta_sup {
                beta_sup = f;
                argmax = x.exp();
            }
        }
    }
    Ok(CriterionProfile {
        beta_sup,
        argmax,
        at_boundary: k == last,
        samples,
    })
}

/// Right end of the criterion grid: `max(10, g⁻¹(min(50a, G_CAP)))`, with
/// `a = ∞` (Poincaré) capped at [`G_CAP`].
pub fn criterion_r_max<T: Real>(w: &WeightSpec<T>, a: Option<T>) -> Result<T> {
    let cap: T = lit(G_CAP);
    let z = a.map_or(cap, |a| (a * lit(50.0)).min(cap));
    Ok(w.invert_g(z)?.max(lit(10.0)))
}

/// `(c₁, (c₁^{p−1}/α₁)^{1/p})` with the closed form `c₁ = (p−1)α₁/(α₂(α₁+1))`.
pub fn poincare_bound<T: Real>(w: &WeightSpec<T>, eq: &EquationParams<T>) -> (T, T) {
    let (a1, a2, p) = (w.alpha1(), w.alpha2(), eq.p());
    let c1 = (p - T::one()) * a1 / (a2 * (a1 + T::one()));
    (c1, (c1.powf(p - T::one()) / a1).powf(T::one() / p))
}

/// `(c₁*, (c₁*^{p−1}/α₁)^{1/p})` with `c₁* = (p−1)α₂/(α₁(α₂+1))`.
///
/// Bounding the dual tail needs `(p−1)/g' ≤ c/Λ`, and the envelope only gives
/// `g' ≥ α₁(α₂+1)Λ/α₂`, so `c₁*` is the constant that step supports. It
/// agrees with `c₁` when `α₁ = α₂` and exceeds it otherwise.
pub fn poincare_bound_corrected<T: Real>(w: &WeightSpec<T>, eq: &EquationParams<T>) -> (T, T) {
    let (a1, a2, p) = (w.alpha1(), w.alpha2(), eq.p());
    let c1 = (p - T::one()) * a2 / (a1 * (a2 + T::one()));
    (c1, (c1.powf(p - T::one()) / a1).powf(T::one() / p))
}

/// Weighted Poincaré constants, all in the unrooted form `∫Λ^p|v|^p ≤ C ∫|v'|^p`.
#[derive(Debug, Clone)]
pub struct PoincareConstant<T> {
    pub c1: T,
    /// Closed-form bound on the criterion supremum.
    pub stated_bound: T,
    pub c1_corrected: T,
    pub corrected_bound: T,
    pub kpp: T,
    /// `[K(p,p) · corrected_bound]^p`.
    pub certified: T,
    /// `[K(p,p) · beta_sup]^p`.
    pub numeric: T,
    pub profile: CriterionProfile<T>,
}

pub fn poincare_constant<T: Real>(w: &WeightSpec<T>, eq: &EquationParams<T>) -> Result<PoincareConstant<T>> {
    if !check_structural_conditions(w, eq).cond_nn {
        return Err(Error::Precondition(format!(
            "(N-p)a1/(a1+1) + (p-1)(a1 - a2/(a2+1)) >= 0 fails for a1 = {}, a2 = {}, N = {}, p = {}",
            w.alpha1(),
            w.alpha2(),
            eq.dim_n(),
            eq.p()
        )));
    }
    let p = eq.p();
    let (c1, stated_bound) = poincare_bound(w, eq);
    let (c1_corrected, corrected_bound) = poincare_bound_corrected(w, eq);
    let kpp = k_qp(p, p)?;
    let profile = hardy_criterion_sup(&HardyPair::poincare(w, eq), criterion_r_max(w, None)?)?;
    Ok(PoincareConstant {
        c1,
        stated_bound,
        c1_corrected,
        corrected_bound,
        kpp,
        certified: (kpp * corrected_bound).powf(p),
        numeric: (kpp * profile.beta_sup).powf(p),
        profile,
    })
}

fn check_sobolev_exponent<T: Real>(eq: &EquationParams<T>, q: T) -> Result<()> {
    let (n, p) = (eq.n(), eq.p());
    let p_star = n * p / (n - p);
    if q > p && q < p_star {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "q must satisfy p < q < Np/(N-p) = {p_star}, got q = {q}, p = {p}"
        )))
    }
}

/// `a = pq/(q−p)`.
pub fn sobolev_a<T: Real>(eq: &EquationParams<T>, q: T) -> T {
    eq.p() * q / (q - eq.p())
}

/// `c₃ = (p−1)^{(p−1)/p} (α₂(α₁+1)/(α₁(α₂+1)))^{1/q} α₁^{−1/q} α₂^{−(p−1)/p}`,
/// the closed form built on `c₁`.
pub fn c3<T: Real>(w: &WeightSpec<T>, eq: &EquationParams<T>, q: T) -> T {
    let (a1, a2, p) = (w.alpha1(), w.alpha2(), eq.p());
    let one = T::one();
    let e = (p - one) / p;
    (p - one).powf(e) * (a2 * (a1 + one) / (a1 * (a2 + one))).powf(one / q) * a1.powf(-one / q) * a2.powf(-e)
}

/// `c₃` rebuilt on `c₁*`: `c₃ · (c₁*/c₁)^{(p−1)/p}`. Equal to [`c3`] when `α₁ = α₂`.
pub fn c3_corrected<T: Real>(w: &WeightSpec<T>, eq: &EquationParams<T>, q: T) -> T {
    let (a1, a2, p) = (w.alpha1(), w.alpha2(), eq.p());
    let one = T::one();
    let ratio = a2 * a2 * (a1 + one) / (a1 * a1 * (a2 + one));
    c3(w, eq, q) * ratio.powf((p - one) / p)
}

fn small_r_coefficient<T: Real>(eq: &EquationParams<T>, q: T) -> T {
    let (n, p) = (eq.n(), eq.p());
    n.powf(-T::one() / q) * ((p - T::one()) / (n - p)).powf((p - T::one()) / p)
}

fn check_sobolev_preconditions<T: Real>(w: &WeightSpec<T>, eq: &EquationParams<T>, q: T) -> Result<()> {
    check_sobolev_exponent(eq, q)?;
    let c = check_structural_conditions(w, eq);
    if !(w.alpha2() < T::one()) {
        return Err(Error::Precondition(format!(
            "radial Sobolev needs a2 < 1, got {}",
            w.alpha2()
        )));
    }
    if !c.cond_nn || !c.cond_p {
        return Err(Error::Precondition(format!(
            "radial Sobolev needs both structural conditions (cond_nn = {}, cond_p = {})",
            c.cond_nn, c.cond_p
        )));
    }
    Ok(())
}

/// The radial Sobolev constant `Γ` for a given splitting radius `r₀ > 0`,
/// using [`c3_corrected`]. Equal to [`gamma_constant_stated`] when `α₁ = α₂`.
pub fn gamma_constant<T: Real>(w: &WeightSpec<T>, eq: &EquationParams<T>, q: T, r0: T) -> Result<T> {
    gamma_with(w, eq, q, r0, c3_corrected(w, eq, q))
}

/// `Γ` exactly as the closed form reads, with [`c3`].
pub fn gamma_constant_stated<T: Real>(w: &WeightSpec<T>, eq: &EquationParams<T>, q: T, r0: T) -> Result<T> {
    gamma_with(w, eq, q, r0, c3(w, eq, q))
}

fn gamma_with<T: Real>(w: &WeightSpec<T>, eq: &EquationParams<T>, q: T, r0: T, c3v: T) -> Result<T> {
    check_sobolev_preconditions(w, eq, q)?;
    if !(r0 > T::zero()) || !r0.is_finite() {
        return Err(Error::InvalidParameter(format!("r0 must be positive, got {r0}")));
    }
    let a = sobolev_a(eq, q);
    let small = small_r_coefficient(eq, q) * (T::one() + r0);
    let tail = (T::one() + w.g(r0).powf(T::one() / eq.n()) / r0) * w.invert_g(a)? / a;
    let large = c3v * (c4(w.alpha1())? + c4(w.alpha2())?) * tail;
    Ok(k_qp(q, eq.p())? * (small + large))
}

/// Checks the sampled profile `A(r)` against its regime bounds:
///
/// * `A(r) ≤ N^{−1/q}((p−1)/(N−p))^{(p−1)/p} r^{(Np−q(N−p))/(qp)} e^{−g(q−p)/(pq)}` for all `r`,
/// * `A(r) ≤ N^{−1/q}((p−1)/(N−p))^{(p−1)/p}(1+r₀)` for `r ≤ r₀`,
/// * `A(r) ≤ c₃ (r^{N(p−q)+pq} g^{−p−q(p−1)} e^{(p−q)g})^{1/(pq)}` for `r ≥ r₀`, with [`c3_corrected`],
/// * `A(r) ≤ Γ/K(q,p)` for all `r`.
pub fn sobolev_profile_checks<T: Real>(
    w: &WeightSpec<T>,
    eq: &EquationParams<T>,
    q: T,
    r0: T,
) -> Result<(CriterionProfile<T>, Vec<ValidationReport>)> {
    let gamma = gamma_constant(w, eq, q, r0)?;
    let (n, p) = (eq.n(), eq.p());
    let a = sobolev_a(eq, q);
    let profile = hardy_criterion_sup(&HardyPair::sobolev(w, eq, q)?, criterion_r_max(w, Some(a))?)?;
    let coef = small_r_coefficient(eq, q);
    let c3v = c3_corrected(w, eq, q);
    let ceiling = gamma / k_qp(q, p)?;

    let mut small = ValidationReport::new("A(r) <= small-r bound", PROFILE_TOL);
    let mut inner = ValidationReport::new("A(r) <= coefficient*(1+r0) for r <= r0", PROFILE_TOL);
    let mut outer = ValidationReport::new("A(r) <= c3*A3(r) for r >= r0", PROFILE_TOL);
    let mut total = ValidationReport::new("A(r) <= Gamma/K(q,p)", PROFILE_TOL);
    for &(r, value) in &profile.samples {
        let g = w.g(r);
        let pq = p * q;
        let bound = coef * r.powf((n * p - q * (n - p)) / pq) * (-g * (q - p) / pq).exp();
        small.record(wide(r), excess(value, bound));
        if r <= r0 {
            inner.record(wide(r), excess(value, coef * (T::one() + r0)));
        }
        if r >= r0 {
            let a3 =
                (r.powf(n * (p - q) + pq) * g.powf(-p - q * (p - T::one())) * ((p - q) * g).exp()).powf(T::one() / pq);
            outer.record(wide(r), excess(value, c3v * a3));
        }
        total.record(wide(r), excess(value, ceiling));
    }
    total.record(wide(profile.argmax), excess(profile.beta_sup, ceiling));
    Ok((profile, vec![small, inner, outer, total]))
}

/// Checks `F(r(λ)) = g⁻¹(aλ) e^{−λ}/(aλ)` against `c₄(α₁) g⁻¹(a)/a` for
/// `λ > 1` and `c₄(α₂) g⁻¹(a)/a` for `λ ≤ 1`.
pub fn f_profile_check<T: Real>(
    w: &WeightSpec<T>,
    eq: &EquationParams<T>,
    q: T,
    lambdas: &[T],
) -> Result<ValidationReport> {
    check_sobolev_exponent(eq, q)?;
    let a = sobolev_a(eq, q);
    let base = w.invert_g(a)? / a;
    let (hi, lo) = (c4(w.alpha1())? * base, c4(w.alpha2())? * base);
    let mut rep = ValidationReport::new("F(r(lambda)) <= c4*g^-1(a)/a", PROFILE_TOL);
    for &l in lambdas {
        let f = w.invert_g(a * l)? * (-l).exp() / (a * l);
        rep.record(wide(l), excess(f, if l > T::one() { hi } else { lo }));
    }
    Ok(rep)
}

/// Sharp constant `S` of `‖w‖_{p*} ≤ S ‖∇w‖_p` on `R^N`, `1 < p < N`.
pub fn talenti_constant<T: Real>(dim_n: u32, p: T) -> Result<T> {
    use statrs::function::gamma::gamma;
    let (n, pf) = (dim_n as f64, wide(p));
    if !(pf > 1.0 && pf < n) {
        return Err(Error::InvalidParameter(format!(
            "sharp Sobolev constant needs 1 < p < N, got p = {pf}, N = {dim_n}"
        )));
    }
    let ratio = gamma(1.0 + n / 2.0) * gamma(n) / (gamma(n / pf) * gamma(1.0 + n - n / pf));
    let s = std::f64::consts::PI.powf(-0.5)
        * n.powf(-1.0 / pf)
        * ((pf - 1.0) / (n - pf)).powf(1.0 - 1.0 / pf)
        * ratio.powf(1.0 / n);
    Ok(lit(s))
}

/// `κ = (α₁/(α₁+1))((α₂+1)/α₂)`, so that `Λ(s) ≥ κ Λ(R)` for `s < R` when `α₂ ≤ 1`.
pub fn lambda_comparison_factor<T: Real>(w: &WeightSpec<T>) -> T {
    let (a1, a2) = (w.alpha1(), w.alpha2());
    a1 / (a1 + T::one()) * (a2 + T::one()) / a2
}

/// Constant of the bounded-ball Sobolev inequality, assembled as
///
/// ```text
/// K_w = 2^{p−1} [1 + (α₂(α₁+1)/(pα₁))^p C_P],   θ = (q−p)/(p*−p),
/// C   = [(S K_w^{1/p})^{p*θ} (κ^{−p} C_P)^{1−θ}]^{1/q},
/// ```
///
/// where `S` is the sharp Sobolev constant and `C_P` the certified Poincaré constant.
#[derive(Debug, Clone)]
pub struct BoundedSobolevConstant<T> {
    pub c_numeric: T,
    /// `Λ(R)^{N/a−1}`.
    pub lambda_factor: T,
    pub talenti: T,
    pub k_w: T,
    pub kappa: T,
    pub theta: T,
    pub poincare_certified: T,
}

impl<T: Real> BoundedSobolevConstant<T> {
    /// `C · Λ(R)^{N/a−1}`.
    pub fn certified(&self) -> T {
        self.c_numeric * self.lambda_factor
    }
}

pub fn bounded_sobolev_constant<T: Real>(
    w: &WeightSpec<T>,
    eq: &EquationParams<T>,
    q: T,
    radius: T,
) -> Result<BoundedSobolevConstant<T>> {
    check_sobolev_exponent(eq, q)?;
    if !(w.alpha2() <= T::one()) {
        return Err(Error::Precondition(format!(
            "bounded Sobolev needs a2 <= 1, got {}",
            w.alpha2()
        )));
    }
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ball radius must be positive and finite, got {radius}"
        )));
    }
    let (a1, a2, n, p) = (w.alpha1(), w.alpha2(), eq.n(), eq.p());
    let one = T::one();
    let (_, bound) = poincare_bound_corrected(w, eq);
    if !check_structural_conditions(w, eq).cond_nn {
        return Err(Error::Precondition("bounded Sobolev needs cond_nn".into()));
    }
    let c_p = (k_qp(p, p)? * bound).powf(p);
    let talenti = talenti_constant(eq.dim_n(), p)?;
    let k_w = lit::<T>(2.0).powf(p - one) * (one + (a2 * (a1 + one) / (p * a1)).powf(p) * c_p);
    let kappa = lambda_comparison_factor(w);
    let p_star = n * p / (n - p);
    let theta = (q - p) / (p_star - p);
    let c_numeric =
        ((talenti * k_w.powf(one / p)).powf(p_star * theta) * (kappa.powf(-p) * c_p).powf(one - theta)).powf(one / q);
    let lambda_factor = w.lambda(radius)?.powf(n / sobolev_a(eq, q) - one);
    Ok(BoundedSobolevConstant {
        c_numeric,
        lambda_factor,
        talenti,
        k_w,
        kappa,
        theta,
        poincare_certified: c_p,
    })
}

/// Checks `Λ(s) ≥ κ Λ(R)` on `points` log-spaced radii in `[10⁻⁴R, R]`.
pub fn lambda_comparison_check<T: Real>(w: &WeightSpec<T>, radius: T, points: usize) -> Result<ValidationReport> {
    let mut rep = ValidationReport::new("Lambda(s) >= kappa*Lambda(R) for s < R", PROFILE_TOL);
    rep.applicable = w.alpha2() <= T::one();
    let target = lambda_comparison_factor(w) * w.lambda(radius)?;
    for s in log_grid(radius * lit(1e-4), radius, points) {
        rep.record(wide(s), excess(target, w.lambda(s)?));
    }
    Ok(rep)
}

/// Compactly supported radial test profiles with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction<T> {
    Zero,
    /// `A (1 − (r/R)²)₊^k`.
    Bump {
        radius: T,
        k: u32,
        amplitude: T,
    },
    /// `A (1 − ((r−c)/h)²)₊^k`, with `c > h`.
    Annulus {
        center: T,
        half_width: T,
        k: u32,
        amplitude: T,
    },
    /// `A (e^{−r²/σ²} − e^{−R²/σ²})` for `r < R`.
    Gaussian {
        radius: T,
        sigma: T,
        amplitude: T,
    },
}

impl<T: Real> TestFunction<T> {
    pub fn label(&self) -> String {
        match self {
            TestFunction::Zero => "zero".into(),
            TestFunction::Bump { radius, k, amplitude } => format!("bump(R={radius};k={k};A={amplitude})"),
            TestFunction::Annulus {
                center,
                half_width,
                k,
                amplitude,
            } => format!("annulus(c={center};h={half_width};k={k};A={amplitude})"),
            TestFunction::Gaussian {
                radius,
                sigma,
                amplitude,
            } => {
                format!("gaussian(R={radius};sigma={sigma};A={amplitude})")
            }
        }
    }

    /// Closed support interval, `None` for the zero function.
    pub fn support(&self) -> Option<(T, T)> {
        match *self {
            TestFunction::Zero => None,
            TestFunction::Bump { radius, .. } | TestFunction::Gaussian { radius, .. } => Some((T::zero(), radius)),
            TestFunction::Annulus { center, half_width, .. } => Some((center - half_width, center + half_width)),
        }
    }

    pub fn value(&self, r: T) -> T {
        match *self {
            TestFunction::Zero => T::zero(),
            TestFunction::Bump { radius, k, amplitude } => {
                let s = T::one() - (r / radius).powi(2);
                if s > T::zero() {
                    amplitude * s.powi(k as i32)
                } else {
                    T::zero()
                }
            }
            TestFunction::Annulus {
                center,
                half_width,
                k,
                amplitude,
            } => {
                let s = T::one() - ((r - center) / half_width).powi(2);
                if s > T::zero() {
                    amplitude * s.powi(k as i32)
                } else {
                    T::zero()
                }
            }
            TestFunction::Gaussian {
                radius,
                sigma,
                amplitude,
            } => {
                if r < radius {
                    amplitude * ((-(r / sigma).powi(2)).exp() - (-(radius / sigma).powi(2)).exp())
                } else {
                    T::zero()
                }
            }
        }
    }

    pub fn derivative(&self, r: T) -> T {
        let two: T = lit(2.0);
        match *self {
            TestFunction::Zero => T::zero(),
            TestFunction::Bump { radius, k, amplitude } => {
                let s = T::one() - (r / radius).powi(2);
                if s > T::zero() {
                    -amplitude * lit::<T>(k as f64) * s.powi(k as i32 - 1) * two * r / (radius * radius)
                } else {
                    T::zero()
                }
            }
            TestFunction::Annulus {
                center,
                half_width,
                k,
                amplitude,
            } => {
                let x = (r - center) / half_width;
                let s = T::one() - x * x;
                if s > T::zero() {
                    -amplitude * lit::<T>(k as f64) * s.powi(k as i32 - 1) * two * x / half_width
                } else {
                    T::zero()
                }
            }
            TestFunction::Gaussian {
                radius,
                sigma,
                amplitude,
            } => {
                if r < radius {
                    -amplitude * two * r / (sigma * sigma) * (-(r / sigma).powi(2)).exp()
                } else {
                    T::zero()
                }
            }
        }
    }

    /// The same profile multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        match *self {
            TestFunction::Zero => TestFunction::Zero,
            TestFunction::Bump { radius, k, amplitude } => TestFunction::Bump {
                radius,
                k,
                amplitude: amplitude * c,
            },
            TestFunction::Annulus {
                center,
                half_width,
                k,
                amplitude,
            } => TestFunction::Annulus {
                center,
                half_width,
                k,
                amplitude: amplitude * c,
            },
            TestFunction::Gaussian {
                radius,
                sigma,
                amplitude,
            } => TestFunction::Gaussian {
                radius,
                sigma,
                amplitude: amplitude * c,
            },
        }
    }
}

/// Bumps with `k ∈ {1,2,3}` and `R ∈ {0.5,1,2,4}`, two Gaussians, one annulus
/// and the zero function (16 members).
pub fn standard_family<T: Real>() -> Vec<TestFunction<T>> {
    let mut out = Vec::new();
    for k in 1..=3 {
        for r in [0.5, 1.0, 2.0, 4.0] {
            out.push(TestFunction::Bump {
                radius: lit(r),
                k,
                amplitude: T::one(),
            });
        }
    }
    for (r, s) in [(2.0, 1.0), (4.0, 1.5)] {
        out.push(TestFunction::Gaussian {
            radius: lit(r),
            sigma: lit(s),
            amplitude: T::one(),
        });
    }
    out.push(TestFunction::Annulus {
        center: lit(2.0),
        half_width: T::one(),
        k: 2,
        amplitude: T::one(),
    });
    out.push(TestFunction::Zero);
    out
}

/// Bumps, a Gaussian and an annulus supported in `B_R`.
pub fn family_in_ball<T: Real>(radius: T) -> Vec<TestFunction<T>> {
    let mut out = Vec::new();
    for k in 1..=3 {
        for frac in [0.25, 0.5, 1.0] {
            out.push(TestFunction::Bump {
                radius: radius * lit(frac),
                k,
                amplitude: T::one(),
            });
        }
    }
    out.push(TestFunction::Gaussian {
        radius,
        sigma: radius * lit(0.5),
        amplitude: T::one(),
    });
    out.push(TestFunction::Annulus {
        center: radius * lit(0.5),
        half_width: radius * lit(0.25),
        k: 2,
        amplitude: T::one(),
    });
    out
}

/// Which inequality to certify.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InequalityKind<T> {
    Poincare,
    RadialSobolev { q: T, r0: T },
    BoundedSobolev { q: T, radius: T },
}

impl<T: Real> InequalityKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            InequalityKind::Poincare => "poincare",
            InequalityKind::RadialSobolev { .. } => "radial_sobolev",
            InequalityKind::BoundedSobolev { .. } => "bounded_sobolev",
        }
    }
}

/// Both sides of one test evaluation.
#[derive(Debug, Clone)]
pub struct TestRow<T> {
    pub label: String,
    pub lhs: T,
    pub rhs: T,
    /// `lhs/rhs`; 0 when both vanish, infinite when only `rhs` does.
    pub ratio: T,
}

#[derive(Debug, Clone)]
pub struct InequalityReport<T> {
    pub kind: InequalityKind<T>,
    /// Criterion supremum (absent for the bounded-ball inequality).
    pub beta_sup: Option<T>,
    /// Closed-form bound: on `beta_sup` for Poincaré, on `A(r)` (`Γ/K`) for
    /// radial Sobolev, and `C` without the `Λ(R)` factor for the ball.
    pub stated_bound: T,
    pub kqp: Option<T>,
    /// The constant the ratios are certified against.
    pub certified: T,
    /// Tighter constant built from `beta_sup` where available.
    pub numeric_constant: Option<T>,
    pub worst_ratio: T,
    pub passed: bool,
    pub samples: Vec<(T, T)>,
    pub rows: Vec<TestRow<T>>,
}

impl<T: Real> InequalityReport<T> {
    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

fn side_integral<T: Real>(measure: &RadialMeasure<'_, T>, f: &TestFunction<T>, h: impl Fn(T) -> T) -> Result<T> {
    match f.support() {
        None => Ok(T::zero()),
        Some((lo, hi)) => Ok(measure.integrate(h, lo, hi)?.value),
    }
}

/// Evaluates both sides of the chosen inequality for every member of
/// `family` and compares the worst ratio against the certified constant.
pub fn verify_inequality<T: Real>(
    kind: InequalityKind<T>,
    w: &WeightSpec<T>,
    eq: &EquationParams<T>,
    family: &[TestFunction<T>],
) -> Result<InequalityReport<T>> {
    let p = eq.p();
    let measure = RadialMeasure::growing(w, eq.dim_n());
    let gradient = |f: &TestFunction<T>| side_integral(&measure, f, |r| f.derivative(r).abs().powf(p));
    let mut report = match kind {
        InequalityKind::Poincare => {
            let c = poincare_constant(w, eq)?;
            InequalityReport {
                kind,
                beta_sup: Some(c.profile.beta_sup),
                stated_bound: c.stated_bound,
                kqp: Some(c.kpp),
                certified: c.certified,
                numeric_constant: Some(c.numeric),
                worst_ratio: T::zero(),
                passed: c.profile.beta_sup.is_finite(),
                samples: c.profile.samples,
                rows: Vec::new(),
            }
        }
        InequalityKind::RadialSobolev { q, r0 } => {
            let gamma = gamma_constant(w, eq, q, r0)?;
            let kqp = k_qp(q, p)?;
            let profile = hardy_criterion_sup(
                &HardyPair::sobolev(w, eq, q)?,
                criterion_r_max(w, Some(sobolev_a(eq, q)))?,
            )?;
            InequalityReport {
                kind,
                beta_sup: Some(profile.beta_sup),
                stated_bound: gamma / kqp,
                kqp: Some(kqp),
                certified: gamma,
                numeric_constant: Some(kqp * profile.beta_sup),
                worst_ratio: T::zero(),
                passed: profile.beta_sup.is_finite(),
                samples: profile.samples,
                rows: Vec::new(),
            }
        }
        InequalityKind::BoundedSobolev { q, radius } => {
            let c = bounded_sobolev_constant(w, eq, q, radius)?;
            if let Some(f) = family.iter().find(|f| f.support().is_some_and(|(_, hi)| hi > radius)) {
                return Err(Error::Precondition(format!(
                    "{} is not supported in B_{radius}",
                    f.label()
                )));
            }
            InequalityReport {
                kind,
                beta_sup: None,
                stated_bound: c.c_numeric,
                kqp: None,
                certified: c.certified(),
                numeric_constant: None,
                worst_ratio: T::zero(),
                passed: true,
                samples: Vec::new(),
                rows: Vec::new(),
            }
        }
    };
    let omega: T = sphere_area(eq.dim_n());
    for f in family {
        let (lhs, rhs) = match kind {
            InequalityKind::Poincare => {
                let lhs = side_integral(&measure, f, |r| {
                    w.lambda(r).unwrap_or_else(|_| T::nan()).powf(p) * f.value(r).abs().powf(p)
                })?;
                (lhs, gradient(f)?)
            }
            InequalityKind::RadialSobolev { q, .. } => {
                let lhs = side_integral(&measure, f, |r| f.value(r).abs().powf(q))?;
                (lhs.powf(T::one() / q), gradient(f)?.powf(T::one() / p))
            }
            InequalityKind::BoundedSobolev { q, .. } => {
                let lhs = side_integral(&measure, f, |r| f.value(r).abs().powf(q))?;
                (
                    (omega * lhs).powf(T::one() / q),
                    (omega * gradient(f)?).powf(T::one() / p),
                )
            }
        };
        let ratio = if rhs == T::zero() {
            if lhs == T::zero() {
                T::zero()
            } else {
                T::infinity()
            }
        } else {
            lhs / rhs
        };
        let ratio = if ratio.is_nan() { T::infinity() } else { ratio };
        report.worst_ratio = report.worst_ratio.max(ratio);
        report.rows.push(TestRow {
            label: f.label(),
            lhs,
            rhs,
            ratio,
        });
    }
    report.passed = report.passed && report.worst_ratio <= report.certified * (T::one() + lit(VERDICT_SLACK));
    Ok(report)
}
