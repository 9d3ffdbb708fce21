//! Explicit conservative finite-volume integrator for the radial equation
//!
//! ```text
//! e^{g(r)} r^{N−1} ∂ₜu = ∂ᵣ( r^{N−1} e^{g(r)} u^{m−1} |∂ᵣu|^{p−2} ∂ᵣu ),
//! ```
//!
//! with zero flux at `r = 0` (symmetry) and at `r = r_max`.
//!
//! Cell averages live on a cell-centred mesh. The flux through an interior
//! face is `A·ū^{m−1}·|s|^{p−2}s`, where `A = ω r^{N−1}e^{g(r)}` is the face
//! area, `s` the centred difference quotient and `ū` the clipped arithmetic
//! mean of the neighbouring cells. Because every face flux leaves one cell and
//! enters its neighbour, the weighted mass `Σ Vᵢuᵢ` is conserved up to
//! rounding.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::{cell_volumes, mass, RadialMeasure};
use crate::quadrature::{integrate, QuadOptions};
use crate::scalar::{lit, wide, Exponent, Real};
use crate::weight::{sphere_area, EquationParams, ScalarFn, WeightSpec};

pub mod checkpoint;

pub use checkpoint::Checkpoint;

/// Weight the solver runs with.
#[derive(Debug, Clone)]
pub enum WeightMode<T> {
    Weighted(WeightSpec<T>),
    /// `g ≡ 0`. Only for calibration against classical self-similar
    /// solutions; requires [`SolverConfig::allow_unweighted`].
    Unweighted,
}

impl<T: Real> WeightMode<T> {
    pub fn weight(&self) -> Option<&WeightSpec<T>> {
        match self {
            WeightMode::Weighted(w) => Some(w),
            WeightMode::Unweighted => None,
        }
    }

    fn g(&self, r: T) -> T {
        self.weight().map_or(T::zero(), |w| w.g(r))
    }
}

/// Initial data.
#[derive(Clone)]
pub enum InitialProfile<T> {
    /// `height·(1 − (r/R₀)²)₊`.
    Bump { radius: T, height: T },
    /// Arbitrary non-negative radial profile.
    Custom(ScalarFn<T>),
}

impl<T: std::fmt::Debug> std::fmt::Debug for InitialProfile<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialProfile::Bump { radius, height } => {
                write!(f, "Bump(radius={radius:?}, height={height:?})")
            }
            InitialProfile::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Mesh layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub r_max: T,
    pub n_cells: usize,
    /// Ratio between consecutive cell widths; 1 gives a uniform mesh.
    pub stretch: T,
}

/// Everything a run needs.
#[derive(Debug, Clone)]
pub struct SolverConfig<T> {
    pub eq: EquationParams<T>,
    pub weight: WeightMode<T>,
    pub grid: GridSpec<T>,
    pub initial: InitialProfile<T>,
    /// Support threshold relative to the current `sup u`.
    pub support_threshold: T,
    pub cfl_safety: T,
    /// `ε` in the regularized gradient factor `(s² + ε²)^{(p−2)/2}`.
    pub regularization_eps: T,
    pub t_end: T,
    /// Times at which diagnostics are recorded (sorted, within `(0, t_end]`).
    pub output_times: Vec<T>,
    /// Rescale the data so that the initial weighted mass is 1.
    pub normalize_mass: bool,
    /// Gate for [`WeightMode::Unweighted`].
    pub allow_unweighted: bool,
    /// Instead of failing when the support approaches `r_max`, double the
    /// domain and merge cell pairs. Needs a uniform grid with an even cell count.
    pub auto_extend: bool,
}

impl<T: Real> SolverConfig<T> {
    /// A configuration with the default numerical settings.
    pub fn new(
        eq: EquationParams<T>,
        weight: WeightMode<T>,
        grid: GridSpec<T>,
        initial: InitialProfile<T>,
        t_end: T,
    ) -> Self {
        Self {
            eq,
            weight,
            grid,
            initial,
            support_threshold: lit(1e-12),
            cfl_safety: lit(0.4),
            regularization_eps: T::zero(),
            t_end,
            output_times: vec![t_end],
            normalize_mass: false,
            allow_unweighted: false,
            auto_extend: false,
        }
    }

    /// Output times log-spaced from `t_first` to `t_end`, `per_decade` per decade.
    pub fn with_log_outputs(mut self, t_first: T, per_decade: usize) -> Self {
        self.output_times = log_times(t_first, self.t_end, per_decade);
        self
    }
}

/// Stored amplitudes below this trigger a renormalization of the profile:
/// the fifth root of the smallest normal number (about `2e-62` for `f64`).
pub fn rescale_below<T: Real>() -> T {
    T::min_positive_value().powf(lit(0.2))
}

/// Fraction of the domain the support may occupy before an automatic extension.
pub const EXTEND_FRACTION: f64 = 0.75;

/// Log-spaced times from `t_first` to `t_end` inclusive.
pub fn log_times<T: Real>(t_first: T, t_end: T, per_decade: usize) -> Vec<T> {
    let decades = (t_end / t_first).log10();
    let n = (wide(decades) * per_decade as f64).ceil().max(1.0) as usize;
    let mut out: Vec<T> = (0..n)
        .map(|k| t_first * lit::<T>(10.0).powf(decades * lit(k as f64) / lit(n as f64)))
        .collect();
    out.push(t_end);
    out
}

/// Cell-centred radial mesh with cached weighted volumes and face areas.
#[derive(Debug, Clone)]
pub struct RadialGrid<T> {
    pub dim_n: u32,
    pub faces: Vec<T>,
    pub centers: Vec<T>,
    /// `ω_{N−1} ∫_{cell} r^{N−1} e^{g(r)} dr`.
    pub volumes: Vec<T>,
    /// `ω_{N−1} r^{N−1} e^{g(r)}` at every face.
    pub face_areas: Vec<T>,
}

impl<T: Real> RadialGrid<T> {
    pub fn new(spec: GridSpec<T>, weight: &WeightMode<T>, dim_n: u32) -> Result<Self> {
        if spec.n_cells < 2 || !(spec.r_max > T::zero()) || !(spec.stretch > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "grid needs n_cells >= 2, r_max > 0 and stretch > 0, got {spec:?}"
            )));
        }
        let n = spec.n_cells;
        let faces: Vec<T> = if spec.stretch == T::one() {
            (0..=n).map(|i| spec.r_max * lit(i as f64) / lit(n as f64)).collect()
        } else {
            // Widths h, hq, hq², … summing to r_max.
            let q = spec.stretch;
            let h0 = spec.r_max * (q - T::one()) / (q.powi(n as i32) - T::one());
            let mut f = Vec::with_capacity(n + 1);
            let mut r = T::zero();
            let mut h = h0;
            f.push(r);
            for _ in 0..n {
                r = r + h;
                f.push(r);
                h = h * q;
            }
            f[n] = spec.r_max;
            f
        };
        Self::from_faces(faces, weight, dim_n)
    }

    pub fn from_faces(faces: Vec<T>, weight: &WeightMode<T>, dim_n: u32) -> Result<Self> {
        if faces.first() != Some(&T::zero()) || faces.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "faces must start at 0 and be strictly increasing".into(),
            ));
        }
        let measure = match weight {
            WeightMode::Weighted(w) => RadialMeasure::growing(w, dim_n),
            WeightMode::Unweighted => RadialMeasure::unweighted(dim_n),
        };
        let volumes = cell_volumes(&measure, &faces)?;
        if volumes.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericFailure {
                what: format!("weighted cell volumes overflow below r = {}", faces[faces.len() - 1]),
                error_estimate: f64::INFINITY,
            });
        }
        let omega: T = sphere_area(dim_n);
        let n1 = lit::<T>((dim_n - 1) as f64);
        let face_areas = faces
            .iter()
            .map(|&r| {
                let radial = if dim_n == 1 { T::one() } else { r.powf(n1) };
                omega * radial * weight.g(r).exp()
            })
            .collect();
        let centers = faces.windows(2).map(|w| (w[0] + w[1]) * lit(0.5)).collect();
        Ok(Self {
            dim_n,
            faces,
            centers,
            volumes,
            face_areas,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.centers.len()
    }

    pub fn r_max(&self) -> T {
        *self.faces.last().expect("grid has faces")
    }
}

/// Cell averages at time `t`, stored as `u = scale·ũ`.
///
/// The amplitude `scale` stays 1 unless `sup u` decays below
/// [`rescale_below`]; then the profile is renormalized so that products of
/// cell values cannot underflow. Because the flux is homogeneous of degree
/// `p+m−2` in `u`, a step of length `dt` on `u` is a step of length
/// `scale^{p+m−3}·dt` on `ũ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState<T> {
    pub t: T,
    /// The stored profile `ũ`.
    pub u: Vec<T>,
    pub scale: T,
    pub mass0: T,
    pub sup0: T,
    /// Current `sup ũ`.
    pub sup: T,
    pub dt_last: T,
    pub steps: u64,
}

impl<T: Real> SolverState<T> {
    /// Physical cell averages `scale·ũ`.
    pub fn physical_u(&self) -> Vec<T> {
        self.u.iter().map(|&x| x * self.scale).collect()
    }

    fn rescale(&mut self) {
        let s = self.sup;
        self.u.iter_mut().for_each(|x| *x = *x / s);
        self.scale = self.scale * s;
        self.sup = T::one();
    }
}

/// One row of diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics<T> {
    pub t: T,
    pub sup_u: T,
    pub support_radius: T,
    pub mass: T,
    pub dt_last: T,
}

/// Diagnostics recorded at the configured output times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub rows: Vec<Diagnostics<T>>,
    pub mass0: T,
    pub r_max: T,
    pub steps: u64,
}

impl<T: Real> Trajectory<T> {
    /// Largest `|mass(t)/mass0 − 1|` over the recorded rows.
    pub fn max_mass_drift(&self) -> T {
        self.rows
            .iter()
            .map(|d| (d.mass / self.mass0 - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    pub const CSV_HEADER: &'static str = "t,sup_u,support_radius,mass,dt_last";

    /// CSV with the documented columns and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for d in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                d.t, d.sup_u, d.support_radius, d.mass, d.dt_last
            ));
        }
        out
    }
}

/// Precomputed exponents for the face fluxes.
#[derive(Debug, Clone, Copy)]
struct FluxLaw<T> {
    mobility: Exponent<T>,
    gradient: Exponent<T>,
    eps2: T,
    half_p_minus_2: T,
    stiffness_factor: T,
}

impl<T: Real> FluxLaw<T> {
    fn new(eq: &EquationParams<T>, eps: T) -> Self {
        let p = eq.p();
        Self {
            mobility: Exponent::new(eq.m() - T::one()),
            gradient: Exponent::new(p - lit(2.0)),
            eps2: eps * eps,
            half_p_minus_2: (p - lit(2.0)) * lit(0.5),
            stiffness_factor: (p - T::one()).max(T::one()),
        }
    }

    /// `|s|^{p−2}`, regularized as `(s² + eps2)^{(p−2)/2}` when `eps2 > 0`.
    #[inline]
    fn gradient_factor(&self, s: T, eps2: T) -> T {
        if eps2 > T::zero() {
            (s * s + eps2).powf(self.half_p_minus_2)
        } else {
            self.gradient.pow(s.abs())
        }
    }
}

/// A configured solver: grid, flux law and thresholds.
#[derive(Debug, Clone)]
pub struct Solver<T> {
    config: SolverConfig<T>,
    grid: RadialGrid<T>,
    law: FluxLaw<T>,
}

impl<T: Real> Solver<T> {
    pub fn new(config: SolverConfig<T>) -> Result<Self> {
        let eq = config.eq;
        match &config.weight {
            WeightMode::Unweighted if !config.allow_unweighted => {
                return Err(Error::Precondition(
                    "unweighted (g = 0) mode is a calibration mode and must be explicitly allowed".into(),
                ))
            }
            WeightMode::Weighted(_) if eq.dim_n() < 2 || eq.p() >= eq.n() => {
                return Err(Error::InvalidParameter(format!(
                    "weighted runs need N >= 2 and 1 < p < N, got N = {}, p = {}",
                    eq.dim_n(),
                    eq.p()
                )))
            }
            _ => {}
        }
        if !(config.cfl_safety > T::zero() && config.cfl_safety <= T::one()) {
            return Err(Error::InvalidParameter("cfl_safety must lie in (0, 1]".into()));
        }
        if !(config.t_end > T::zero()) {
            return Err(Error::InvalidParameter("t_end must be positive".into()));
        }
        if config.regularization_eps < T::zero() || config.support_threshold < T::zero() {
            return Err(Error::InvalidParameter(
                "regularization_eps and support_threshold must be non-negative".into(),
            ));
        }
        if config.output_times.windows(2).any(|w| !(w[1] > w[0]))
            || config
                .output_times
                .iter()
                .any(|&t| !(t > T::zero()) || t > config.t_end)
        {
            return Err(Error::InvalidParameter(
                "output times must be increasing and lie in (0, t_end]".into(),
            ));
        }
        if config.auto_extend && (config.grid.stretch != T::one() || !config.grid.n_cells.is_multiple_of(2)) {
            return Err(Error::InvalidParameter(
                "auto_extend needs a uniform grid with an even number of cells".into(),
            ));
        }
        if let InitialProfile::Bump { radius, height } = config.initial {
            if !(radius > T::zero()) || !(height > T::zero()) {
                return Err(Error::InvalidParameter(
                    "bump radius and height must be positive".into(),
                ));
            }
            if radius > config.grid.r_max / lit(8.0) {
                return Err(Error::InvalidParameter(format!(
                    "bump radius {radius} exceeds r_max/8 = {}; leave room for spreading",
                    config.grid.r_max / lit(8.0)
                )));
            }
        }
        let grid = RadialGrid::new(config.grid, &config.weight, eq.dim_n())?;
        let law = FluxLaw::new(&eq, config.regularization_eps);
        Ok(Self { config, grid, law })
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.config
    }

    /// Cell averages of the initial profile (normalized if configured).
    pub fn initial_state(&self) -> Result<SolverState<T>> {
        let profile: Arc<dyn Fn(T) -> T + Send + Sync> = match &self.config.initial {
            InitialProfile::Bump { radius, height } => {
                let (radius, height) = (*radius, *height);
                Arc::new(move |r: T| {
                    let x = r / radius;
                    (height * (T::one() - x * x)).max(T::zero())
                })
            }
            InitialProfile::Custom(f) => f.clone(),
        };
        let support_end = match &self.config.initial {
            InitialProfile::Bump { radius, .. } => Some(*radius),
            InitialProfile::Custom(_) => None,
        };
        let n1 = lit::<T>((self.grid.dim_n - 1) as f64);
        let omega: T = sphere_area(self.grid.dim_n);
        let weight = &self.config.weight;
        let density = |r: T| {
            let radial = if self.grid.dim_n == 1 { T::one() } else { r.powf(n1) };
            radial * weight.g(r).exp()
        };
        let mut u = Vec::with_capacity(self.grid.n_cells());
        for (i, w) in self.grid.faces.windows(2).enumerate() {
            let (a, mut b) = (w[0], w[1]);
            if let Some(end) = support_end {
                if a >= end {
                    u.push(T::zero());
                    continue;
                }
                b = b.min(end);
            }
            let num = integrate(|r| profile(r) * density(r), a, b, QuadOptions::rel(1e-12))?.value;
            let avg = omega * num / self.grid.volumes[i];
            if avg < T::zero() || !avg.is_finite() {
                return Err(Error::InvalidState(
                    "initial profile must be non-negative and finite".into(),
                ));
            }
            u.push(avg);
        }
        let mut mass0 = mass(&self.grid.volumes, &u)?;
        if !(mass0 > T::zero()) {
            return Err(Error::InvalidState("initial data has zero mass".into()));
        }
        if self.config.normalize_mass {
            let scale = T::one() / mass0;
            u.iter_mut().for_each(|x| *x = *x * scale);
            mass0 = mass(&self.grid.volumes, &u)?;
        }
        let sup0 = u.iter().copied().fold(T::zero(), T::max);
        Ok(SolverState {
            t: T::zero(),
            u,
            scale: T::one(),
            mass0,
            sup0,
            sup: sup0,
            dt_last: T::zero(),
            steps: 0,
        })
    }

    /// Absolute support threshold for a state.
    pub fn threshold(&self, state: &SolverState<T>) -> T {
        self.config.support_threshold * state.sup
    }

    /// Face fluxes (index `i` is the face between cells `i−1` and `i`) and the
    /// largest stable time step for the current profile.
    /// `eps2` is the squared regularization in the units of `u`.
    fn fluxes(&self, u: &[T], eps2: T, flux: &mut [T], rate: &mut [T]) -> T {
        let n = u.len();
        let c = &self.grid.centers;
        let half: T = lit(0.5);
        flux[0] = T::zero();
        flux[n] = T::zero();
        rate[0] = T::zero();
        rate[n] = T::zero();
        for i in 1..n {
            let (ul, ur) = (u[i - 1], u[i]);
            let ubar = ((ul + ur) * half).max(T::zero());
            let dr = c[i] - c[i - 1];
            let s = (ur - ul) / dr;
            if ubar == T::zero() || s == T::zero() {
                flux[i] = T::zero();
                rate[i] = T::zero();
                continue;
            }
            let coeff = self.grid.face_areas[i] * self.law.mobility.pow(ubar) * self.law.gradient_factor(s, eps2);
            flux[i] = coeff * s;
            rate[i] = coeff * self.law.stiffness_factor / dr;
        }
        let mut dt = T::infinity();
        for i in 0..n {
            let denom = rate[i] + rate[i + 1];
            if denom > T::zero() {
                dt = dt.min(self.grid.volumes[i] / denom);
            }
        }
        dt * self.config.cfl_safety
    }

    /// Advances one explicit step of at most `dt_cap`; returns the step taken.
    pub fn step(&self, state: &mut SolverState<T>, dt_cap: T) -> Result<T> {
        let n = state.u.len();
        let mut flux = vec![T::zero(); n + 1];
        let mut rate = vec![T::zero(); n + 1];
        let mut scratch = vec![T::zero(); n];
        self.step_with(state, dt_cap, &mut flux, &mut rate, &mut scratch)
    }

    fn step_with(
        &self,
        state: &mut SolverState<T>,
        dt_cap: T,
        flux: &mut [T],
        rate: &mut [T],
        scratch: &mut [T],
    ) -> Result<T> {
        if state.sup > T::zero() && state.sup < rescale_below() {
            state.rescale();
        }
        // Time runs faster on ũ by scale^{p+m−3}.
        let speedup = state.scale.powf(self.config.eq.kappa());
        let eps2 = self.law.eps2 / (state.scale * state.scale);
        let dt_stable = self.fluxes(&state.u, eps2, flux, rate) / speedup;
        let mut dt = dt_stable.min(dt_cap);
        // A step is negligible relative to the interval it is meant to cover.
        let horizon = if dt_cap.is_finite() {
            (state.t + dt_cap).min(self.config.t_end)
        } else {
            self.config.t_end
        };
        let underflow = horizon * lit(1e-15);
        let clip_budget = state.mass0 / state.scale * lit(1e-13);
        loop {
            if dt < underflow && dt < dt_cap {
                return Err(Error::Stiffness {
                    t: wide(state.t),
                    dt: wide(dt),
                });
            }
            let mut clipped = T::zero();
            let mut sup = T::zero();
            let tau = dt * speedup;
            for i in 0..scratch.len() {
                let v = state.u[i] + tau * (flux[i + 1] - flux[i]) / self.grid.volumes[i];
                if v < T::zero() {
                    clipped = clipped - v * self.grid.volumes[i];
                    scratch[i] = T::zero();
                } else {
                    scratch[i] = v;
                    sup = sup.max(v);
                }
            }
            if clipped <= clip_budget {
                state.sup = sup;
                break;
            }
            dt = dt * lit(0.5);
        }
        state.u.copy_from_slice(scratch);
        state.t = state.t + dt;
        state.dt_last = dt;
        state.steps += 1;
        Ok(dt)
    }

    /// Diagnostics of a state.
    pub fn diagnostics(&self, state: &SolverState<T>) -> Result<Diagnostics<T>> {
        let threshold = self.threshold(state);
        let sup_u = state.u.iter().copied().fold(T::zero(), T::max) * state.scale;
        let support_radius = state
            .u
            .iter()
            .rposition(|&x| x > threshold)
            .map_or(T::zero(), |i| self.grid.faces[i + 1]);
        Ok(Diagnostics {
            t: state.t,
            sup_u,
            support_radius,
            mass: mass(&self.grid.volumes, &state.u)? * state.scale,
            dt_last: state.dt_last,
        })
    }

    /// Integrates from `state` up to `t_target`, stopping exactly on it.
    /// With `auto_extend` the grid may be replaced along the way.
    pub fn advance_to(&mut self, state: &mut SolverState<T>, t_target: T) -> Result<()> {
        while !self.advance_within_grid(state, t_target)? {
            self.extend(state)?;
        }
        Ok(())
    }

    /// Steps towards `t_target` on the current grid. Returns `false` when the
    /// support has crossed the extension trigger (only with `auto_extend`).
    fn advance_within_grid(&self, state: &mut SolverState<T>, t_target: T) -> Result<bool> {
        let n = state.u.len();
        let mut flux = vec![T::zero(); n + 1];
        let mut rate = vec![T::zero(); n + 1];
        let mut scratch = vec![T::zero(); n];
        let trigger = if self.config.auto_extend {
            (EXTEND_FRACTION * n as f64) as usize
        } else {
            n - 1
        };
        while state.t < t_target {
            if state.u[trigger] > self.threshold(state) {
                if self.config.auto_extend {
                    return Ok(false);
                }
                return Err(Error::SupportHitsBoundary {
                    t: wide(state.t),
                    r_max: wide(self.grid.r_max()),
                });
            }
            let remaining = t_target - state.t;
            self.step_with(state, remaining, &mut flux, &mut rate, &mut scratch)?;
            if remaining - state.dt_last <= T::zero() {
                state.t = t_target;
            }
        }
        if state.u[trigger] > self.threshold(state) && !self.config.auto_extend {
            return Err(Error::SupportHitsBoundary {
                t: wide(state.t),
                r_max: wide(self.grid.r_max()),
            });
        }
        Ok(true)
    }

    /// Doubles `r_max`, merging cell pairs so that the weighted mass carried
    /// by every merged cell is exactly the sum of its halves.
    pub fn extend(&mut self, state: &mut SolverState<T>) -> Result<()> {
        let n = self.grid.n_cells();
        let spec = GridSpec {
            r_max: self.grid.r_max() * lit(2.0),
            ..self.config.grid
        };
        let grid = RadialGrid::new(spec, &self.config.weight, self.grid.dim_n).map_err(|e| Error::NumericFailure {
            what: format!("cannot extend the domain to r_max = {}: {e}", spec.r_max),
            error_estimate: f64::INFINITY,
        })?;
        let old = &self.grid;
        let mut u = vec![T::zero(); n];
        for (i, ui) in u.iter_mut().take(n / 2).enumerate() {
            let (a, b) = (2 * i, 2 * i + 1);
            *ui = (old.volumes[a] * state.u[a] + old.volumes[b] * state.u[b]) / grid.volumes[i];
        }
        state.u = u;
        state.sup = state.u.iter().copied().fold(T::zero(), T::max);
        self.config.grid = spec;
        self.grid = grid;
        Ok(())
    }

    /// Runs from the initial data through all output times.
    pub fn run(&mut self) -> Result<Trajectory<T>> {
        let mut state = self.initial_state()?;
        self.run_from(&mut state)
    }

    /// Runs from a given state through every output time not yet reached.
    pub fn run_from(&mut self, state: &mut SolverState<T>) -> Result<Trajectory<T>> {
        let mut rows = Vec::with_capacity(self.config.output_times.len() + 1);
        rows.push(self.diagnostics(state)?);
        for t_out in self.config.output_times.clone() {
            if t_out <= state.t {
                continue;
            }
            self.advance_to(state, t_out)?;
            rows.push(self.diagnostics(state)?);
        }
        Ok(Trajectory {
            rows,
            mass0: state.mass0,
            r_max: self.grid.r_max(),
            steps: state.steps,
        })
    }
}

/// Builds a solver and runs it.
pub fn run<T: Real>(config: SolverConfig<T>) -> Result<Trajectory<T>> {
    Solver::new(config)?.run()
}
