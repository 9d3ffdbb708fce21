//! TOML experiment configuration and its validation into library types.
//!
//! Every cross-field condition is checked by [`ExperimentConfig::validate`]
//! before any computation starts; messages name the violated condition.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use weighted_diffusion::checks::check_structural_conditions;
use weighted_diffusion::inequality::InequalityKind;
use weighted_diffusion::solver::{GridSpec, InitialProfile, WeightMode};
use weighted_diffusion::{Config, Equation, Weight};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for randomized test-function families; `--seed` overrides it.
    #[serde(default)]
    pub seed: u64,
    pub weight: WeightConfig,
    pub equation: EquationConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub inequalities: InequalitySection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub weight_check: WeightCheckSection,
}

/// Choice of `g`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightConfig {
    /// `g(s) = s^alpha`.
    Power { alpha: f64 },
    /// `g(s) = s^alpha [log(c + s)]^beta`.
    Zygmund {
        alpha: f64,
        beta: f64,
        #[serde(default = "default_zygmund_c")]
        c: f64,
    },
    /// A named closed-form `g` with declared envelope exponents.
    Custom {
        name: CustomWeight,
        alpha1: f64,
        alpha2: f64,
    },
    /// `g ≡ 0`, only with `--allow-unweighted`.
    None,
}

/// Closed-form weights available to `kind = "custom"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CustomWeight {
    /// `g(s) = s^alpha1 + s^alpha2`.
    TwoPower,
    /// `g(s) = e^s − 1`, which grows faster than any power.
    Expm1,
}

fn default_zygmund_c() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationConfig {
    pub n: u32,
    pub p: f64,
    pub m: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub r_max: f64,
    pub n_cells: usize,
    pub stretch: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            r_max: 16.0,
            n_cells: 400,
            stretch: 1.0,
        }
    }
}

/// Checkpoint encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckpointFormat {
    Text,
    Binary,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub initial_radius: f64,
    pub initial_height: f64,
    pub t_end: f64,
    pub t_first: f64,
    pub per_decade: usize,
    pub cfl_safety: f64,
    pub support_threshold: f64,
    pub regularization_eps: f64,
    pub normalize_mass: bool,
    pub auto_extend: bool,
    /// Width in decades of the support-slope window (ending at the last output).
    pub fit_support_decades: f64,
    /// Width in decades of the sup-ratio window.
    pub fit_sup_decades: f64,
    /// Write the final state to `checkpoint.txt` or `checkpoint.bin`.
    pub checkpoint: Option<CheckpointFormat>,
    /// Resume from a checkpoint written on the configured grid.
    pub resume: Option<PathBuf>,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            initial_radius: 1.0,
            initial_height: 1.0,
            t_end: 1e6,
            t_first: 1e-2,
            per_decade: 10,
            cfl_safety: 0.4,
            support_threshold: 1e-12,
            regularization_eps: 0.0,
            normalize_mass: true,
            auto_extend: false,
            fit_support_decades: 2.0,
            fit_sup_decades: 1.0,
            checkpoint: None,
            resume: None,
        }
    }
}

/// Inequalities to certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityChoice {
    Poincare,
    RadialSobolev,
    BoundedSobolev,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InequalitySection {
    pub kinds: Vec<InequalityChoice>,
    pub q: f64,
    pub r0: f64,
    pub radii: Vec<f64>,
    /// Seeded random bumps added to each ball family.
    pub random_bumps: usize,
}

impl Default for InequalitySection {
    fn default() -> Self {
        Self {
            kinds: vec![
                InequalityChoice::Poincare,
                InequalityChoice::RadialSobolev,
                InequalityChoice::BoundedSobolev,
            ],
            q: 3.0,
            r0: 1.0,
            radii: vec![1.0, 2.0, 4.0],
            random_bumps: 20,
        }
    }
}

/// Lists swept as a Cartesian product; an empty list keeps the base value.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub alphas: Vec<f64>,
    pub ps: Vec<f64>,
    pub ms: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightCheckSection {
    pub s_min: f64,
    pub s_max: f64,
    pub points: usize,
    pub taus: Vec<f64>,
}

impl Default for WeightCheckSection {
    fn default() -> Self {
        Self {
            s_min: 1e-3,
            s_max: 1e6,
            points: 300,
            taus: vec![1e2, 1e4, 1e6, 1e8],
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// The weight, or `None` for `kind = "none"`.
    pub fn weight(&self) -> Result<Option<Weight>> {
        let w = match self.weight {
            WeightConfig::Power { alpha } => Weight::power(alpha)?,
            WeightConfig::Zygmund { alpha, beta, c } => Weight::zygmund(alpha, beta, c)?,
            WeightConfig::Custom { name, alpha1, alpha2 } => match name {
                CustomWeight::TwoPower => Weight::custom(
                    "two_power",
                    Arc::new(move |s: f64| s.powf(alpha1) + s.powf(alpha2)),
                    Arc::new(move |s: f64| alpha1 * s.powf(alpha1 - 1.0) + alpha2 * s.powf(alpha2 - 1.0)),
                    alpha1,
                    alpha2,
                )?,
                CustomWeight::Expm1 => Weight::custom(
                    "expm1",
                    Arc::new(|s: f64| s.exp_m1()),
                    Arc::new(|s: f64| s.exp()),
                    alpha1,
                    alpha2,
                )?,
            },
            WeightConfig::None => return Ok(None),
        };
        Ok(Some(w))
    }

    /// The weight, refusing `kind = "none"`.
    pub fn require_weight(&self) -> Result<Weight> {
        self.weight()?
            .context("this command needs a weight; kind = \"none\" (g = 0) is only for simulate and sweep")
    }

    /// Equation parameters; weighted runs need `N ≥ 2`, `1 < p < N` and
    /// `α₂ < min(N, p/(p−1))` on top of `p + m − 3 > 0`.
    pub fn equation(&self) -> Result<Equation> {
        let e = self.equation;
        match self.weight()? {
            Some(w) => {
                let eq = Equation::new(e.n, e.p, e.m)?;
                eq.check_weight(&w)?;
                Ok(eq)
            }
            None => Ok(Equation::calibration(e.n, e.p, e.m)?),
        }
    }

    /// Solver configuration for `simulate` and each sweep point.
    pub fn solver_config(&self, allow_unweighted: bool) -> Result<Config> {
        let eq = self.equation()?;
        let weight = match self.weight()? {
            Some(w) => WeightMode::Weighted(w),
            None if allow_unweighted => WeightMode::Unweighted,
            None => bail!("weight kind \"none\" (g = 0) is a calibration mode; pass --allow-unweighted"),
        };
        let s = &self.solver;
        if !(s.t_first > 0.0 && s.t_first < s.t_end) {
            bail!(
                "solver.t_first must satisfy 0 < t_first < t_end, got {} and {}",
                s.t_first,
                s.t_end
            );
        }
        if s.per_decade == 0 {
            bail!("solver.per_decade must be at least 1");
        }
        if !(s.fit_support_decades > 0.0 && s.fit_sup_decades > 0.0) {
            bail!("fit windows must span a positive number of decades");
        }
        let mut config = Config::new(
            eq,
            weight,
            GridSpec {
                r_max: self.grid.r_max,
                n_cells: self.grid.n_cells,
                stretch: self.grid.stretch,
            },
            InitialProfile::Bump {
                radius: s.initial_radius,
                height: s.initial_height,
            },
            s.t_end,
        )
        .with_log_outputs(s.t_first, s.per_decade);
        config.cfl_safety = s.cfl_safety;
        config.support_threshold = s.support_threshold;
        config.regularization_eps = s.regularization_eps;
        config.normalize_mass = s.normalize_mass;
        config.auto_extend = s.auto_extend;
        config.allow_unweighted = allow_unweighted;
        Ok(config)
    }

    /// The selected inequalities, after checking each one's hypotheses.
    pub fn inequality_kinds(&self) -> Result<Vec<InequalityKind<f64>>> {
        let w = self.require_weight()?;
        let eq = self.equation()?;
        let sec = &self.inequalities;
        let cond = check_structural_conditions(&w, &eq);
        let (n, p, q) = (eq.n(), eq.p(), sec.q);
        let p_star = n * p / (n - p);
        let needs_q = sec.kinds.iter().any(|k| *k != InequalityChoice::Poincare);
        if needs_q && !(q > p && q < p_star) {
            bail!("Sobolev exponent condition p < q < Np/(N-p) violated: p = {p}, q = {q}, Np/(N-p) = {p_star}");
        }
        if !cond.cond_nn {
            bail!(
                "structural condition (N-p)a1/(a1+1) + (p-1)(a1 - a2/(a2+1)) >= 0 violated for a1 = {}, a2 = {}",
                w.alpha1(),
                w.alpha2()
            );
        }
        let mut kinds = Vec::new();
        for choice in &sec.kinds {
            match choice {
                InequalityChoice::Poincare => kinds.push(InequalityKind::Poincare),
                InequalityChoice::RadialSobolev => {
                    if !cond.alpha2_lt_1 {
                        bail!("radial Sobolev needs a2 < 1, got a2 = {}", w.alpha2());
                    }
                    if !cond.cond_p {
                        bail!(
                            "structural condition (N+1)a1/(a1+1) >= a2 violated for a1 = {}, a2 = {}",
                            w.alpha1(),
                            w.alpha2()
                        );
                    }
                    if !(sec.r0 > 0.0 && sec.r0.is_finite()) {
                        bail!("inequalities.r0 must be positive, got {}", sec.r0);
                    }
                    kinds.push(InequalityKind::RadialSobolev { q, r0: sec.r0 });
                }
                InequalityChoice::BoundedSobolev => {
                    if !(w.alpha2() <= 1.0) {
                        bail!("bounded Sobolev needs a2 <= 1, got a2 = {}", w.alpha2());
                    }
                    if sec.radii.is_empty() {
                        bail!("inequalities.radii must list at least one ball radius");
                    }
                    for &radius in &sec.radii {
                        if !(radius > 0.0 && radius.is_finite()) {
                            bail!("ball radius must be positive and finite, got {radius}");
                        }
                        kinds.push(InequalityKind::BoundedSobolev { q, radius });
                    }
                }
            }
        }
        Ok(kinds)
    }

    /// This configuration with the weight exponent and `(p, m)` replaced.
    pub fn with_point(&self, alpha: Option<f64>, p: f64, m: f64) -> Result<Self> {
        let mut out = self.clone();
        out.equation.p = p;
        out.equation.m = m;
        if let Some(a) = alpha {
            match &mut out.weight {
                WeightConfig::Power { alpha } | WeightConfig::Zygmund { alpha, .. } => *alpha = a,
                _ => bail!("sweep.alphas needs a power or Zygmund weight"),
            }
        }
        Ok(out)
    }

    /// Checks everything the command will need, before any computation.
    pub fn validate(&self, command: Command, allow_unweighted: bool) -> Result<()> {
        match command {
            Command::WeightCheck => {
                self.require_weight()?;
                self.equation()?;
                let s = &self.weight_check;
                if !(s.s_min > 0.0 && s.s_max > s.s_min && s.points >= 2) {
                    bail!("weight_check needs 0 < s_min < s_max and at least 2 points");
                }
                if matches!(self.weight, WeightConfig::Zygmund { .. })
                    && s.taus.iter().any(|&t| !(t > std::f64::consts::E))
                {
                    bail!("weight_check.taus must exceed e");
                }
            }
            Command::Inequalities => {
                self.inequality_kinds()?;
            }
            Command::Simulate => {
                self.solver_config(allow_unweighted)?;
            }
            Command::Sweep => {
                for (alpha, p, m) in self.sweep_points() {
                    self.with_point(alpha, p, m)?
                        .solver_config(allow_unweighted)
                        .with_context(|| sweep_label(alpha, p, m))?;
                }
            }
        }
        Ok(())
    }

    /// `(α, p, m)` points in row-major order over `alphas × ps × ms`.
    pub fn sweep_points(&self) -> Vec<(Option<f64>, f64, f64)> {
        let s = &self.sweep;
        let alphas: Vec<Option<f64>> = if s.alphas.is_empty() {
            vec![None]
        } else {
            s.alphas.iter().copied().map(Some).collect()
        };
        let ps = if s.ps.is_empty() {
            vec![self.equation.p]
        } else {
            s.ps.clone()
        };
        let ms = if s.ms.is_empty() {
            vec![self.equation.m]
        } else {
            s.ms.clone()
        };
        let mut out = Vec::new();
        for &a in &alphas {
            for &p in &ps {
                for &m in &ms {
                    out.push((a, p, m));
                }
            }
        }
        out
    }
}

pub fn sweep_label(alpha: Option<f64>, p: f64, m: f64) -> String {
    match alpha {
        Some(a) => format!("sweep point alpha = {a}, p = {p}, m = {m}"),
        None => format!("sweep point p = {p}, m = {m}"),
    }
}

/// Subcommands, for validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    WeightCheck,
    Inequalities,
    Simulate,
    Sweep,
}
