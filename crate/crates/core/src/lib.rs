//! Numerical laboratory for doubly degenerate parabolic equations with
//! exponential weights,
//!
//! ```text
//! f(x) ∂ₜu − div( f(x) u^{m−1} |∇u|^{p−2} ∇u ) = 0,   f(x) = e^{g(|x|)}.
//! ```
//!
//! The crate is generic over the scalar type (see [`Real`]); the aliases at
//! the crate root fix it to `f64`, which is what the stated tolerances assume.

pub mod checks;
pub mod envelope;
pub mod error;
pub mod fit;
pub mod inequality;
pub mod measure;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod weight;

pub use error::{Error, Result};
pub use scalar::Real;

/// Weight with `f64` scalars.
pub type Weight = weight::WeightSpec<f64>;
/// Equation parameters with `f64` scalars.
pub type Equation = weight::EquationParams<f64>;
/// Radial measure with `f64` scalars.
pub type Measure<'w> = measure::RadialMeasure<'w, f64>;
/// Solver configuration with `f64` scalars.
pub type Config = solver::SolverConfig<f64>;
/// Solver state with `f64` scalars.
pub type State = solver::SolverState<f64>;
/// Radial grid with `f64` scalars.
pub type Grid = solver::RadialGrid<f64>;
/// Trajectory with `f64` scalars.
pub type Trajectory = solver::Trajectory<f64>;

/// Envelope parameters with `f64` scalars.
pub type Envelope = envelope::EnvelopeParams<f64>;
/// Inequality report with `f64` scalars.
pub type InequalityReport = inequality::InequalityReport<f64>;
/// Fit report with `f64` scalars.
pub type FitReport = fit::FitReport<f64>;
