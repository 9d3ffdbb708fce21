//! Quadrature against the radial weighted measure `r^{N−1} e^{g(r)} dr` and
//! its decaying dual `r^{−(N−1)/(p−1)} e^{−g(r)/(p−1)} dr`.

use crate::error::{Error, Result};
use crate::quadrature::{graded_breaks, integrate_tail, integrate_with_breaks, QuadOptions, QuadResult};
use crate::scalar::{lit, Real};
use crate::weight::{sphere_area, WeightSpec};

/// Relative tolerance used for measure integrals.
pub const MEASURE_REL_TOL: f64 = 1e-11;

/// Which radial density the measure carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction<T> {
    /// `r^{N−1} e^{g(r)}`.
    Growing,
    /// `r^{−(N−1)/(p−1)} e^{−g(r)/(p−1)}`.
    DecayingTail { p: T },
}

/// Radial measure for a weight, or for `g ≡ 0` when `weight` is `None`
/// (unweighted calibration mode).
#[derive(Debug, Clone, Copy)]
pub struct RadialMeasure<'w, T> {
    pub weight: Option<&'w WeightSpec<T>>,
    pub dim_n: u32,
    pub direction: Direction<T>,
}

impl<'w, T: Real> RadialMeasure<'w, T> {
    pub fn growing(weight: &'w WeightSpec<T>, dim_n: u32) -> Self {
        Self {
            weight: Some(weight),
            dim_n,
            direction: Direction::Growing,
        }
    }

    pub fn unweighted(dim_n: u32) -> Self {
        Self {
            weight: None,
            dim_n,
            direction: Direction::Growing,
        }
    }

    pub fn decaying_tail(weight: &'w WeightSpec<T>, dim_n: u32, p: T) -> Self {
        Self {
            weight: Some(weight),
            dim_n,
            direction: Direction::DecayingTail { p },
        }
    }

    fn g(&self, r: T) -> T {
        self.weight.map_or(T::zero(), |w| w.g(r))
    }

    /// The radial density at `r` (without the sphere-area factor).
    pub fn density(&self, r: T) -> T {
        let n1: T = lit((self.dim_n - 1) as f64);
        match self.direction {
            Direction::Growing => {
                if self.dim_n == 1 {
                    self.g(r).exp()
                } else {
                    r.powf(n1) * self.g(r).exp()
                }
            }
            Direction::DecayingTail { p } => {
                let q = p - T::one();
                if self.dim_n == 1 {
                    (-self.g(r) / q).exp()
                } else {
                    (-(n1 / q) * r.ln() - self.g(r) / q).exp()
                }
            }
        }
    }

    /// `∫ₐᵇ h(r)·density(r) dr`; `b = +∞` is allowed only for the decaying tail.
    pub fn integrate<H: Fn(T) -> T>(&self, h: H, a: T, b: T) -> Result<QuadResult<T>> {
        let opts = QuadOptions::rel(MEASURE_REL_TOL);
        if !(a >= T::zero()) || !(b > a) {
            return Err(Error::InvalidParameter(format!(
                "integration bounds must satisfy 0 <= a < b, got a = {a}, b = {b}"
            )));
        }
        let f = |r: T| h(r) * self.density(r);
        if b.is_infinite() {
            if !matches!(self.direction, Direction::DecayingTail { .. }) {
                return Err(Error::InvalidParameter(
                    "an infinite upper limit requires the decaying-tail measure".into(),
                ));
            }
            return integrate_tail(f, a, opts);
        }
        let breaks = if a == T::zero() {
            graded_breaks(a, b, 6)
        } else {
            vec![a, b]
        };
        integrate_with_breaks(f, &breaks, opts)
    }
}

/// Per-cell weighted volumes `ω_{N−1} ∫_{cell} r^{N−1} e^{g(r)} dr` for a
/// partition given by increasing faces.
pub fn cell_volumes<T: Real>(measure: &RadialMeasure<'_, T>, faces: &[T]) -> Result<Vec<T>> {
    let omega: T = sphere_area(measure.dim_n);
    faces
        .windows(2)
        .map(|w| {
            let v = match measure.weight {
                None => {
                    let n: T = lit(measure.dim_n as f64);
                    (w[1].powf(n) - w[0].powf(n)) / n
                }
                Some(_) => measure.integrate(|_| T::one(), w[0], w[1])?.value,
            };
            Ok(omega * v)
        })
        .collect()
}

/// Total weighted mass `Σ uᵢ Vᵢ` of a cell-averaged profile.
pub fn mass<T: Real>(volumes: &[T], u: &[T]) -> Result<T> {
    if volumes.len() != u.len() {
        return Err(Error::InvalidState(format!(
            "profile has {} cells but the grid has {}",
            u.len(),
            volumes.len()
        )));
    }
    let mut total = T::zero();
    for (&v, &ui) in volumes.iter().zip(u) {
        if ui < T::zero() || !ui.is_finite() {
            return Err(Error::InvalidState(format!("negative or non-finite cell value {ui}")));
        }
        total = total + v * ui;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn unweighted_moments() {
        for n in 1..=4 {
            let m = RadialMeasure::<f64>::unweighted(n);
            let v = m.integrate(|_| 1.0, 0.0, 1.0).unwrap().value;
            assert_relative_eq!(v, 1.0 / n as f64, max_relative = 1e-13);
        }
    }

    #[test]
    fn linear_weight_identity() {
        // ∫₀¹ r e^r dr = 1
        let w = WeightSpec::power(1.0).unwrap();
        let m = RadialMeasure::growing(&w, 2);
        assert_relative_eq!(m.integrate(|_| 1.0, 0.0, 1.0).unwrap().value, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn infinite_limit_requires_tail_measure() {
        let w = WeightSpec::power(0.5).unwrap();
        let m = RadialMeasure::growing(&w, 3);
        assert!(m.integrate(|_| 1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn mass_examples() {
        let faces: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
        let unweighted = RadialMeasure::unweighted(3);
        let vols = cell_volumes(&unweighted, &faces).unwrap();
        assert_eq!(mass(&vols, &vec![0.0; 50]).unwrap(), 0.0);
        assert_relative_eq!(
            mass(&vols, &vec![1.0; 50]).unwrap(),
            4.0 * PI / 3.0,
            max_relative = 1e-13
        );

        let w = WeightSpec::power(1.0).unwrap();
        let vols = cell_volumes(&RadialMeasure::growing(&w, 2), &faces).unwrap();
        assert_relative_eq!(mass(&vols, &vec![1.0; 50]).unwrap(), 2.0 * PI, max_relative = 1e-12);

        let mut bad = vec![1.0; 50];
        bad[3] = -1e-3;
        assert!(matches!(mass(&vols, &bad), Err(Error::InvalidState(_))));
    }
}
