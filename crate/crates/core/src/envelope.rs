//! Large-time envelopes: the sup-norm decay bound
//!
//! ```text
//! ‖u(t)‖_∞ ≤ c [g⁻¹(L)^p / L]^{1/k} t^{−1/k} M^{−1},   L = log(t M^k),
//! ```
//!
//! and the support radius `R(t) = c·g⁻¹(log(e + t M^k))`, where `M` is the
//! initial weighted mass and `k = p + m − 3`.

use crate::checks::check_structural_conditions;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::weight::{EquationParams, WeightKind, WeightSpec};

/// Smallest admissible `log(t M^k)` for the sup envelope.
pub const LOG_GATE: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct EnvelopeParams<T> {
    pub eq: EquationParams<T>,
    pub weight: WeightSpec<T>,
    /// Initial weighted mass `M`.
    pub mass0: T,
    pub c_prefactor: T,
}

impl<T: Real> EnvelopeParams<T> {
    /// Envelope with unit prefactor.
    pub fn new(eq: EquationParams<T>, weight: WeightSpec<T>, mass0: T) -> Result<Self> {
        if !(mass0 > T::zero()) || !mass0.is_finite() {
            return Err(Error::InvalidParameter(format!("mass0 must be positive, got {mass0}")));
        }
        Ok(Self {
            eq,
            weight,
            mass0,
            c_prefactor: T::one(),
        })
    }

    pub fn with_prefactor(mut self, c: T) -> Self {
        self.c_prefactor = c;
        self
    }

    /// Same envelope with a different initial mass.
    pub fn with_mass(&self, mass0: T) -> Result<Self> {
        Ok(Self::new(self.eq, self.weight.clone(), mass0)?.with_prefactor(self.c_prefactor))
    }

    /// Whether the weight exponents lie in the range `1 > α₂ ≥ α₁ ≥ α₂/(α₂+1)`
    /// under which the sup bound is established.
    pub fn sup_range_holds(&self) -> bool {
        check_structural_conditions(&self.weight, &self.eq).alpha_range_sur_n
    }

    /// The time `t M^k` that enters both envelopes.
    pub fn scaled_time(&self, t: T) -> T {
        t * self.mass0.powf(self.eq.kappa())
    }

    pub fn sup_envelope(&self, t: T) -> Result<T> {
        let k = self.eq.kappa();
        let log_arg = self.scaled_time(t).ln();
        if !(log_arg >= lit(LOG_GATE)) {
            return Err(Error::EnvelopeUndefined(format!(
                "log(t M^k) = {log_arg} is below the large-time gate {LOG_GATE} (t = {t})"
            )));
        }
        let s = self.weight.invert_g(log_arg)?;
        let inv_k = T::one() / k;
        Ok(self.c_prefactor * (s.powf(self.eq.p()) / log_arg).powf(inv_k) * t.powf(-inv_k) / self.mass0)
    }

    pub fn support_envelope(&self, t: T) -> Result<T> {
        if !(t >= T::zero()) {
            return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
        }
        let arg = (T::E() + self.scaled_time(t)).ln();
        Ok(self.c_prefactor * self.weight.invert_g(arg)?)
    }
}

/// Exact and asymptotic envelopes for a Zygmund weight at unit mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZygmundEnvelopes<T> {
    pub t: T,
    /// `None` when the weight is outside the range of the sup bound.
    pub sup_exact: Option<T>,
    pub sup_asymptotic: Option<T>,
    pub support_exact: T,
    pub support_asymptotic: T,
}

/// Evaluates the envelopes of a Zygmund weight `s^α[log(c+s)]^β` both through
/// `g⁻¹` and through the leading-order forms
///
/// ```text
/// sup ≈ [(1/log t)(log t/(log log t)^β)^{p/α}]^{1/k} t^{−1/k},
/// R   ≈ (log t/(log log t)^β)^{1/α}.
/// ```
///
/// The sup forms are only returned when `α+β < 1` and `α > (α+β)/(α+β+1)`.
pub fn zygmund_envelopes<T: Real>(par: &EnvelopeParams<T>, t: T) -> Result<ZygmundEnvelopes<T>> {
    let (alpha, beta) = match par.weight.kind() {
        WeightKind::Zygmund { alpha, beta, .. } => (*alpha, *beta),
        _ => {
            return Err(Error::InvalidParameter(
                "zygmund_envelopes needs a Zygmund weight".into(),
            ))
        }
    };
    if par.mass0 != T::one() {
        return Err(Error::InvalidParameter(
            "Zygmund envelopes are stated at unit mass".into(),
        ));
    }
    let log_t = t.ln();
    if !(log_t > T::one()) || !(log_t.ln() > T::one()) {
        return Err(Error::EnvelopeUndefined(format!(
            "log log t must exceed 1 for the Zygmund forms, got t = {t}"
        )));
    }
    let core = log_t / log_t.ln().powf(beta);
    let support_asymptotic = par.c_prefactor * core.powf(T::one() / alpha);
    let support_exact = par.support_envelope(t)?;
    let ab = alpha + beta;
    let (sup_exact, sup_asymptotic) = if ab < T::one() && alpha > ab / (ab + T::one()) {
        let k = par.eq.kappa();
        let inv_k = T::one() / k;
        let asym = par.c_prefactor * (core.powf(par.eq.p() / alpha) / log_t).powf(inv_k) * t.powf(-inv_k);
        (Some(par.sup_envelope(t)?), Some(asym))
    } else {
        (None, None)
    };
    Ok(ZygmundEnvelopes {
        t,
        sup_exact,
        sup_asymptotic,
        support_exact,
        support_asymptotic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn power_params(alpha: f64, mass0: f64) -> EnvelopeParams<f64> {
        EnvelopeParams::new(
            EquationParams::new(3, 2.0, 2.0).unwrap(),
            WeightSpec::power(alpha).unwrap(),
            mass0,
        )
        .unwrap()
    }

    #[test]
    fn sup_envelope_example() {
        let par = power_params(0.5, 1.0);
        let t = 16f64.exp();
        assert_relative_eq!(
            par.sup_envelope(t).unwrap(),
            4096.0 * (-16f64).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn sup_envelope_gate() {
        let par = power_params(0.5, 1.0);
        assert!(matches!(par.sup_envelope(5.0), Err(Error::EnvelopeUndefined(_))));
        assert!(par.sup_envelope(2f64.exp()).is_ok());
    }

    #[test]
    fn power_closed_forms() {
        for &(alpha, p, m, mass0) in &[
            (0.5f64, 2.0f64, 2.0f64, 1.0f64),
            (0.7, 2.5, 1.5, 3.0),
            (0.3, 1.5, 2.5, 0.2),
        ] {
            let eq = EquationParams::new(3, p, m).unwrap();
            let par = EnvelopeParams::new(eq, WeightSpec::power(alpha).unwrap(), mass0)
                .unwrap()
                .with_prefactor(1.7);
            let k = p + m - 3.0;
            for i in 0..40 {
                let t = 10f64.powf(2.0 + 0.3 * i as f64);
                let l = (t * mass0.powf(k)).ln();
                let sup = 1.7 * l.powf((p - alpha) / (alpha * k)) * t.powf(-1.0 / k) / mass0;
                assert_relative_eq!(par.sup_envelope(t).unwrap(), sup, max_relative = 1e-12);
                let r = 1.7 * (std::f64::consts::E + t * mass0.powf(k)).ln().powf(1.0 / alpha);
                assert_relative_eq!(par.support_envelope(t).unwrap(), r, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn support_at_time_zero_is_prefactor() {
        let par = power_params(0.5, 7.0).with_prefactor(2.5);
        assert_relative_eq!(par.support_envelope(0.0).unwrap(), 2.5, max_relative = 1e-15);
    }

    #[test]
    fn envelopes_are_monotone() {
        let par = power_params(0.5, 1.0);
        let ts: Vec<f64> = (0..60).map(|i| 10f64.powf(2.0 + 0.2 * i as f64)).collect();
        for w in ts.windows(2) {
            assert!(par.sup_envelope(w[1]).unwrap() < par.sup_envelope(w[0]).unwrap());
            assert!(par.support_envelope(w[1]).unwrap() >= par.support_envelope(w[0]).unwrap());
        }
    }

    #[test]
    fn mass_scaling() {
        // t^{-1/k} M^{-1} = (t M^k)^{-1/k}, so both envelopes depend on
        // (t, M) only through t M^k.
        for &(p, m) in &[(2.0, 2.0), (2.5, 1.5)] {
            let eq = EquationParams::new(3, p, m).unwrap();
            let k: f64 = p + m - 3.0;
            let base = EnvelopeParams::new(eq, WeightSpec::power(0.5).unwrap(), 1.0).unwrap();
            for &lambda in &[0.5, 2.0, 10.0] {
                let scaled = base.with_mass(lambda).unwrap();
                for &t in &[1e3, 1e5, 1e8] {
                    let lhs = scaled.sup_envelope(t).unwrap();
                    let rhs = base.sup_envelope(lambda.powf(k) * t).unwrap();
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
                    assert_relative_eq!(
                        scaled.support_envelope(t).unwrap(),
                        base.support_envelope(lambda.powf(k) * t).unwrap(),
                        max_relative = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn zygmund_forms() {
        let eq = EquationParams::new(3, 2.0, 2.0).unwrap();
        let par = EnvelopeParams::new(eq, WeightSpec::zygmund(0.5, 1.0, 2.0).unwrap(), 1.0).unwrap();
        let e6 = zygmund_envelopes(&par, 1e6).unwrap();
        let e12 = zygmund_envelopes(&par, 1e12).unwrap();
        // α+β = 1.5 is outside the sup range.
        assert!(e6.sup_exact.is_none());
        let r6 = e6.support_exact / e6.support_asymptotic;
        let r12 = e12.support_exact / e12.support_asymptotic;
        assert!((0.5..=2.0).contains(&r6) && (0.5..=2.0).contains(&r12));
        assert!(zygmund_envelopes(&par, 10.0).is_err());

        let narrow = EnvelopeParams::new(eq, WeightSpec::zygmund(0.6, 0.1, 2.0).unwrap(), 1.0).unwrap();
        let z = zygmund_envelopes(&narrow, 1e8).unwrap();
        assert!(z.sup_exact.unwrap() > 0.0 && z.sup_asymptotic.unwrap() > 0.0);
    }
}
