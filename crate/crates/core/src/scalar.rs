//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar the laboratory is generic over (`f32` or `f64`).
///
/// Tolerances quoted throughout the crate are stated for `f64`; with `f32`
/// they are clamped to a small multiple of machine epsilon.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Send + Sync + 'static {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Widens a scalar to `f64` for reporting.
#[inline]
pub fn wide<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `max(tol, 16 eps)`: a requested tolerance clamped to what the scalar can resolve.
#[inline]
pub fn resolvable<T: Real>(tol: f64) -> T {
    lit::<T>(tol).max(T::epsilon() * lit(16.0))
}

/// Power with fast paths for the small integer exponents the solver hits
/// in the porous-medium and p = 2 cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent<T> {
    Zero,
    One,
    Two,
    General(T),
}

impl<T: Real> Exponent<T> {
    pub fn new(e: T) -> Self {
        if e == T::zero() {
            Exponent::Zero
        } else if e == T::one() {
            Exponent::One
        } else if e == lit(2.0) {
            Exponent::Two
        } else {
            Exponent::General(e)
        }
    }

    #[inline]
    pub fn pow(self, x: T) -> T {
        match self {
            Exponent::Zero => T::one(),
            Exponent::One => x,
            Exponent::Two => x * x,
            Exponent::General(e) => x.powf(e),
        }
    }
}
