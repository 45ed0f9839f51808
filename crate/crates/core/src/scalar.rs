use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point type the numerics are generic over.
///
/// Implemented for `f32` and `f64`. Quadrature tolerances are clamped to a
/// small multiple of the type's epsilon, so single precision works with the
/// default settings but delivers correspondingly fewer digits.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in the scalar type")
    }

    /// Smallest tolerance worth requesting from an adaptive scheme.
    #[inline]
    fn noise_floor() -> Self {
        Self::epsilon() * Self::lit(1000.0)
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `x / tanh(x)`, continuous at the origin.
pub(crate) fn x_coth_x<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        let x2 = x * x;
        T::one() + x2 / T::lit(3.0) - x2 * x2 / T::lit(45.0)
    } else {
        x / x.tanh()
    }
}

/// `coth(x)` for `x > 0`.
pub(crate) fn coth<T: Real>(x: T) -> T {
    T::one() / x.tanh()
}

pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_coth_x_is_smooth_across_series_switch() {
        let x = 0.99e-4f64;
        assert!((x_coth_x(x) - x / x.tanh()).abs() < 1e-15);
        assert_eq!(x_coth_x(0.0f64), 1.0);
        assert!((x_coth_x(2.0f64) - 2.0 / 2.0f64.tanh()).abs() < 1e-15);
    }
}
