//! Scalar abstractions.
//!
//! [`Scalar`] is what the simplex and hull code needs: ordered field
//! arithmetic plus a notion of "negligible". It is implemented for `f32`,
//! `f64` and exact [`BigRational`]. [`Real`] adds the transcendental
//! functions required by the Fourier and trigonometric code, so it only
//! covers the floating point types.

use std::fmt::{Debug, Display, LowerExp};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive, Zero};

/// Ordered field element usable by the linear programming core.
pub trait Scalar:
    Num + Clone + PartialOrd + Debug + FromPrimitive + ToPrimitive + std::ops::Neg<Output = Self>
{
    /// Default pivot / rank threshold. Zero for exact types.
    fn default_pivot_eps() -> Self;

    /// Default decision tolerance for hull residuals and separation margins.
    fn default_tolerance() -> Self;

    /// `true` for exact arithmetic.
    fn is_exact() -> bool;

    fn magnitude(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Square root. Exact types return the nearest value reachable through `f64`.
    fn square_root(&self) -> Self;

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! float_scalar {
    ($t:ty, $pivot:expr, $tol:expr) => {
        impl Scalar for $t {
            fn default_pivot_eps() -> Self {
                $pivot
            }
            fn default_tolerance() -> Self {
                $tol
            }
            fn is_exact() -> bool {
                false
            }
            fn magnitude(&self) -> Self {
                self.abs()
            }
            fn square_root(&self) -> Self {
                self.sqrt()
            }
        }
    };
}

float_scalar!(f64, 1e-11, 1e-9);
float_scalar!(f32, 1e-6, 1e-4);

impl Scalar for BigRational {
    fn default_pivot_eps() -> Self {
        BigRational::zero()
    }
    fn default_tolerance() -> Self {
        BigRational::zero()
    }
    fn is_exact() -> bool {
        true
    }
    fn square_root(&self) -> Self {
        let approx = self.to_f64().unwrap_or(0.0).sqrt();
        BigRational::from_float(approx)
            .unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)))
    }
}

/// Floating point scalar with trigonometry, used by the Fourier layer.
pub trait Real:
    Scalar + Float + FloatConst + Display + LowerExp + Send + Sync + Default + 'static
{
    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64")
    }
}

impl Real for f64 {}
impl Real for f32 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_is_exact() {
        assert!(BigRational::is_exact());
        assert!(BigRational::default_tolerance().is_zero());
        let x = BigRational::new(BigInt::from(-3), BigInt::from(4));
        assert_eq!(
            x.magnitude(),
            BigRational::new(BigInt::from(3), BigInt::from(4))
        );
    }

    #[test]
    fn float_magnitude() {
        assert_eq!((-2.5f64).magnitude(), 2.5);
        assert_eq!(4.0f32.square_root(), 2.0);
    }
}
