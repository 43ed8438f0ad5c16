//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::ToPrimitive;

/// Real floating-point scalar usable with the dense nalgebra decompositions
/// (Schur, symmetric eigen, SVD, Cholesky, LU).
///
/// Tolerances throughout the crate are written as `f64` literals and
/// converted with [`Real::lit`], so an `f32` instantiation silently loses
/// precision on constants tighter than its epsilon. Callers choosing `f32`
/// should loosen tolerances accordingly.
pub trait Real: RealField + Copy + ToPrimitive + Display + Debug + Send + Sync + 'static {
    /// Converts an `f64` constant into this scalar type.
    fn lit(x: f64) -> Self;

    /// Lossy conversion to `f64` (used for serialization and reporting).
    fn as_f64(self) -> f64;

    /// Unit roundoff of the type.
    fn eps() -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn eps() -> Self {
                <$t>::EPSILON
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_round_trip() {
        assert_eq!(<f64 as Real>::lit(0.25).as_f64(), 0.25);
        assert_eq!(<f32 as Real>::lit(0.5).as_f64(), 0.5);
        assert!(<f32 as Real>::eps().as_f64() > <f64 as Real>::eps());
    }
}
