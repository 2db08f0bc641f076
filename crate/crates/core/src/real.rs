//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the focal calculus is evaluated in.
///
/// Tolerances are scalar-dependent: the `f64` values are the reference
/// settings, the `f32` values are loosened to what single precision can
/// actually resolve.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute tolerance for roots in probability space.
    fn solve_tol() -> Self;
    /// Relative residual accepted from the Lambert W iteration.
    fn lambert_tol() -> Self;
    /// Accepted deviation of a probability vector from unit mass.
    fn mass_tol() -> Self;
    /// Largest deviation from unit mass that construction silently renormalizes.
    fn normalize_tol() -> Self;
    /// Accepted `|F(alpha) - 1|` of the normalization root.
    fn normalization_tol() -> Self;

    /// Lossless for the constants used in this crate.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn solve_tol() -> Self {
        1e-12
    }
    fn lambert_tol() -> Self {
        1e-13
    }
    fn mass_tol() -> Self {
        1e-12
    }
    fn normalize_tol() -> Self {
        1e-9
    }
    fn normalization_tol() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn solve_tol() -> Self {
        1e-6
    }
    fn lambert_tol() -> Self {
        1e-6
    }
    fn mass_tol() -> Self {
        1e-5
    }
    fn normalize_tol() -> Self {
        1e-5
    }
    fn normalization_tol() -> Self {
        1e-5
    }
}
