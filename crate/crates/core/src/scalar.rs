//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};

/// Real field the simulator is generic over (`f32` or `f64`).
///
/// The associated thresholds are precision dependent: the `f64` values are
/// the ones quoted throughout the documentation, the `f32` values are scaled
/// to what single precision can resolve.
pub trait Scalar: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {
    /// Tolerance on `|‖v‖² − 1|` accepted when refining a vector to a unit vector.
    fn norm_tol() -> Self;
    /// Overlaps `|⟨f|i⟩|` at or below this are treated as orthogonal.
    fn overlap_floor() -> Self;
    /// Success probabilities at or below this have no normalized output state.
    fn probability_floor() -> Self;

    /// Converts an `f64` literal; every literal used by the crate is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn norm_tol() -> Self {
        1e-9
    }
    fn overlap_floor() -> Self {
        1e-14
    }
    fn probability_floor() -> Self {
        1e-28
    }
}

impl Scalar for f32 {
    fn norm_tol() -> Self {
        1e-5
    }
    fn overlap_floor() -> Self {
        1e-6
    }
    fn probability_floor() -> Self {
        1e-12
    }
}

/// Wraps an angle into the principal branch (−π, π].
pub fn principal_angle<T: Scalar>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut y = x % two_pi;
    if y > T::PI() {
        y = y - two_pi;
    } else if y <= -T::PI() {
        y = y + two_pi;
    }
    y
}
