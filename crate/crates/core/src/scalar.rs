//! Floating-point scalar abstraction shared by the probability models and auditors.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// A real scalar the model code can be instantiated with (`f32` or `f64`).
///
/// Tolerances are exposed per type because the row-sum and stationarity
/// checks that are meaningful in `f64` are far below `f32` resolution.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Allowed deviation of a transition-matrix row sum from one.
    fn row_sum_tol() -> Self;
    /// Allowed per-entry residual of `pi P - pi`.
    fn balance_tol() -> Self;
    /// Pivots below this magnitude are treated as zero in elimination.
    fn pivot_tol() -> Self;

    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f64 {
    fn row_sum_tol() -> Self {
        1e-12
    }
    fn balance_tol() -> Self {
        1e-10
    }
    fn pivot_tol() -> Self {
        1e-11
    }
}

impl Scalar for f32 {
    fn row_sum_tol() -> Self {
        1e-5
    }
    fn balance_tol() -> Self {
        1e-4
    }
    fn pivot_tol() -> Self {
        1e-5
    }
}
