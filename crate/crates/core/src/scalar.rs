//! Scalar abstraction for the log-space analytic core.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the analytic computations are generic over.
///
/// `f32` and `f64` both qualify; the crate-root aliases pin `f64` as the
/// default substrate.
pub trait Real: Float + FromPrimitive + std::fmt::Debug + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + std::fmt::Debug + Send + Sync + 'static {}

/// Convert an `f64` constant into the working scalar.
pub(crate) fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 constant must convert into the scalar type")
}
