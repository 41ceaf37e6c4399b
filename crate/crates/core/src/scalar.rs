//! Scalar abstraction for the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Real scalar: `f32` or `f64`.
///
/// Implemented automatically for every type that satisfies the super-trait
/// constraints.
pub trait Real:
    Float + NumAssign + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + NumAssign + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Converts an `f64` constant into the working scalar.
#[inline]
pub fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("constant representable in the scalar type")
}

/// Lossy view of a scalar as `f64`, for diagnostics and reports.
#[inline]
pub fn approx_f64<F: Real>(x: F) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
