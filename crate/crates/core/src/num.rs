//! Scalar abstraction shared by the scoring and metric code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating point type usable for BM25 scores and text metrics.
pub trait Scalar:
    Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts a count. Counts here are token or document tallies and always
    /// representable (possibly rounded) in any float type.
    fn of_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    fn of_f64(v: f64) -> Self {
        Self::from_f64(v).expect("f64 representable as scalar")
    }

    fn half() -> Self {
        Self::of_f64(0.5)
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}
