use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating point type the scoring and classification code is written over.
pub trait Scalar:
    Float + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute tolerance used when two description lengths are compared for
    /// equality (ties between optimal structures, learner vs. oracle).
    fn score_tolerance() -> Self;

    /// Relative gap below which two edge weights are treated as equal when
    /// ordering edges.
    fn tie_tolerance() -> Self;

    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count representable as float")
    }

    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("finite value")
    }
}

impl Scalar for f64 {
    fn score_tolerance() -> Self {
        1e-9
    }

    fn tie_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn score_tolerance() -> Self {
        1e-3
    }

    fn tie_tolerance() -> Self {
        1e-5
    }
}
