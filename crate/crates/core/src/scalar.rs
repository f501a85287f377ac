//! Numeric traits the pipeline is generic over.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, NumAssign, ToPrimitive};

/// Floating point sample type for rasters: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Default + Debug + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for constants.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite constant")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Value type for alignment costs.
///
/// Only ring operations and ordering are needed, so exact types such as
/// `num_rational::Ratio<i64>` work as well as floats.
pub trait Cost: Num + Copy + PartialOrd + FromPrimitive + Debug {}

impl<T: Num + Copy + PartialOrd + FromPrimitive + Debug> Cost for T {}
