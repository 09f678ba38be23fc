use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating point scalar the schemes are evaluated in: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless for the small integers and dyadic fractions used as abscissae.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Scalar")
    }

    fn of_int(v: i64) -> Self {
        Self::from_i64(v).expect("i64 is representable in every Scalar")
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
}
