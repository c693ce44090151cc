//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the library computes with: `f32` or `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable in scalar type")
    }

    /// Lossy conversion used for diagnostics and error messages.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {}
