//! Floating-point abstraction so the model can run at `f32` or `f64`.

use std::fmt;

/// Scalar type used for all model arithmetic: `f32` or `f64`.
///
/// Everything numeric in this crate is generic over `Scalar`; the crate root
/// exports `f64` aliases for the common case.
pub trait Scalar:
    num_traits::Float + num_traits::FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type (lossy for `f32`).
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 literal must convert")
    }

    /// Clamps `self` into `[lo, hi]`.
    fn clip(self, lo: Self, hi: Self) -> Self {
        self.max(lo).min(hi)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
