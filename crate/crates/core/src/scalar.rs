//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable for distances, thresholds and probabilities (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for constants.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    /// Exact-as-possible conversion from a count.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `2^{-k}` in the requested scalar type.
pub fn dyadic<S: Scalar>(k: usize) -> S {
    S::lit(2.0).powi(-(k.min(i32::MAX as usize) as i32))
}

/// Smallest `k` with `2^{-k} < delta`; `0` when `delta > 1`.
pub fn dyadic_depth<S: Scalar>(delta: S) -> usize {
    let mut k = 0usize;
    let mut p = S::one();
    while p >= delta && k < 2048 {
        p = p / S::lit(2.0);
        k += 1;
    }
    k
}
