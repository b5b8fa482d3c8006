//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast, ToPrimitive};

/// Real scalar the selection math runs on: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumCast + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant; every finite `f64` is representable (possibly rounded).
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal is representable")
    }

    fn from_usize_lossy(x: usize) -> Self {
        <Self as FromPrimitive>::from_usize(x).expect("usize is representable")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("scalar converts to f64")
    }

    fn as_f32(self) -> f32 {
        ToPrimitive::to_f32(&self).expect("scalar converts to f32")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Dot product with four interleaved accumulators.
///
/// The summation order is fixed (lane-wise, then lanes combined left to right)
/// so results are bit-stable across runs and threads.
#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let tail_a = chunks_a.remainder();
    let tail_b = chunks_b.remainder();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        acc[0] = acc[0] + ca[0] * cb[0];
        acc[1] = acc[1] + ca[1] * cb[1];
        acc[2] = acc[2] + ca[2] * cb[2];
        acc[3] = acc[3] + ca[3] * cb[3];
    }
    let mut tail = T::zero();
    for (x, y) in tail_a.iter().zip(tail_b) {
        tail = tail + *x * *y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
pub fn norm<T: Scalar>(v: &[T]) -> T {
    dot(v, v).sqrt()
}

/// `x` clamped to `[lo, hi]`.
#[inline]
pub(crate) fn clip<T: Scalar>(x: T, lo: T, hi: T) -> T {
    x.max(lo).min(hi)
}
