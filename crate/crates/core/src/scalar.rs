//! Floating point abstraction shared by the numeric kernels.
//!
//! Everything that does arithmetic on samples, pixels or statistics is
//! generic over [`Real`]; `f32` and `f64` implement it. The record types
//! and the pipeline layer work in `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar: `f32` or `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Sum + Default + Debug + Display {
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count into `Self`.
    #[inline]
    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable")
    }

    /// Lossy conversion to `f64`, used for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Arithmetic mean; `None` for an empty slice.
pub fn mean<T: Real>(xs: &[T]) -> Option<T> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().copied().sum::<T>() / T::of_usize(xs.len()))
    }
}

/// Sample variance with the `n - 1` divisor; `None` below two values.
pub fn sample_variance<T: Real>(xs: &[T]) -> Option<T> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: T = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    Some(ss / T::of_usize(xs.len() - 1))
}

/// Sample standard deviation (`n - 1`).
pub fn sample_sd<T: Real>(xs: &[T]) -> Option<T> {
    sample_variance(xs).map(Float::sqrt)
}
