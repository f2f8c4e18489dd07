//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rustfft::FftNum;

/// Floating-point scalar accepted by the analysis routines.
///
/// Implemented for `f32` and `f64`. The bound set is what the transform,
/// entropy and moment code needs; anything beyond that is converted through
/// `f64` at the edges (normal quantiles, p-values).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + FftNum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from a count. Counts in this crate are far below the
    /// mantissa limit of either float width, so this never fails in practice.
    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable as float")
    }

    #[inline]
    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("scalar representable as f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if Float::abs(self.sum) >= Float::abs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: Real> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub(crate) fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().collect::<CompensatedSum<T>>().value()
}
