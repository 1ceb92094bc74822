//! Scalar abstractions.
//!
//! Spectral and correlation routines are written against [`Real`], which is
//! implemented for `f32` and `f64`. Map evaluation is written against
//! [`Coordinate`], which additionally covers exact rationals so that Markov
//! matrices can be built without floating point.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Floating point scalar used by the eigensolvers and the correlation engine.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal; panics only if the target cannot represent finite `f64`s.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Converts a machine integer.
    fn from_int(x: i64) -> Self {
        Self::from_i64(x).expect("integer fits")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A point of the unit interval on which maps in the family can be evaluated.
///
/// Implemented for floats (Monte Carlo sampling) and for `Ratio<i64>` (exact
/// construction of Markov matrices).
pub trait Coordinate: Clone + PartialOrd + Num + Debug {
    fn from_usize(n: usize) -> Self;

    /// Largest integer `k` with `k <= self`, for `self >= 0`.
    fn floor_index(&self) -> usize;

    fn to_f64(&self) -> f64;
}

impl Coordinate for f64 {
    fn from_usize(n: usize) -> Self {
        n as f64
    }

    fn floor_index(&self) -> usize {
        self.floor() as usize
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coordinate for f32 {
    fn from_usize(n: usize) -> Self {
        n as f32
    }

    fn floor_index(&self) -> usize {
        self.floor() as usize
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Coordinate for Ratio<i64> {
    fn from_usize(n: usize) -> Self {
        Ratio::from_integer(n as i64)
    }

    fn floor_index(&self) -> usize {
        self.floor().to_integer() as usize
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}
