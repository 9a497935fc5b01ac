//! Scalar abstraction for the algebraic layers.
//!
//! Quadratic-form arithmetic (`Q(τ,1)`, `Q_τ`, discriminants, the bilinear form of
//! `b² − 4ac`) only needs field operations, so it is written once over [`Scalar`] and
//! used with `f32`, `f64` and exact rationals. Transcendental code is `f64` only.

use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Field-like scalar: `f32`, `f64`, `Ratio<i64>`.
pub trait Scalar:
    Num + Clone + FromPrimitive + ToPrimitive + PartialOrd + Neg<Output = Self> + Debug
{
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer fits the scalar type")
    }
}

impl<T> Scalar for T where
    T: Num + Clone + FromPrimitive + ToPrimitive + PartialOrd + Neg<Output = T> + Debug
{
}

/// Sign with `sgn(0) = 0`.
pub fn sgn<T: Scalar>(x: &T) -> i32 {
    let zero = T::zero();
    if *x > zero {
        1
    } else if *x < zero {
        -1
    } else {
        0
    }
}
