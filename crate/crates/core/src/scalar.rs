//! Numeric abstraction shared by the mean-field map, the exact oracle and
//! the regression code.
//!
//! The drift map and the enumeration oracle are plain field arithmetic, so
//! they run unchanged over `f32`, `f64` and exact rationals. Exact runs are
//! what the oracle comparisons use; floating runs are what the simulator
//! uses.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// A field element usable by the mean-field and oracle code.
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + FromPrimitive + ToPrimitive {
    /// Slack allowed when checking that a probability vector sums to one.
    /// Zero for exact types.
    fn sum_tolerance() -> Self;

    fn from_count(c: u64) -> Self {
        Self::from_u64(c).expect("count representable in scalar type")
    }

    /// Exact for rationals, correctly rounded for floats.
    fn ratio(num: u64, den: u64) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }
}

impl Scalar for f64 {
    fn sum_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn sum_tolerance() -> Self {
        1e-5
    }
}

impl Scalar for BigRational {
    fn sum_tolerance() -> Self {
        Ratio::from_integer(BigInt::from(0))
    }

    fn from_count(c: u64) -> Self {
        Ratio::from_integer(BigInt::from(c))
    }
}
