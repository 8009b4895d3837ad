//! Numeric abstraction for rating and outcome arithmetic.
//!
//! Rating statistics and outcome distributions only need field operations
//! (add, subtract, multiply, divide) and ordering, so everything above this
//! module is written against [`Scalar`] rather than a concrete float. `f64` is
//! the production choice; `Rational64` gives exact answers for the closed-form
//! identities the outcome functions are checked against.

use std::fmt::Debug;

use num_rational::Rational64;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Scalar type usable for ratings and probabilities.
pub trait Scalar:
    Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("literal representable in scalar type")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
impl Scalar for Rational64 {}

/// Cast between two scalar types through their primitive representation.
pub fn cast<A: Scalar, B: Scalar>(value: A) -> Option<B> {
    value.to_f64().and_then(B::from_f64)
}
