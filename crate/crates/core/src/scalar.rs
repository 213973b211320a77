//! Scalar fields the curve arithmetic can run over.
//!
//! Only exact fraction types qualify: the group law is checked with `==`,
//! never with a tolerance.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

/// An exact field of characteristic zero.
pub trait ExactField: Clone + PartialEq + Debug + Display + Num + Neg<Output = Self> {
    fn from_i64(v: i64) -> Self;
}

impl<T> ExactField for Ratio<T>
where
    T: Clone + Integer + Signed + FromPrimitive + Debug + Display,
{
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(T::from_i64(v).expect("integer constant fits the scalar type"))
    }
}
