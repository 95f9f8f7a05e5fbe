//! Exact scalar types for curve parameters and Whitney values.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use crate::dyadic::Dyadic;

/// An exact ordered field element. Implemented for `Ratio<T>` over machine and big integers.
pub trait Scalar:
    Clone + Ord + Debug + Display + FromStr + Num + Signed + Send + Sync + 'static
{
    fn from_usize(n: usize) -> Self;

    fn from_dyadic(d: Dyadic) -> Self;

    /// Exact `n / m`.
    fn ratio(n: usize, m: usize) -> Self {
        Self::from_usize(n) / Self::from_usize(m)
    }

    fn approx_f64(&self) -> f64;

    fn half(&self) -> Self {
        self.clone() / Self::from_usize(2)
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Clone
        + Integer
        + Signed
        + FromPrimitive
        + ToPrimitive
        + Display
        + Debug
        + FromStr
        + Send
        + Sync
        + 'static,
{
    fn from_usize(n: usize) -> Self {
        Ratio::from_integer(T::from_usize(n).expect("integer fits"))
    }

    fn from_dyadic(d: Dyadic) -> Self {
        let two = T::one() + T::one();
        let mut den = T::one();
        for _ in 0..d.exponent() {
            den = den * two.clone();
        }
        Ratio::new(T::from_i64(d.numerator()).expect("numerator fits"), den)
    }

    fn approx_f64(&self) -> f64 {
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if d.is_finite() && n.is_finite() => n / d,
            _ => f64::NAN,
        }
    }
}

/// Arbitrary-precision rational, the default parameter type.
pub type BigRational = Ratio<BigInt>;

/// Converts an exact parameter to a dyadic when its denominator is a power of two.
pub fn to_dyadic<Q: Scalar>(q: &Q) -> Option<Dyadic> {
    q.to_string().parse().ok()
}

/// Whether `q` lies in `[0, 1]`.
pub fn in_unit<Q: Scalar>(q: &Q) -> bool {
    !q.is_negative() && *q <= Q::one()
}
