use std::fmt;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// A point of `[0,1]^d` with exact dyadic coordinates.
///
/// Ordered lexicographically by coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<Dyadic>);

impl Point {
    pub fn new(coords: Vec<Dyadic>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| *c < Dyadic::ZERO || *c > Dyadic::ONE) {
            return Err(Error::InvalidParameter(format!("point outside unit cube: {coords:?}")));
        }
        Ok(Point(coords))
    }

    pub(crate) fn new_unchecked(coords: Vec<Dyadic>) -> Self {
        Point(coords)
    }

    /// Parses comma-separated coordinates such as `"1/2^3,0,3/4"`.
    pub fn parse(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|c| c.parse::<Dyadic>())
            .collect::<Result<Vec<_>>>()?;
        Point::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Dyadic] {
        &self.0
    }

    /// ℓ∞ distance.
    pub fn dist(&self, other: &Point) -> Dyadic {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (*a - *b).abs())
            .fold(Dyadic::ZERO, Dyadic::max)
    }

    /// Largest exponent among the coordinates, i.e. the coarsest lattice holding the point.
    pub fn exponent(&self) -> u32 {
        self.0.iter().map(Dyadic::exponent).max().unwrap_or(0)
    }

    pub fn to_float<F: Float>(&self) -> Vec<F> {
        self.0
            .iter()
            .map(|c| F::from(c.to_f64()).unwrap_or_else(F::nan))
            .collect()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
