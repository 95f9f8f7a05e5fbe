//! Space-filling curves, arcs and Cantor codings for finite unions of dyadic cells.
//!
//! Everything is exact: cell geometry uses dyadic rationals under the ℓ∞ metric and
//! curve parameters use rationals of a pluggable [`Scalar`] type.

pub mod arc;
pub mod cantor;
pub mod chains;
pub mod curve;
pub mod dyadic;
pub mod error;
pub mod geometry;
pub mod scalar;
pub mod validate;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use geometry::{Cell, DyadicCompactum, Point};
pub use curve::CurveTower;
pub use scalar::{BigRational, Scalar};

/// Default exact parameter type.
pub type Rational = BigRational;
