//! Exact cell geometry in `[0,1]^d` under the ℓ∞ metric.

mod compactum;
pub mod hausdorff;
pub mod io;
mod point;

pub use compactum::{Cell, DyadicCompactum, Intersection};
pub use hausdorff::{hausdorff, hausdorff_points, set_distance, LatticeSet};
pub use point::Point;

pub(crate) use compactum::unpack_into;
