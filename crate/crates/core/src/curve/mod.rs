//! Curve towers: nested chains with parameter breakpoints, evaluation, anchoring and
//! hyperspace operations on the resulting curves.

mod anchor;
mod breaks;
pub mod export;
mod ops;
mod tower;

pub use anchor::{anchor, AnchoredCurve};
pub use breaks::{split, Location, ParamBreaks};
pub use ops::{covers, graph, graph_distance, preimage, preimage_near, sup_eval_distance, ParamInterval};
pub use tower::{build_tower, build_tower_with, CurveTower, TowerLevel};
