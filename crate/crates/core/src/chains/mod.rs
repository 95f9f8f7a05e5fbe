//! Weak chains of small continua: covers, accretion, ordering and coded refinement.

mod accretion;
mod chain;
mod cover;
mod order;
mod refine;

pub use accretion::{s_accretion, AccretionParams, ACCRETION_EXTRA_LEVELS};
pub use chain::{refinement_violations, Chain, RefinementCode, Violation};
pub use cover::{cover_small, cover_small_peano, CoverMode};
pub use order::{order_chain, order_walk};
pub use refine::{first_chain, refine_chain, refine_chain_with};
