use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("invalid cell: {0}")]
    InvalidCell(String),
    #[error("a compactum needs at least one cell")]
    Empty,
    #[error("target level {target} is below current level {level}")]
    Coarsening { level: u32, target: u32 },
    #[error("sets do not intersect")]
    Disjoint,
    #[error("set is not connected ({0} components)")]
    Disconnected(usize),
    #[error("point lies outside the compactum")]
    PointOutside,
    #[error("endpoints coincide")]
    SameEndpoints,
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("base set is not contained in the ambient set")]
    NotSubset,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("chain violates {0}")]
    InvalidChain(String),
    #[error("index set is not admissible: {0}")]
    Inadmissible(String),
    #[error("parse error: {0}")]
    Parse(String),
}
