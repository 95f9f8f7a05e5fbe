use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::DyadicCompactum;

/// An ordered cover by small connected pieces, consecutive pieces touching.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ChainRepr")]
pub struct Chain {
    epsilon: Dyadic,
    pieces: Vec<Arc<DyadicCompactum>>,
}

#[derive(Deserialize)]
struct ChainRepr {
    epsilon: Dyadic,
    pieces: Vec<Arc<DyadicCompactum>>,
}

impl TryFrom<ChainRepr> for Chain {
    type Error = Error;

    fn try_from(r: ChainRepr) -> Result<Self> {
        Chain::new(r.epsilon, r.pieces)
    }
}

impl Chain {
    /// Builds a chain and checks its local clauses: connected pieces, `diam < epsilon`,
    /// consecutive pieces touching, one shared dimension and level.
    pub fn new(epsilon: Dyadic, pieces: Vec<Arc<DyadicCompactum>>) -> Result<Self> {
        let chain = Self::from_parts(epsilon, pieces)?;
        let bad = chain.local_violations();
        if let Some(v) = bad.first() {
            return Err(Error::InvalidChain(v.to_string()));
        }
        Ok(chain)
    }

    /// Structural checks only.
    pub(crate) fn from_parts(epsilon: Dyadic, pieces: Vec<Arc<DyadicCompactum>>) -> Result<Self> {
        let first = pieces.first().ok_or(Error::Empty)?;
        if epsilon <= Dyadic::ZERO {
            return Err(Error::NonPositiveEpsilon);
        }
        for p in &pieces {
            if p.dim() != first.dim() {
                return Err(Error::DimensionMismatch(first.dim(), p.dim()));
            }
            if p.level() != first.level() {
                return Err(Error::LevelMismatch(first.level(), p.level()));
            }
        }
        Ok(Chain { epsilon, pieces })
    }

    pub fn epsilon(&self) -> Dyadic {
        self.epsilon
    }

    pub fn pieces(&self) -> &[Arc<DyadicCompactum>] {
        &self.pieces
    }

    pub fn piece(&self, i: usize) -> &DyadicCompactum {
        &self.pieces[i]
    }

    /// Number of pieces, `l(Γ)`.
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].dim()
    }

    /// Common cell level of the pieces.
    pub fn level(&self) -> u32 {
        self.pieces[0].level()
    }

    pub fn union(&self) -> DyadicCompactum {
        DyadicCompactum::union_all(self.pieces.iter().map(|p| p.as_ref())).expect("nonempty chain")
    }

    fn local_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if !p.is_connected() {
                out.push(Violation::Disconnected(i));
            }
            if p.diam() >= self.epsilon {
                out.push(Violation::Diameter { index: i, diam: p.diam(), epsilon: self.epsilon });
            }
        }
        for i in 1..self.pieces.len() {
            if !self.pieces[i - 1].touches(&self.pieces[i]).unwrap_or(false) {
                out.push(Violation::Gap(i));
            }
        }
        out
    }

    /// Every clause of the weak-chain definition against the stated ambient space.
    pub fn violations(&self, ambient: &DyadicCompactum) -> Vec<Violation> {
        let mut out = self.local_violations();
        if !self.union().same_set(ambient) {
            out.push(Violation::Union);
        }
        out
    }
}

/// Block starts `mu` (1-based, `mu[0] = 1`) and block lengths `nu` tying a fine chain to a coarse one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementCode {
    pub mu: Vec<usize>,
    pub nu: Vec<usize>,
}

impl RefinementCode {
    /// Code of consecutive blocks with the given lengths.
    pub fn from_lengths(nu: Vec<usize>) -> Result<Self> {
        if nu.is_empty() || nu.contains(&0) {
            return Err(Error::InvalidChain(format!("block lengths must be positive: {nu:?}")));
        }
        let mut mu = Vec::with_capacity(nu.len());
        let mut start = 1;
        for &n in &nu {
            mu.push(start);
            start += n;
        }
        Ok(RefinementCode { mu, nu })
    }

    /// Length of the fine chain.
    pub fn fine_len(&self) -> usize {
        self.nu.iter().sum()
    }

    /// 0-based range of fine indices forming block `i`.
    pub fn block(&self, i: usize) -> Range<usize> {
        self.mu[i] - 1..self.mu[i] - 1 + self.nu[i]
    }

    /// Checks the code against a fine chain of length `fine_len`.
    pub fn check(&self, fine_len: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidChain(msg));
        if self.mu.len() != self.nu.len() || self.mu.is_empty() {
            return bad(format!("mu has {} entries, nu has {}", self.mu.len(), self.nu.len()));
        }
        if self.mu[0] != 1 {
            return bad(format!("mu starts at {}", self.mu[0]));
        }
        let last = self.mu.len() - 1;
        for i in 0..last {
            if self.mu[i + 1] <= self.mu[i] {
                return bad(format!("mu not increasing at {i}"));
            }
            if self.nu[i] != self.mu[i + 1] - self.mu[i] {
                return bad(format!("nu[{i}] = {} but mu gap is {}", self.nu[i], self.mu[i + 1] - self.mu[i]));
            }
        }
        if fine_len + 1 < self.mu[last] || self.nu[last] != fine_len + 1 - self.mu[last] {
            return bad(format!("last block length {} does not reach {fine_len}", self.nu[last]));
        }
        if self.nu.contains(&0) {
            return bad("empty block".into());
        }
        Ok(())
    }
}

/// A failed clause of the weak-chain or refinement definitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Disconnected(usize),
    Diameter { index: usize, diam: Dyadic, epsilon: Dyadic },
    Gap(usize),
    Union,
    Code(String),
    Block(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Disconnected(i) => write!(f, "piece {i} is disconnected"),
            Violation::Diameter { index, diam, epsilon } => {
                write!(f, "piece {index} has diameter {diam}, not below {epsilon}")
            }
            Violation::Gap(i) => write!(f, "pieces {} and {i} do not touch", i - 1),
            Violation::Union => write!(f, "pieces do not cover the ambient set exactly"),
            Violation::Code(msg) => write!(f, "bad refinement code: {msg}"),
            Violation::Block(i) => write!(f, "block {i} does not union to coarse piece {i}"),
        }
    }
}

/// Checks that `fine` refines `coarse` as coded: block `i` unions exactly to coarse piece `i`.
pub fn refinement_violations(coarse: &Chain, fine: &Chain, code: &RefinementCode) -> Vec<Violation> {
    if let Err(e) = code.check(fine.len()) {
        return vec![Violation::Code(e.to_string())];
    }
    if code.mu.len() != coarse.len() {
        return vec![Violation::Code(format!("{} blocks for {} coarse pieces", code.mu.len(), coarse.len()))];
    }
    (0..coarse.len())
        .filter(|&i| {
            let block = &fine.pieces[code.block(i)];
            let u = DyadicCompactum::union_all(block.iter().map(|p| p.as_ref())).expect("nonempty block");
            !u.same_set(coarse.piece(i))
        })
        .map(Violation::Block)
        .collect()
}
