use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{DyadicCompactum, Point};

use super::chain::{Chain, RefinementCode};
use super::cover::{cover_mode, threshold, CoverMode};
use super::order::order_walk;

/// Endpoints `σ(K_1), σ(K_1 ∩ K_2), …, σ(K_{k-1} ∩ K_k), σ(K_k)` of the refinement blocks.
pub(crate) fn block_endpoints(coarse: &Chain) -> Result<Vec<Point>> {
    let k = coarse.len();
    let mut pts = Vec::with_capacity(k + 1);
    pts.push(coarse.piece(0).canonical_point());
    for i in 1..k {
        pts.push(coarse.piece(i - 1).intersect(coarse.piece(i))?.point().clone());
    }
    pts.push(coarse.piece(k - 1).canonical_point());
    Ok(pts)
}

/// Refines a weak `2^{-(n-1)}`-chain into a weak `2^-n`-chain with [`CoverMode::Direct`].
pub fn refine_chain(coarse: &Chain, n: u32) -> Result<(Chain, RefinementCode)> {
    refine_chain_with(coarse, n, CoverMode::default())
}

/// Covers every coarse piece by pieces of diameter `< 2^-n`, orders each cover from the
/// contact point with the previous piece to the contact point with the next, and
/// concatenates the blocks.
pub fn refine_chain_with(coarse: &Chain, n: u32, mode: CoverMode) -> Result<(Chain, RefinementCode)> {
    if n == 0 || coarse.epsilon() != Dyadic::pow2_neg(n - 1) {
        return Err(Error::InvalidChain(format!(
            "level {n} refinement needs a 2^-{} chain, got epsilon {}",
            n.saturating_sub(1),
            coarse.epsilon()
        )));
    }
    let eps = Dyadic::pow2_neg(n);
    let t = threshold(eps)?;
    let ends = block_endpoints(coarse)?;

    // Repeated pieces share one cover.
    let mut unique: Vec<&Arc<DyadicCompactum>> = Vec::new();
    let mut slot: HashMap<*const DyadicCompactum, usize> = HashMap::new();
    let which: Vec<usize> = coarse
        .pieces()
        .iter()
        .map(|p| {
            *slot.entry(Arc::as_ptr(p)).or_insert_with(|| {
                unique.push(p);
                unique.len() - 1
            })
        })
        .collect();
    let covers: Vec<Vec<Arc<DyadicCompactum>>> = unique
        .par_iter()
        .map(|p| Ok(cover_mode(p, &t, mode)?.into_iter().map(Arc::new).collect()))
        .collect::<Result<_>>()?;

    let blocks: Vec<Vec<Arc<DyadicCompactum>>> = (0..coarse.len())
        .into_par_iter()
        .map(|i| {
            let cover = &covers[which[i]];
            let walk = order_walk(cover, &ends[i], &ends[i + 1])?;
            Ok(walk.into_iter().map(|j| Arc::clone(&cover[j])).collect())
        })
        .collect::<Result<_>>()?;

    let code = RefinementCode::from_lengths(blocks.iter().map(Vec::len).collect())?;
    let level = blocks.iter().flatten().map(|p| p.level()).max().expect("nonempty");
    let pieces: Vec<Arc<DyadicCompactum>> = blocks
        .into_iter()
        .flatten()
        .map(|p| if p.level() == level { p } else { Arc::new(p.subdivide(level).expect("finer level")) })
        .collect();
    Ok((Chain::from_parts(eps, pieces)?, code))
}

/// The first chain: a cover of diameter `< 1/2` ordered from `σ(X)` back to `σ(X)`.
pub fn first_chain(x: &DyadicCompactum, mode: CoverMode) -> Result<Chain> {
    let eps = Dyadic::new(1, 1);
    let cover: Vec<Arc<DyadicCompactum>> = cover_mode(x, &threshold(eps)?, mode)?.into_iter().map(Arc::new).collect();
    let s = x.canonical_point();
    let walk = order_walk(&cover, &s, &s)?;
    Chain::from_parts(eps, walk.into_iter().map(|i| Arc::clone(&cover[i])).collect())
}
