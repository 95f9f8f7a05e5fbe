use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{unpack_into, DyadicCompactum};

use super::accretion::accrete;

/// Exact positive threshold such as `ε` or `ε/3`.
pub(crate) type Threshold = Ratio<i128>;

pub(crate) fn threshold(eps: Dyadic) -> Result<Threshold> {
    if eps <= Dyadic::ZERO {
        return Err(Error::NonPositiveEpsilon);
    }
    Ok(Ratio::new(eps.numerator() as i128, 1i128 << eps.exponent()))
}

/// Largest `k` with `k · 2^-level < t`.
pub(crate) fn cells_below(t: &Threshold, level: u32) -> u64 {
    let scaled = t.numer() << level;
    ((scaled - 1) / t.denom()).max(0) as u64
}

/// Least level whose cell side is below `t / 4`.
pub(crate) fn cover_level(t: &Threshold) -> u32 {
    let mut level = 0;
    while (t.numer() << level) <= 4 * t.denom() {
        level += 1;
    }
    level
}

/// How chain pieces are produced from a coarse piece.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CoverMode {
    /// Tiles of diameter below `ε`.
    #[default]
    Direct,
    /// Tiles of diameter below `ε/3`, each grown by the accretion `S(X, K, ε/3)`.
    Peano,
}

/// Connected pieces of diameter `< eps` whose union is `x`.
///
/// `x` is subdivided until the cell side drops below `eps/4`, its bounding box is cut
/// into a balanced grid of tiles of fewer than `eps / side` cells per axis, and every
/// tile contributes the components of its intersection with `x`. The pieces are
/// disjoint as cell sets and listed by least cell.
pub fn cover_small(x: &DyadicCompactum, eps: Dyadic) -> Result<Vec<DyadicCompactum>> {
    cover_with(x, &threshold(eps)?)
}

pub(crate) fn cover_with(x: &DyadicCompactum, t: &Threshold) -> Result<Vec<DyadicCompactum>> {
    let comps = x.components().len();
    if comps > 1 {
        return Err(Error::Disconnected(comps));
    }
    let level = x.level().max(cover_level(t));
    let fine = x.at_level(level)?;
    let w = cells_below(t, level);
    Ok(tile(&fine, w))
}

fn tile(x: &DyadicCompactum, w: u64) -> Vec<DyadicCompactum> {
    let d = x.dim();
    let (lo, hi) = x.bbox();
    let extent: Vec<u64> = lo.iter().zip(&hi).map(|(l, h)| (h - l) as u64 + 1).collect();
    let tiles: Vec<u64> = extent.iter().map(|e| e.div_ceil(w)).collect();
    let mut groups: BTreeMap<Vec<u64>, Vec<u128>> = BTreeMap::new();
    let mut c = vec![0u32; d];
    for &k in x.keys() {
        unpack_into(k, x.level(), &mut c);
        let id: Vec<u64> = (0..d)
            .map(|j| ((c[j] - lo[j]) as u64 + 1) * tiles[j] - 1)
            .zip(&extent)
            .map(|(a, e)| a / e)
            .collect();
        groups.entry(id).or_default().push(k);
    }
    let mut pieces: Vec<DyadicCompactum> = groups
        .into_values()
        .flat_map(|keys| DyadicCompactum::from_sorted_keys(d, x.level(), keys).components())
        .collect();
    pieces.sort_unstable_by_key(|p| p.keys()[0]);
    pieces
}

/// Pieces of `cover_small(x, eps/3)` each replaced by its accretion `S(x, K, eps/3)`.
///
/// Every piece is connected, has diameter `< eps`, and contains its seed tile.
pub fn cover_small_peano(x: &DyadicCompactum, eps: Dyadic) -> Result<Vec<DyadicCompactum>> {
    peano_with(x, &threshold(eps)?)
}

pub(crate) fn peano_with(x: &DyadicCompactum, t: &Threshold) -> Result<Vec<DyadicCompactum>> {
    let third = t / 3;
    let seeds = cover_with(x, &third)?;
    let level = seeds[0].level();
    let ambient = x.at_level(level)?;
    seeds.iter().map(|k| accrete(&ambient, k, &third, 0)).collect()
}

pub(crate) fn cover_mode(x: &DyadicCompactum, t: &Threshold, mode: CoverMode) -> Result<Vec<DyadicCompactum>> {
    match mode {
        CoverMode::Direct => cover_with(x, t),
        CoverMode::Peano => peano_with(x, t),
    }
}
