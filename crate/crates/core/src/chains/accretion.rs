use std::collections::{HashSet, VecDeque};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{unpack_into, DyadicCompactum};

use super::cover::{cells_below, threshold, Threshold};

/// Extra levels of subdivision used by [`s_accretion`] for its working grid.
pub const ACCRETION_EXTRA_LEVELS: u32 = 3;

/// Inputs `(X, A, ε)` of the accretion `S(X, A, ε)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccretionParams {
    base: DyadicCompactum,
    epsilon: Dyadic,
    ambient: DyadicCompactum,
}

impl AccretionParams {
    pub fn new(base: DyadicCompactum, epsilon: Dyadic, ambient: DyadicCompactum) -> Result<Self> {
        threshold(epsilon)?;
        if !base.is_subset_of(&ambient) {
            return Err(Error::NotSubset);
        }
        let comps = ambient.components().len();
        if comps > 1 {
            return Err(Error::Disconnected(comps));
        }
        Ok(AccretionParams { base, epsilon, ambient })
    }

    pub fn base(&self) -> &DyadicCompactum {
        &self.base
    }

    pub fn epsilon(&self) -> Dyadic {
        self.epsilon
    }

    pub fn ambient(&self) -> &DyadicCompactum {
        &self.ambient
    }
}

/// Cells of `X` reachable from `A` through connected sets `D_1, D_2, …` in `X` with
/// `diam D_i < ε 2^-i`, `D_1` touching `A` and consecutive sets touching.
///
/// The sets `D_i` range over connected cell sets of a grid [`ACCRETION_EXTRA_LEVELS`]
/// finer than the inputs, the schedule stops once `ε 2^-i` reaches that grid's cell
/// side, and the result keeps the input-level cells that are fully reached and
/// connected to `A`. It contains `A` and its diameter is at most `2ε + diam A`.
pub fn s_accretion(p: &AccretionParams) -> Result<DyadicCompactum> {
    accrete(&p.ambient, &p.base, &threshold(p.epsilon)?, ACCRETION_EXTRA_LEVELS)
}

/// Dense lookup from cell coordinates to positions in a key list.
struct DenseIndex {
    lo: Vec<u32>,
    ext: Vec<u32>,
    slots: Vec<u32>,
}

impl DenseIndex {
    fn new(k: &DyadicCompactum) -> Self {
        let (lo, hi) = k.bbox();
        let ext: Vec<u32> = lo.iter().zip(&hi).map(|(l, h)| h - l + 1).collect();
        let size = ext.iter().map(|&e| e as usize).product();
        let mut index = DenseIndex { lo, ext, slots: vec![u32::MAX; size] };
        let mut c = vec![0; k.dim()];
        for (i, &key) in k.keys().iter().enumerate() {
            unpack_into(key, k.level(), &mut c);
            let wide: Vec<i64> = c.iter().map(|&x| x as i64).collect();
            let slot = index.slot(&wide).expect("inside bbox");
            index.slots[slot] = i as u32;
        }
        index
    }

    fn slot(&self, c: &[i64]) -> Option<usize> {
        let mut s = 0usize;
        for j in 0..c.len() {
            let v = c[j] - self.lo[j] as i64;
            if v < 0 || v >= self.ext[j] as i64 {
                return None;
            }
            s = s * self.ext[j] as usize + v as usize;
        }
        Some(s)
    }

    fn get(&self, c: &[i64]) -> Option<usize> {
        self.slot(c).map(|s| self.slots[s]).filter(|&i| i != u32::MAX).map(|i| i as usize)
    }
}

/// Calls `f` with every Chebyshev neighbour of `c` (itself excluded).
fn neighbours(c: &[i64], mut f: impl FnMut(&[i64])) {
    let d = c.len();
    let mut n = c.to_vec();
    for idx in 0..3usize.pow(d as u32) {
        let mut rem = idx;
        let mut is_self = true;
        for j in (0..d).rev() {
            let off = (rem % 3) as i64 - 1;
            rem /= 3;
            is_self &= off == 0;
            n[j] = c[j] + off;
        }
        if !is_self {
            f(&n);
        }
    }
}

/// Cells of `x` within `margin` cells of the bounding box of `a` (same level).
fn crop(x: &DyadicCompactum, a: &DyadicCompactum, margin: u64) -> DyadicCompactum {
    let (lo, hi) = a.bbox();
    let d = x.dim();
    let mut c = vec![0; d];
    let keys: Vec<u128> = x
        .keys()
        .iter()
        .copied()
        .filter(|&k| {
            unpack_into(k, x.level(), &mut c);
            (0..d).all(|j| c[j] as u64 + margin >= lo[j] as u64 && c[j] as u64 <= hi[j] as u64 + margin)
        })
        .collect();
    DyadicCompactum::from_sorted_keys(d, x.level(), keys)
}

pub(crate) fn accrete(x: &DyadicCompactum, a: &DyadicCompactum, t: &Threshold, extra: u32) -> Result<DyadicCompactum> {
    if !a.is_subset_of(x) {
        return Err(Error::NotSubset);
    }
    let out_level = x.level().max(a.level());
    let work = out_level + extra;
    // Every D_i lies within distance ε of A.
    let (xo, ao) = (x.at_level(out_level)?, a.at_level(out_level)?);
    let x = crop(&xo, &ao, cells_below(t, out_level) + 1);
    let xw = x.at_level(work)?;
    let aw = a.at_level(work)?;
    let d = x.dim();
    let n = xw.len();
    let index = DenseIndex::new(&xw);
    let coords: Vec<Vec<i64>> = xw
        .cells()
        .map(|c| c.into_iter().map(i64::from).collect())
        .collect();
    let mut reached = vec![false; n];
    for &k in aw.keys() {
        reached[xw.keys().binary_search(&k).expect("subset")] = true;
    }
    let mut total = aw.len();
    let mut radius = *t;
    loop {
        radius /= 2;
        let k = cells_below(&radius, work) as i64;
        if k == 0 || total == n {
            break;
        }
        // Cells outside the current set that touch it.
        let contact: Vec<bool> = (0..n)
            .map(|i| {
                let mut hit = false;
                if !reached[i] {
                    neighbours(&coords[i], |nb| hit |= index.get(nb).is_some_and(|j| reached[j]));
                }
                hit
            })
            .collect();
        let mut origins: HashSet<Vec<i64>> = HashSet::new();
        let mut o = vec![0i64; d];
        for i in (0..n).filter(|&i| contact[i]) {
            let c = &coords[i];
            for idx in 0..(k as usize).pow(d as u32) {
                let mut rem = idx;
                for j in (0..d).rev() {
                    o[j] = (c[j] - (rem % k as usize) as i64).max(0);
                    rem /= k as usize;
                }
                if !origins.contains(&o) {
                    origins.insert(o.clone());
                }
            }
        }
        let mut next = reached.clone();
        let mut queue = VecDeque::new();
        let mut seen = vec![usize::MAX; n];
        let mut origins: Vec<Vec<i64>> = origins.into_iter().collect();
        origins.sort_unstable();
        let mut cell = vec![0i64; d];
        for (stamp, o) in origins.iter().enumerate() {
            let inside = |c: &[i64]| (0..d).all(|j| o[j] <= c[j] && c[j] < o[j] + k);
            for idx in 0..(k as usize).pow(d as u32) {
                let mut rem = idx;
                for j in (0..d).rev() {
                    cell[j] = o[j] + (rem % k as usize) as i64;
                    rem /= k as usize;
                }
                if let Some(i) = index.get(&cell) {
                    if contact[i] && seen[i] != stamp {
                        seen[i] = stamp;
                        queue.push_back(i);
                    }
                }
            }
            while let Some(i) = queue.pop_front() {
                next[i] = true;
                neighbours(&coords[i], |nb| {
                    if inside(nb) {
                        if let Some(j) = index.get(nb) {
                            if seen[j] != stamp {
                                seen[j] = stamp;
                                queue.push_back(j);
                            }
                        }
                    }
                });
            }
        }
        reached = next;
        total = reached.iter().filter(|&&r| r).count();
    }
    let keys: Vec<u128> = xw.keys().iter().zip(&reached).filter(|(_, &r)| r).map(|(&k, _)| k).collect();
    let grown = DyadicCompactum::from_sorted_keys(d, work, keys);
    let coarse = grown.covered_parents(out_level).expect("base cells are fully reached");
    let base = a.at_level(out_level)?;
    let keep: Vec<DyadicCompactum> = coarse
        .components()
        .into_iter()
        .filter(|comp| comp.keys().iter().any(|&k| base.contains_key(k)))
        .collect();
    DyadicCompactum::union_all(&keep)
}
