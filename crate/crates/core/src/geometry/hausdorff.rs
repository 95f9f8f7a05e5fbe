//! Exact ℓ∞ Hausdorff and set distances between cell unions and finite point sets.
//!
//! The distance from a point to a union of grid boxes is piecewise linear with
//! breakpoints on the half-grid, so its extrema over a cell union are attained at
//! half-grid lattice points. A Chebyshev BFS on that lattice therefore gives
//! exact values.

use std::collections::VecDeque;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::compactum::{unpack_into, DyadicCompactum};
use crate::geometry::point::Point;

/// A set whose lattice points can be enumerated at a given lattice level.
#[derive(Clone, Copy, Debug)]
pub enum LatticeSet<'a> {
    Cells(&'a DyadicCompactum),
    Points(&'a [Point]),
}

impl LatticeSet<'_> {
    fn dim(&self) -> usize {
        match self {
            LatticeSet::Cells(k) => k.dim(),
            LatticeSet::Points(p) => p.first().map_or(0, Point::dim),
        }
    }

    /// Finest level needed to represent the set's lattice points exactly.
    fn level(&self) -> u32 {
        match self {
            LatticeSet::Cells(k) => k.level(),
            LatticeSet::Points(p) => p.iter().map(Point::exponent).max().unwrap_or(0),
        }
    }

    fn for_each_point(&self, level: u32, mut f: impl FnMut(&[i64])) {
        match self {
            LatticeSet::Cells(k) => {
                let d = k.dim();
                let scale = 1i64 << (level - k.level());
                let mut c = vec![0u32; d];
                let mut p = vec![0i64; d];
                let per_axis = scale as usize + 1;
                let total = per_axis.pow(d as u32);
                for &key in k.keys() {
                    unpack_into(key, k.level(), &mut c);
                    for idx in 0..total {
                        let mut rem = idx;
                        for j in (0..d).rev() {
                            p[j] = c[j] as i64 * scale + (rem % per_axis) as i64;
                            rem /= per_axis;
                        }
                        f(&p);
                    }
                }
            }
            LatticeSet::Points(ps) => {
                let mut p = Vec::new();
                for pt in ps.iter() {
                    p.clear();
                    p.extend(pt.coords().iter().map(|c| c.scaled_to(level) as i64));
                    f(&p);
                }
            }
        }
    }
}

struct Grid {
    lo: Vec<i64>,
    ext: Vec<usize>,
    strides: Vec<usize>,
}

impl Grid {
    fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        let ext: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
        let mut strides = vec![1usize; ext.len()];
        for j in (0..ext.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * ext[j + 1];
        }
        Grid { lo, ext, strides }
    }

    fn size(&self) -> usize {
        self.ext.iter().product()
    }

    fn index(&self, p: &[i64]) -> usize {
        p.iter()
            .zip(&self.lo)
            .zip(&self.strides)
            .map(|((x, l), s)| (x - l) as usize * s)
            .sum()
    }

    /// Chebyshev BFS distance (in lattice steps) from the marked sources to every node.
    fn distances(&self, sources: &[bool]) -> Vec<u32> {
        let d = self.ext.len();
        let mut dist = vec![u32::MAX; self.size()];
        let mut queue = VecDeque::new();
        for (i, &s) in sources.iter().enumerate() {
            if s {
                dist[i] = 0;
                queue.push_back(i);
            }
        }
        let offsets = 3usize.pow(d as u32);
        let mut coord = vec![0usize; d];
        while let Some(i) = queue.pop_front() {
            let mut rem = i;
            for j in 0..d {
                coord[j] = rem / self.strides[j];
                rem %= self.strides[j];
            }
            let next = dist[i] + 1;
            'nb: for o in 0..offsets {
                let mut r = o;
                let mut idx = 0usize;
                let mut is_self = true;
                for j in (0..d).rev() {
                    let off = (r % 3) as i64 - 1;
                    r /= 3;
                    let v = coord[j] as i64 + off;
                    if v < 0 || v >= self.ext[j] as i64 {
                        continue 'nb;
                    }
                    is_self &= off == 0;
                    idx += v as usize * self.strides[j];
                }
                if !is_self && dist[idx] == u32::MAX {
                    dist[idx] = next;
                    queue.push_back(idx);
                }
            }
        }
        dist
    }
}

fn prepare(a: &LatticeSet, b: &LatticeSet) -> Result<(u32, Grid, Vec<bool>, Vec<bool>)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    if let (LatticeSet::Points(p), _) | (_, LatticeSet::Points(p)) = (a, b) {
        if p.is_empty() {
            return Err(Error::Empty);
        }
    }
    let level = a.level().max(b.level()) + 1;
    let d = a.dim();
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for s in [a, b] {
        s.for_each_point(level, |p| {
            for j in 0..d {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
        });
    }
    let grid = Grid::new(lo, hi);
    let mut ma = vec![false; grid.size()];
    let mut mb = vec![false; grid.size()];
    a.for_each_point(level, |p| ma[grid.index(p)] = true);
    b.for_each_point(level, |p| mb[grid.index(p)] = true);
    Ok((level, grid, ma, mb))
}

fn directed(dist_to: &[u32], from: &[bool]) -> u32 {
    from.iter()
        .zip(dist_to)
        .filter(|(m, _)| **m)
        .map(|(_, d)| *d)
        .max()
        .unwrap_or(0)
}

/// Hausdorff distance between two lattice sets.
pub fn hausdorff_sets(a: LatticeSet, b: LatticeSet) -> Result<Dyadic> {
    let (level, grid, ma, mb) = prepare(&a, &b)?;
    let to_b = grid.distances(&mb);
    let to_a = grid.distances(&ma);
    let steps = directed(&to_b, &ma).max(directed(&to_a, &mb));
    Ok(Dyadic::new(steps as i64, level))
}

/// Exact ℓ∞ Hausdorff distance between the closed unions.
pub fn hausdorff(k: &DyadicCompactum, l: &DyadicCompactum) -> Result<Dyadic> {
    hausdorff_sets(LatticeSet::Cells(k), LatticeSet::Cells(l))
}

/// Hausdorff distance between a finite point set and a cell union.
pub fn hausdorff_points(points: &[Point], k: &DyadicCompactum) -> Result<Dyadic> {
    hausdorff_sets(LatticeSet::Points(points), LatticeSet::Cells(k))
}

/// `max_{p ∈ a} dist(p, b)`.
pub fn directed_hausdorff(a: LatticeSet, b: LatticeSet) -> Result<Dyadic> {
    let (level, grid, ma, mb) = prepare(&a, &b)?;
    let to_b = grid.distances(&mb);
    Ok(Dyadic::new(directed(&to_b, &ma) as i64, level))
}

/// Infimum distance between the closed unions (zero iff they touch).
pub fn set_distance(k: &DyadicCompactum, l: &DyadicCompactum) -> Result<Dyadic> {
    let a = LatticeSet::Cells(k);
    let b = LatticeSet::Cells(l);
    let (level, grid, ma, mb) = prepare(&a, &b)?;
    let to_b = grid.distances(&mb);
    let steps = ma
        .iter()
        .zip(&to_b)
        .filter(|(m, _)| **m)
        .map(|(_, d)| *d)
        .min()
        .unwrap_or(0);
    Ok(Dyadic::new(steps as i64, level))
}
