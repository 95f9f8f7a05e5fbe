//! Finite unions of closed dyadic cells.

use std::collections::VecDeque;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::point::Point;

/// A closed grid cell `Π [c_j 2^-r, (c_j + 1) 2^-r]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    level: u32,
    coords: Vec<u32>,
}

impl Cell {
    pub fn new(level: u32, coords: Vec<u32>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidCell("zero-dimensional cell".into()));
        }
        check_packable(coords.len(), level)?;
        if coords.iter().any(|&c| (c as u64) >= 1u64 << level) {
            return Err(Error::InvalidCell(format!("{coords:?} out of range at level {level}")));
        }
        Ok(Cell { level, coords })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Lower corner of the box.
    pub fn corner(&self) -> Point {
        Point::new_unchecked(self.coords.iter().map(|&c| Dyadic::new(c as i64, self.level)).collect())
    }
}

fn check_packable(dim: usize, level: u32) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidCell("dimension must be positive".into()));
    }
    if dim as u64 * level as u64 > 128 || level > 31 {
        return Err(Error::InvalidCell(format!("level {level} too fine for dimension {dim}")));
    }
    Ok(())
}

/// Packs coordinates into one integer whose numeric order is the lexicographic order.
#[inline]
pub(crate) fn pack(coords: &[u32], level: u32) -> u128 {
    coords.iter().fold(0u128, |acc, &c| (acc << level) | c as u128)
}

#[inline]
pub(crate) fn unpack_into(key: u128, level: u32, out: &mut [u32]) {
    let mask = if level == 0 { 0 } else { (1u128 << level) - 1 };
    let d = out.len();
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = ((key >> (level as usize * (d - 1 - j))) & mask) as u32;
    }
}

/// A nonempty finite union of closed cells of one level, deduplicated and in lexicographic order.
///
/// Equality and ordering are on the cell list, so two compacta at different levels
/// covering the same region compare unequal; use [`DyadicCompactum::same_set`] for that.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCompactum {
    dim: usize,
    level: u32,
    keys: Vec<u128>,
}

impl AsRef<DyadicCompactum> for DyadicCompactum {
    fn as_ref(&self) -> &DyadicCompactum {
        self
    }
}

/// Result of [`DyadicCompactum::intersect`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Intersection {
    /// Shared cells, or the cells of the left operand realizing the contact.
    pub cells: DyadicCompactum,
    /// True when the closed unions meet only along lower-dimensional faces.
    pub contact_only: bool,
    point: Point,
}

impl Intersection {
    /// A deterministic point lying in both operands.
    pub fn point(&self) -> &Point {
        &self.point
    }
}

impl DyadicCompactum {
    pub fn new<I, C>(dim: usize, level: u32, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = C>,
        C: AsRef<[u32]>,
    {
        check_packable(dim, level)?;
        let mut keys = Vec::new();
        for c in cells {
            let c = c.as_ref();
            if c.len() != dim {
                return Err(Error::DimensionMismatch(dim, c.len()));
            }
            if c.iter().any(|&x| (x as u64) >= 1u64 << level) {
                return Err(Error::InvalidCell(format!("{c:?} out of range at level {level}")));
            }
            keys.push(pack(c, level));
        }
        Self::from_keys(dim, level, keys)
    }

    pub fn from_cells(cells: &[Cell]) -> Result<Self> {
        let first = cells.first().ok_or(Error::Empty)?;
        if let Some(c) = cells.iter().find(|c| c.level != first.level) {
            return Err(Error::LevelMismatch(first.level, c.level));
        }
        Self::new(first.dim(), first.level, cells.iter().map(|c| c.coords.as_slice()))
    }

    /// The whole cube `[0,1]^d` as a single level-0 cell.
    pub fn unit_cube(dim: usize) -> Self {
        DyadicCompactum { dim, level: 0, keys: vec![0] }
    }

    /// Every cell of the level-`level` grid.
    pub fn full(dim: usize, level: u32) -> Result<Self> {
        Self::unit_cube(dim).subdivide(level)
    }

    pub(crate) fn from_keys(dim: usize, level: u32, mut keys: Vec<u128>) -> Result<Self> {
        if keys.is_empty() {
            return Err(Error::Empty);
        }
        keys.sort_unstable();
        keys.dedup();
        Ok(DyadicCompactum { dim, level, keys })
    }

    /// Keys must already be sorted and unique.
    pub(crate) fn from_sorted_keys(dim: usize, level: u32, keys: Vec<u128>) -> Self {
        debug_assert!(!keys.is_empty());
        debug_assert!(keys.windows(2).all(|w| w[0] < w[1]));
        DyadicCompactum { dim, level, keys }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Cell side `2^-level`.
    pub fn side(&self) -> Dyadic {
        Dyadic::pow2_neg(self.level)
    }

    pub(crate) fn keys(&self) -> &[u128] {
        &self.keys
    }

    pub fn cells(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        self.keys.iter().map(move |&k| {
            let mut c = vec![0; self.dim];
            unpack_into(k, self.level, &mut c);
            c
        })
    }

    pub fn cell_list(&self) -> Vec<Cell> {
        self.cells().map(|coords| Cell { level: self.level, coords }).collect()
    }

    pub fn contains_cell(&self, coords: &[u32]) -> bool {
        coords.len() == self.dim
            && coords.iter().all(|&c| (c as u64) < 1u64 << self.level)
            && self.contains_key(pack(coords, self.level))
    }

    #[inline]
    pub(crate) fn contains_key(&self, key: u128) -> bool {
        self.keys.binary_search(&key).is_ok()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    /// Inclusive bounding box in cell coordinates.
    pub fn bbox(&self) -> (Vec<u32>, Vec<u32>) {
        let mut lo = vec![u32::MAX; self.dim];
        let mut hi = vec![0; self.dim];
        let mut c = vec![0; self.dim];
        for &k in &self.keys {
            unpack_into(k, self.level, &mut c);
            for j in 0..self.dim {
                lo[j] = lo[j].min(c[j]);
                hi[j] = hi[j].max(c[j]);
            }
        }
        (lo, hi)
    }

    /// Largest bounding-box extent measured in cells; `diam = extent · 2^-level`.
    pub fn extent(&self) -> u64 {
        let (lo, hi) = self.bbox();
        lo.iter().zip(&hi).map(|(l, h)| (h - l) as u64 + 1).max().unwrap_or(0)
    }

    /// ℓ∞ diameter of the closed union. Equals the largest bounding-box side.
    pub fn diam(&self) -> Dyadic {
        Dyadic::new(self.extent() as i64, self.level)
    }

    pub fn subdivide(&self, target: u32) -> Result<Self> {
        if target < self.level {
            return Err(Error::Coarsening { level: self.level, target });
        }
        check_packable(self.dim, target)?;
        if target == self.level {
            return Ok(self.clone());
        }
        let delta = target - self.level;
        let per_axis = 1u32 << delta;
        let children = (per_axis as usize).pow(self.dim as u32);
        let mut keys = Vec::with_capacity(self.keys.len() * children);
        let mut c = vec![0; self.dim];
        let mut child = vec![0; self.dim];
        for &k in &self.keys {
            unpack_into(k, self.level, &mut c);
            for idx in 0..children {
                let mut rem = idx;
                for j in (0..self.dim).rev() {
                    child[j] = (c[j] << delta) + (rem % per_axis as usize) as u32;
                    rem /= per_axis as usize;
                }
                keys.push(pack(&child, target));
            }
        }
        keys.sort_unstable();
        Ok(DyadicCompactum { dim: self.dim, level: target, keys })
    }

    /// Borrowing variant of `subdivide` that avoids a copy when no change is needed.
    pub(crate) fn at_level(&self, target: u32) -> Result<std::borrow::Cow<'_, Self>> {
        if target == self.level {
            Ok(std::borrow::Cow::Borrowed(self))
        } else {
            self.subdivide(target).map(std::borrow::Cow::Owned)
        }
    }

    /// Cells of level `target <= level` that contain at least one cell of `self`.
    pub fn parent_cover(&self, target: u32) -> Result<Self> {
        if target > self.level {
            return Err(Error::InvalidParameter(format!(
                "parent level {target} above {}",
                self.level
            )));
        }
        let shift = self.level - target;
        let mut c = vec![0; self.dim];
        let keys = self
            .keys
            .iter()
            .map(|&k| {
                unpack_into(k, self.level, &mut c);
                c.iter_mut().for_each(|x| *x >>= shift);
                pack(&c, target)
            })
            .collect();
        Self::from_keys(self.dim, target, keys)
    }

    /// Cells of level `target <= level` entirely covered by `self`.
    pub(crate) fn covered_parents(&self, target: u32) -> Option<Self> {
        let shift = self.level - target;
        let per_parent = 1usize << (shift as usize * self.dim);
        let parents = self.parent_cover(target).ok()?;
        let mut counts = vec![0usize; parents.len()];
        let mut c = vec![0; self.dim];
        for &k in &self.keys {
            unpack_into(k, self.level, &mut c);
            c.iter_mut().for_each(|x| *x >>= shift);
            let idx = parents.keys.binary_search(&pack(&c, target)).expect("parent present");
            counts[idx] += 1;
        }
        let keys: Vec<u128> = parents
            .keys
            .iter()
            .zip(&counts)
            .filter(|(_, &n)| n == per_parent)
            .map(|(&k, _)| k)
            .collect();
        if keys.is_empty() {
            None
        } else {
            Some(Self::from_sorted_keys(self.dim, target, keys))
        }
    }

    /// Both operands brought to their common (finer) level.
    pub(crate) fn common<'a>(
        &'a self,
        other: &'a Self,
    ) -> Result<(std::borrow::Cow<'a, Self>, std::borrow::Cow<'a, Self>)> {
        self.check_dim(other)?;
        let level = self.level.max(other.level);
        Ok((self.at_level(level)?, other.at_level(level)?))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.common(other)?;
        let mut keys = Vec::with_capacity(a.keys.len() + b.keys.len());
        let (mut i, mut j) = (0, 0);
        while i < a.keys.len() && j < b.keys.len() {
            match a.keys[i].cmp(&b.keys[j]) {
                std::cmp::Ordering::Less => {
                    keys.push(a.keys[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    keys.push(b.keys[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    keys.push(a.keys[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        keys.extend_from_slice(&a.keys[i..]);
        keys.extend_from_slice(&b.keys[j..]);
        Ok(Self::from_sorted_keys(a.dim, a.level, keys))
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a DyadicCompactum>>(parts: I) -> Result<Self> {
        let parts: Vec<&DyadicCompactum> = parts.into_iter().collect();
        let first = parts.first().ok_or(Error::Empty)?;
        let level = parts.iter().map(|p| p.level).max().unwrap_or(0);
        let mut keys = Vec::new();
        for p in &parts {
            first.check_dim(p)?;
            keys.extend_from_slice(&p.at_level(level)?.keys);
        }
        Self::from_keys(first.dim, level, keys)
    }

    /// Set inclusion of the closed unions.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        if self.dim != other.dim {
            return false;
        }
        if self.level < other.level {
            return match self.subdivide(other.level) {
                Ok(s) => s.is_subset_of(other),
                Err(_) => false,
            };
        }
        let shift = self.level - other.level;
        let mut c = vec![0; self.dim];
        self.keys.iter().all(|&k| {
            if shift == 0 {
                return other.contains_key(k);
            }
            unpack_into(k, self.level, &mut c);
            c.iter_mut().for_each(|x| *x >>= shift);
            other.contains_key(pack(&c, other.level))
        })
    }

    /// Equality of the closed unions regardless of representation level.
    pub fn same_set(&self, other: &Self) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    /// Calls `f` with each key of a Chebyshev neighbour (the cell itself included).
    pub(crate) fn for_each_neighbor(&self, cell: &[u32], include_self: bool, mut f: impl FnMut(u128)) {
        let d = self.dim;
        let limit = 1i64 << self.level;
        let total = 3usize.pow(d as u32);
        let mut n = vec![0u32; d];
        'outer: for idx in 0..total {
            let mut rem = idx;
            let mut is_self = true;
            for j in (0..d).rev() {
                let off = (rem % 3) as i64 - 1;
                rem /= 3;
                if off != 0 {
                    is_self = false;
                }
                let v = cell[j] as i64 + off;
                if v < 0 || v >= limit {
                    continue 'outer;
                }
                n[j] = v as u32;
            }
            if is_self && !include_self {
                continue;
            }
            f(pack(&n, self.level));
        }
    }

    fn bbox_touch(&self, other: &Self) -> bool {
        // Same level assumed.
        let (alo, ahi) = self.bbox();
        let (blo, bhi) = other.bbox();
        (0..self.dim).all(|j| alo[j] as i64 <= bhi[j] as i64 + 1 && blo[j] as i64 <= ahi[j] as i64 + 1)
    }

    /// Whether the closed unions intersect.
    pub fn touches(&self, other: &Self) -> Result<bool> {
        let (a, b) = self.common(other)?;
        if !a.bbox_touch(&b) {
            return Ok(false);
        }
        let (small, large) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
        let mut c = vec![0; small.dim];
        for &k in &small.keys {
            unpack_into(k, small.level, &mut c);
            let mut hit = false;
            large.for_each_neighbor(&c, true, |nk| hit |= large.contains_key(nk));
            if hit {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Shared cells when the interiors overlap; otherwise the contact cells of `self`.
    pub fn intersect(&self, other: &Self) -> Result<Intersection> {
        let (a, b) = self.common(other)?;
        let shared: Vec<u128> = a.keys.iter().copied().filter(|&k| b.contains_key(k)).collect();
        if !shared.is_empty() {
            let cells = Self::from_sorted_keys(a.dim, a.level, shared);
            let point = cells.canonical_point();
            return Ok(Intersection { cells, contact_only: false, point });
        }
        let d = a.dim;
        let mut contact = Vec::new();
        let mut best: Option<Vec<u32>> = None;
        let mut c = vec![0; d];
        let mut n = vec![0; d];
        for &k in &a.keys {
            unpack_into(k, a.level, &mut c);
            let mut touching = false;
            a.for_each_neighbor(&c, false, |nk| {
                if b.contains_key(nk) {
                    touching = true;
                    unpack_into(nk, a.level, &mut n);
                    // Lowest corner of the shared face: componentwise max of lower corners.
                    let corner: Vec<u32> = c.iter().zip(&n).map(|(x, y)| *x.max(y)).collect();
                    if best.as_ref().is_none_or(|b| corner < *b) {
                        best = Some(corner);
                    }
                }
            });
            if touching {
                contact.push(k);
            }
        }
        let corner = best.ok_or(Error::Disjoint)?;
        let point = Point::new_unchecked(corner.iter().map(|&x| Dyadic::new(x as i64, a.level)).collect());
        Ok(Intersection {
            cells: Self::from_sorted_keys(d, a.level, contact),
            contact_only: true,
            point,
        })
    }

    /// Connected components of the closed union, ordered by least cell.
    pub fn components(&self) -> Vec<DyadicCompactum> {
        let n = self.keys.len();
        let mut label = vec![usize::MAX; n];
        let mut comps: Vec<Vec<u128>> = Vec::new();
        let mut queue = VecDeque::new();
        let mut c = vec![0; self.dim];
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            label[start] = id;
            queue.push_back(start);
            let mut members = Vec::new();
            while let Some(i) = queue.pop_front() {
                members.push(self.keys[i]);
                unpack_into(self.keys[i], self.level, &mut c);
                self.for_each_neighbor(&c, false, |nk| {
                    if let Ok(j) = self.keys.binary_search(&nk) {
                        if label[j] == usize::MAX {
                            label[j] = id;
                            queue.push_back(j);
                        }
                    }
                });
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps
            .into_iter()
            .map(|keys| Self::from_sorted_keys(self.dim, self.level, keys))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Lowest corner of the lexicographically least cell.
    pub fn canonical_point(&self) -> Point {
        let mut c = vec![0; self.dim];
        unpack_into(self.keys[0], self.level, &mut c);
        Point::new_unchecked(c.iter().map(|&x| Dyadic::new(x as i64, self.level)).collect())
    }

    /// Cell corners, with repetitions across neighbouring cells.
    pub fn corners(&self) -> impl Iterator<Item = Point> + '_ {
        let d = self.dim;
        self.cells().flat_map(move |c| {
            (0..1usize << d).map(move |mask| {
                Point::new_unchecked(
                    (0..d)
                        .map(|j| Dyadic::new(c[j] as i64 + ((mask >> (d - 1 - j)) & 1) as i64, self.level))
                        .collect(),
                )
            })
        })
    }

    /// Corner minimizing `score`, ties broken lexicographically.
    pub fn argmin_select<S: Ord>(&self, mut score: impl FnMut(&Point) -> S) -> Point {
        let mut best: Option<(S, Point)> = None;
        for p in self.corners() {
            let s = score(&p);
            let better = match &best {
                None => true,
                Some((bs, bp)) => s < *bs || (s == *bs && p < *bp),
            };
            if better {
                best = Some((s, p));
            }
        }
        best.expect("nonempty compactum").1
    }

    /// Whether the point lies in the closed union.
    pub fn contains_point(&self, p: &Point) -> bool {
        if p.dim() != self.dim {
            return false;
        }
        let limit = 1i64 << self.level;
        // Candidate cell indices per axis: floor(x 2^r), and floor - 1 when on a grid line.
        let mut options: Vec<Vec<u32>> = Vec::with_capacity(self.dim);
        for x in p.coords() {
            let (num, exp) = (x.numerator() as i128, x.exponent());
            let mut opts = Vec::with_capacity(2);
            let (fl, exact) = if exp <= self.level {
                (num << (self.level - exp), true)
            } else {
                let shift = exp - self.level;
                (num >> shift, num & ((1i128 << shift) - 1) == 0)
            };
            for v in [fl, fl - 1] {
                if (v != fl - 1 || exact) && v >= 0 && v < limit as i128 {
                    opts.push(v as u32);
                }
            }
            if opts.is_empty() {
                return false;
            }
            options.push(opts);
        }
        let mut idx = vec![0usize; self.dim];
        let mut cell = vec![0u32; self.dim];
        loop {
            for j in 0..self.dim {
                cell[j] = options[j][idx[j]];
            }
            if self.contains_key(pack(&cell, self.level)) {
                return true;
            }
            let mut j = self.dim;
            loop {
                if j == 0 {
                    return false;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < options[j].len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    /// Closed ℓ∞ `r`-neighbourhood, clipped to the unit cube, at level `max(level, exponent of r)`.
    pub fn dilate(&self, r: Dyadic) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::InvalidParameter(format!("negative radius {r}")));
        }
        let level = self.level.max(r.exponent());
        let base = self.subdivide(level)?;
        let k = r.scaled_to(level) as i64;
        if k == 0 {
            return Ok(base);
        }
        let limit = 1i64 << level;
        let mut keys = base.keys.clone();
        let mut c = vec![0; self.dim];
        for j in 0..self.dim {
            let mut next = Vec::with_capacity(keys.len() * 3);
            for &key in &keys {
                unpack_into(key, level, &mut c);
                let x = c[j] as i64;
                for v in (x - k).max(0)..=(x + k).min(limit - 1) {
                    c[j] = v as u32;
                    next.push(pack(&c, level));
                }
            }
            next.sort_unstable();
            next.dedup();
            keys = next;
        }
        Ok(Self::from_sorted_keys(self.dim, level, keys))
    }
}
