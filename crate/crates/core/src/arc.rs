//! Simple paths between two points: admissible index sets of a sampled curve, their
//! Whitney-minimal member and the monotone collapse onto an arc.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::chains::CoverMode;
use crate::curve::{anchor, build_tower_with, CurveTower};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{DyadicCompactum, Point};
use crate::scalar::Scalar;

/// Points `p_0, …, p_M` with consecutive ℓ∞ gaps at most `step`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteCurve {
    points: Vec<Point>,
    #[serde(skip)]
    step: Dyadic,
}

impl DiscreteCurve {
    pub fn new(points: Vec<Point>, step: Dyadic) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter("a discrete curve needs at least two points".into()));
        }
        let d = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch(d, p.dim()));
        }
        if let Some(i) = (1..points.len()).find(|&i| points[i - 1].dist(&points[i]) > step) {
            return Err(Error::InvalidParameter(format!("points {} and {i} are more than {step} apart", i - 1)));
        }
        Ok(DiscreteCurve { points, step })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn step(&self) -> Dyadic {
        self.step
    }

    /// Last index `M`.
    pub fn last(&self) -> usize {
        self.points.len() - 1
    }

    pub fn first_point(&self) -> &Point {
        &self.points[0]
    }

    pub fn last_point(&self) -> &Point {
        &self.points[self.last()]
    }

    /// Whether no point repeats.
    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.points.len());
        self.points.iter().all(|p| seen.insert(p))
    }
}

/// Nonempty sorted set of indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(mut idx: Vec<usize>) -> Result<Self> {
        if idx.is_empty() {
            return Err(Error::Empty);
        }
        idx.sort_unstable();
        idx.dedup();
        Ok(IndexSet(idx))
    }

    /// `{0, …, m}`.
    pub fn full(m: usize) -> Self {
        IndexSet((0..=m).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> usize {
        self.0[0]
    }

    pub fn max(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|i| other.0.binary_search(i).is_ok())
    }

    /// Pairs of consecutive members.
    pub fn gap_pairs(&self) -> impl Iterator<Item = GapPair> + '_ {
        self.0.windows(2).map(|w| GapPair { s: w[0], t: w[1] })
    }
}

/// Consecutive members `s < t` of an index set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GapPair {
    pub s: usize,
    pub t: usize,
}

impl GapPair {
    /// Whether some index lies strictly between `s` and `t`.
    pub fn is_open(&self) -> bool {
        self.t > self.s + 1
    }
}

/// `(|K| - 1) / M`.
pub fn whitney<Q: Scalar>(k: &IndexSet, m: usize) -> Q {
    if m == 0 {
        return Q::zero();
    }
    Q::ratio(k.len() - 1, m)
}

fn in_range<P>(p: &[P], k: &IndexSet) -> bool {
    k.max() < p.len()
}

/// `p_{min K} = p_0` and `p_{max K} = p_M`.
pub fn lambda_admissible<P: PartialEq>(p: &[P], k: &IndexSet) -> bool {
    in_range(p, k) && p[k.min()] == p[0] && p[k.max()] == p[p.len() - 1]
}

/// Equal values across every gap of `K` that skips an index.
pub fn gamma_admissible<P: PartialEq>(p: &[P], k: &IndexSet) -> bool {
    in_range(p, k) && k.gap_pairs().all(|g| !g.is_open() || p[g.s] == p[g.t])
}

pub fn is_admissible<P: PartialEq>(p: &[P], k: &IndexSet) -> bool {
    lambda_admissible(p, k) && gamma_admissible(p, k)
}

/// Equal values inside `K` have no member of `K` strictly between them.
pub fn gap_property<P: PartialEq>(p: &[P], k: &IndexSet) -> bool {
    let idx = k.indices();
    (0..idx.len()).all(|i| (i + 2..idx.len()).all(|j| p[idx[i]] != p[idx[j]]))
}

/// The admissible set of least cardinality, ties broken by the lexicographically least index list.
///
/// Admissible sets are the index paths from a copy of `p_0` to a copy of `p_M` that step
/// by one or jump between equal values, so this is a shortest-path search.
pub fn minimal_admissible<P: Eq + Hash>(p: &[P]) -> Result<IndexSet> {
    let n = p.len();
    if n < 2 {
        return Err(Error::InvalidParameter("a discrete curve needs at least two points".into()));
    }
    if p[0] == p[n - 1] {
        return Err(Error::SameEndpoints);
    }
    let mut later: HashMap<&P, Vec<usize>> = HashMap::new();
    for (i, v) in p.iter().enumerate() {
        later.entry(v).or_default().push(i);
    }
    // dist[i]: fewest members of an admissible tail starting at i.
    let mut dist = vec![usize::MAX; n];
    let mut best_by_value: HashMap<&P, usize> = HashMap::new();
    for i in (0..n).rev() {
        let d = if p[i] == p[n - 1] {
            1
        } else {
            let step = if i + 1 < n { dist[i + 1] } else { usize::MAX };
            let jump = best_by_value.get(&p[i]).copied().unwrap_or(usize::MAX);
            step.min(jump).saturating_add(1)
        };
        dist[i] = d;
        let e = best_by_value.entry(&p[i]).or_insert(usize::MAX);
        *e = (*e).min(d);
    }
    let start = later[&p[0]].iter().copied().min_by_key(|&i| (dist[i], i)).expect("p_0 occurs");
    let mut out = vec![start];
    let mut i = start;
    while dist[i] > 1 {
        let want = dist[i] - 1;
        i = if i + 1 < n && dist[i + 1] == want {
            i + 1
        } else {
            later[&p[i]].iter().copied().find(|&j| j > i + 1 && dist[j] == want).expect("shortest path continues")
        };
        out.push(i);
    }
    Ok(IndexSet(out))
}

/// Values of the monotone collapse over `K`, with consecutive repeats removed.
pub fn collapse<P: Clone + PartialEq>(p: &[P], k: &IndexSet) -> Result<Vec<P>> {
    if !is_admissible(p, k) {
        return Err(Error::Inadmissible(format!("{:?}", k.indices())));
    }
    let m = p.len() - 1;
    let mut out: Vec<P> = Vec::new();
    let mut push = |v: &P| {
        if out.last() != Some(v) {
            out.push(v.clone());
        }
    };
    let idx = k.indices();
    let mut next = 0;
    for u in 0..=m {
        if u < k.min() {
            push(&p[0]);
        } else if u > k.max() {
            push(&p[m]);
        } else if next < idx.len() && idx[next] == u {
            push(&p[u]);
            next += 1;
        } else {
            push(&p[idx[next - 1]]);
        }
    }
    Ok(out)
}

/// Arc in `X` from the anchored approximant of `x` to that of `y` at resolution `n`.
pub fn extract_arc(x_set: &DyadicCompactum, x: &Point, y: &Point, n: u32) -> Result<DiscreteCurve> {
    extract_arc_with(x_set, x, y, n, CoverMode::default())
}

pub fn extract_arc_with(x_set: &DyadicCompactum, x: &Point, y: &Point, n: u32, mode: CoverMode) -> Result<DiscreteCurve> {
    if x == y {
        return Err(Error::SameEndpoints);
    }
    if !x_set.contains_point(x) || !x_set.contains_point(y) {
        return Err(Error::PointOutside);
    }
    let tower: CurveTower = build_tower_with(x_set, n, mode)?;
    arc_in_tower(&tower, x, y)
}

/// [`extract_arc`] on an existing tower.
pub fn arc_in_tower<Q: Scalar>(tower: &CurveTower<Q>, x: &Point, y: &Point) -> Result<DiscreteCurve> {
    if x == y {
        return Err(Error::SameEndpoints);
    }
    let curve = anchor(tower, x, y)?;
    let samples = DiscreteCurve::new(curve.grid_points()?, tower.error_bound())?;
    let k = minimal_admissible(samples.points())?;
    DiscreteCurve::new(collapse(samples.points(), &k)?, samples.step())
}
