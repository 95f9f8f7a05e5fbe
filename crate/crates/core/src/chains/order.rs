use std::collections::HashMap;
use std::sync::Arc;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{unpack_into, DyadicCompactum, Point};

use super::chain::Chain;

/// Touching graph of a list of pieces, adjacency lists sorted by index.
pub(crate) fn touch_graph<P: AsRef<DyadicCompactum>>(pieces: &[P]) -> Result<Vec<Vec<usize>>> {
    let first = pieces.first().ok_or(Error::Empty)?.as_ref();
    let level = pieces.iter().map(|p| p.as_ref().level()).max().unwrap_or(0);
    let mut owners: HashMap<u128, Vec<usize>> = HashMap::new();
    let fine: Vec<std::borrow::Cow<'_, DyadicCompactum>> = pieces
        .iter()
        .map(|p| {
            let p = p.as_ref();
            if p.dim() != first.dim() {
                return Err(Error::DimensionMismatch(first.dim(), p.dim()));
            }
            p.at_level(level)
        })
        .collect::<Result<_>>()?;
    for (i, p) in fine.iter().enumerate() {
        for &k in p.keys() {
            owners.entry(k).or_default().push(i);
        }
    }
    let mut adj = vec![Vec::new(); pieces.len()];
    let mut c = vec![0; first.dim()];
    for (i, p) in fine.iter().enumerate() {
        let mut near = Vec::new();
        for &k in p.keys() {
            unpack_into(k, level, &mut c);
            p.for_each_neighbor(&c, true, |nk| {
                if let Some(ids) = owners.get(&nk) {
                    near.extend(ids.iter().copied().filter(|&j| j != i));
                }
            });
        }
        near.sort_unstable();
        near.dedup();
        adj[i] = near;
    }
    Ok(adj)
}

/// Index of the least piece (in cell-list order) containing `p`.
fn least_containing<P: AsRef<DyadicCompactum>>(pieces: &[P], p: &Point) -> Result<usize> {
    if p.dim() != pieces[0].as_ref().dim() {
        return Err(Error::DimensionMismatch(pieces[0].as_ref().dim(), p.dim()));
    }
    (0..pieces.len())
        .filter(|&i| pieces[i].as_ref().contains_point(p))
        .min_by(|&a, &b| pieces[a].as_ref().cmp(pieces[b].as_ref()))
        .ok_or(Error::PointOutside)
}

/// Walk through the touching graph that visits every piece, starts at a piece
/// containing `x` and ends at a piece containing `y`.
///
/// A depth-first tree is grown from the start piece. The walk goes around the
/// tree, entering the branch towards the end piece last and never returning
/// from it, so its length is below twice the number of pieces. Entries whose
/// neighbours in the walk already touch, and which occur elsewhere, are then dropped.
pub fn order_walk<P: AsRef<DyadicCompactum>>(pieces: &[P], x: &Point, y: &Point) -> Result<Vec<usize>> {
    let adj = touch_graph(pieces)?;
    let n = pieces.len();
    let start = least_containing(pieces, x)?;
    let end = least_containing(pieces, y)?;

    let mut parent = vec![usize::MAX; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut visited = vec![false; n];
    let mut stack = vec![(start, 0usize)];
    visited[start] = true;
    let mut count = 1;
    while let Some((v, next)) = stack.last_mut() {
        let v = *v;
        if let Some(&u) = adj[v].get(*next) {
            *next += 1;
            if !visited[u] {
                visited[u] = true;
                count += 1;
                parent[u] = v;
                children[v].push(u);
                stack.push((u, 0));
            }
        } else {
            stack.pop();
        }
    }
    if count < n {
        let mut comps = 1;
        let mut seen = visited.clone();
        for s in 0..n {
            if !seen[s] {
                comps += 1;
                let mut todo = vec![s];
                seen[s] = true;
                while let Some(v) = todo.pop() {
                    for &u in &adj[v] {
                        if !seen[u] {
                            seen[u] = true;
                            todo.push(u);
                        }
                    }
                }
            }
        }
        return Err(Error::Disconnected(comps));
    }

    let mut on_path = vec![false; n];
    let mut v = end;
    on_path[v] = true;
    while v != start {
        v = parent[v];
        on_path[v] = true;
    }
    for kids in &mut children {
        // Stable: the branch towards the end piece moves to the back.
        kids.sort_by_key(|&c| on_path[c]);
    }

    let mut walk = Vec::with_capacity(2 * n);
    // (node, next child position)
    let mut stack = vec![(start, 0usize)];
    walk.push(start);
    while let Some((v, next)) = stack.last_mut() {
        let v = *v;
        if let Some(&c) = children[v].get(*next) {
            *next += 1;
            walk.push(c);
            stack.push((c, 0));
        } else {
            stack.pop();
            if !on_path[v] {
                if let Some(&(p, _)) = stack.last() {
                    walk.push(p);
                }
            }
        }
    }
    Ok(compress(walk, &adj))
}

fn compress(walk: Vec<usize>, adj: &[Vec<usize>]) -> Vec<usize> {
    let touch = |a: usize, b: usize| a == b || adj[a].binary_search(&b).is_ok();
    let mut count = vec![0usize; adj.len()];
    for &v in &walk {
        count[v] += 1;
    }
    let m = walk.len();
    let mut kept: Vec<usize> = Vec::with_capacity(m);
    for i in 0..m {
        let v = walk[i];
        let removable = i > 0
            && i + 1 < m
            && count[v] > 1
            && touch(*kept.last().expect("first entry kept"), walk[i + 1]);
        if removable {
            count[v] -= 1;
        } else {
            kept.push(v);
        }
    }
    kept
}

/// Orders `pieces` into a weak chain from `x` to `y`; see [`order_walk`].
pub fn order_chain(pieces: &[Arc<DyadicCompactum>], x: &Point, y: &Point, epsilon: Dyadic) -> Result<Chain> {
    let walk = order_walk(pieces, x, y)?;
    Chain::from_parts(epsilon, walk.into_iter().map(|i| Arc::clone(&pieces[i])).collect())
}
