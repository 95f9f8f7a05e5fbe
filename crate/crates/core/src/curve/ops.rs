use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{hausdorff, DyadicCompactum};
use crate::scalar::Scalar;

use super::tower::CurveTower;

/// Closed parameter interval `[lo, hi]`.
pub type ParamInterval<Q> = (Q, Q);

/// Merged level-`N` parameter intervals whose piece touches `k`.
pub fn preimage<Q: Scalar>(tower: &CurveTower<Q>, k: &DyadicCompactum) -> Result<Vec<ParamInterval<Q>>> {
    if k.dim() != tower.dim() {
        return Err(Error::DimensionMismatch(tower.dim(), k.dim()));
    }
    let lvl = tower.level(tower.depth())?;
    let ts = lvl.breaks.values();
    let mut out: Vec<ParamInterval<Q>> = Vec::new();
    for (i, piece) in lvl.chain.pieces().iter().enumerate() {
        if !piece.touches(k)? {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.1 == ts[i] => last.1 = ts[i + 1].clone(),
            _ => out.push((ts[i].clone(), ts[i + 1].clone())),
        }
    }
    Ok(out)
}

/// [`preimage`] of the closed `r`-neighbourhood of `k`.
pub fn preimage_near<Q: Scalar>(tower: &CurveTower<Q>, k: &DyadicCompactum, r: Dyadic) -> Result<Vec<ParamInterval<Q>>> {
    preimage(tower, &k.dilate(r)?)
}

/// Whether `t` lies in one of the intervals.
pub fn covers<Q: Scalar>(intervals: &[ParamInterval<Q>], t: &Q) -> bool {
    intervals.iter().any(|(lo, hi)| lo <= t && t <= hi)
}

/// Least `j` with `j · 2^-r ≥ t`, for `t ∈ [0, 1]`.
fn ceil_scaled<Q: Scalar>(t: &Q, r: u32) -> i64 {
    let (mut lo, mut hi) = (0i64, 1i64 << r);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if Q::from_dyadic(Dyadic::new(mid, r)) >= *t {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Largest `j` with `j · 2^-r ≤ t`, for `t ∈ [0, 1]`.
fn floor_scaled<Q: Scalar>(t: &Q, r: u32) -> i64 {
    let c = ceil_scaled(t, r);
    if Q::from_dyadic(Dyadic::new(c, r)) == *t {
        c
    } else {
        c - 1
    }
}

/// Outer cell approximation of the level-`N` graph `⋃ [t_{i-1}, t_i] × K_i` in `[0,1]^{1+d}`,
/// time first, at the level of the pieces.
pub fn graph<Q: Scalar>(tower: &CurveTower<Q>) -> Result<DyadicCompactum> {
    let lvl = tower.level(tower.depth())?;
    let r = lvl.chain.level();
    let ts = lvl.breaks.values();
    let top = (1i64 << r) - 1;
    let mut cells: Vec<Vec<u32>> = Vec::new();
    for (i, piece) in lvl.chain.pieces().iter().enumerate() {
        let first = (ceil_scaled(&ts[i], r) - 1).clamp(0, top);
        let last = floor_scaled(&ts[i + 1], r).clamp(0, top);
        for c in piece.cells() {
            for j in first..=last {
                let mut cell = Vec::with_capacity(c.len() + 1);
                cell.push(j as u32);
                cell.extend_from_slice(&c);
                cells.push(cell);
            }
        }
    }
    DyadicCompactum::new(tower.dim() + 1, r, cells)
}

fn check_pair<Q: Scalar>(f: &CurveTower<Q>, g: &CurveTower<Q>) -> Result<()> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    if f.depth() != g.depth() {
        return Err(Error::LevelMismatch(f.depth(), g.depth()));
    }
    let (lf, lg) = (f.level(f.depth())?.chain.level(), g.level(g.depth())?.chain.level());
    if lf != lg {
        return Err(Error::LevelMismatch(lf, lg));
    }
    Ok(())
}

/// Exact Hausdorff distance between the two level-`N` graph approximations.
pub fn graph_distance<Q: Scalar>(f: &CurveTower<Q>, g: &CurveTower<Q>) -> Result<Dyadic> {
    check_pair(f, g)?;
    hausdorff(&graph(f)?, &graph(g)?)
}

/// `sup_t ℓ∞(f.eval(t), g.eval(t))`, attained on the merged breakpoints or the merged interval midpoints.
pub fn sup_eval_distance<Q: Scalar>(f: &CurveTower<Q>, g: &CurveTower<Q>) -> Result<Dyadic> {
    check_pair(f, g)?;
    let mut ts: Vec<Q> = f.level(f.depth())?.breaks.values().to_vec();
    ts.extend_from_slice(g.level(g.depth())?.breaks.values());
    ts.sort();
    ts.dedup();
    let mids: Vec<Q> = ts.windows(2).map(|w| (w[0].clone() + w[1].clone()).half()).collect();
    let mut best = Dyadic::ZERO;
    for t in ts.iter().chain(&mids) {
        best = best.max(f.eval(t)?.0.dist(&g.eval(t)?.0));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::build_tower;
    use crate::geometry::io::parse_ascii;
    use crate::Rational;
    use num_rational::Ratio;

    fn q(n: usize, d: usize) -> Rational {
        Rational::ratio(n, d)
    }

    fn l_shape() -> DyadicCompactum {
        parse_ascii("#..\n#..\n###\n").unwrap()
    }

    #[test]
    fn scaled_rounding() {
        let third = Ratio::<i64>::new(1, 3);
        assert_eq!(ceil_scaled(&third, 2), 2);
        assert_eq!(floor_scaled(&third, 2), 1);
        let half = Ratio::<i64>::new(1, 2);
        assert_eq!(ceil_scaled(&half, 2), 2);
        assert_eq!(floor_scaled(&half, 2), 2);
        assert_eq!(ceil_scaled(&Ratio::<i64>::new(0, 1), 3), 0);
        assert_eq!(floor_scaled(&Ratio::<i64>::new(1, 1), 3), 8);
    }

    #[test]
    fn preimage_examples() {
        let x = l_shape();
        let t: CurveTower = build_tower(&x, 3).unwrap();
        assert_eq!(preimage(&t, &x).unwrap(), vec![(q(0, 1), q(1, 1))]);
        let far = DyadicCompactum::new(2, 2, [[3u32, 3]]).unwrap();
        assert!(preimage(&t, &far).unwrap().is_empty());
        let corner = DyadicCompactum::new(2, 2, [[2u32, 0]]).unwrap();
        let pre = preimage(&t, &corner).unwrap();
        assert!(!pre.is_empty());
        for w in pre.windows(2) {
            assert!(w[0].1 < w[1].0);
        }
        assert!(preimage(&t, &DyadicCompactum::unit_cube(3)).is_err());
    }

    #[test]
    fn near_preimage_contains_close_parameters() {
        let x = l_shape();
        let t: CurveTower = build_tower(&x, 3).unwrap();
        let r = t.error_bound();
        for k in [[0u32, 2], [2, 0], [1, 0]] {
            let target = DyadicCompactum::new(2, 2, [k]).unwrap();
            let near = preimage_near(&t, &target, r).unwrap();
            let plain = preimage(&t, &target).unwrap();
            for (lo, hi) in &plain {
                assert!(covers(&near, lo) && covers(&near, hi));
            }
            let within = target.dilate(r).unwrap();
            for j in 0..=1024 {
                let s = q(j, 1024);
                if within.contains_point(&t.eval(&s).unwrap().0) {
                    assert!(covers(&near, &s), "t = {s}");
                }
            }
        }
    }

    #[test]
    fn graph_of_identical_towers() {
        let t: CurveTower = build_tower(&l_shape(), 2).unwrap();
        let gr = graph(&t).unwrap();
        assert_eq!(gr.dim(), 3);
        assert_eq!(graph_distance(&t, &t).unwrap(), Dyadic::ZERO);
        assert_eq!(sup_eval_distance(&t, &t).unwrap(), Dyadic::ZERO);
    }

    #[test]
    fn graph_projects_onto_pieces() {
        let t: CurveTower = build_tower(&l_shape(), 2).unwrap();
        let gr = graph(&t).unwrap();
        let lvl = t.level(2).unwrap();
        let ts = lvl.breaks.values();
        for (i, piece) in lvl.chain.pieces().iter().enumerate() {
            let mid = (ts[i].clone() + ts[i + 1].clone()).half();
            let cell = ceil_scaled(&mid, gr.level()) - 1;
            for c in piece.cells() {
                let mut g = vec![cell.max(0) as u32];
                g.extend(c);
                assert!(gr.contains_cell(&g));
            }
        }
    }

    #[test]
    fn translated_shape_bound() {
        let a = parse_ascii("###.\n....\n....\n....\n").unwrap();
        let b = parse_ascii(".###\n....\n....\n....\n").unwrap();
        let f: CurveTower = build_tower(&a, 2).unwrap();
        let g: CurveTower = build_tower(&b, 2).unwrap();
        let d = graph_distance(&f, &g).unwrap();
        let sup = sup_eval_distance(&f, &g).unwrap();
        assert!(d <= sup + f.error_bound());
        assert!(d <= a.side() + f.error_bound());
    }

    #[test]
    fn mismatched_towers() {
        let f: CurveTower = build_tower(&l_shape(), 2).unwrap();
        let g: CurveTower = build_tower(&l_shape(), 3).unwrap();
        assert!(matches!(graph_distance(&f, &g), Err(Error::LevelMismatch(..))));
        let h: CurveTower = build_tower(&DyadicCompactum::unit_cube(1), 2).unwrap();
        assert!(matches!(sup_eval_distance(&f, &h), Err(Error::DimensionMismatch(..))));
    }
}
