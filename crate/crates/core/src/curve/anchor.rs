use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::{in_unit, Scalar};

use super::tower::CurveTower;

/// A tower reparametrized so that it starts near `x` and ends near `y` with the same image.
#[derive(Clone, Debug)]
pub struct AnchoredCurve<'t, Q: Scalar> {
    tower: &'t CurveTower<Q>,
    a: Q,
    b: Q,
    x: Point,
    y: Point,
}

/// Least level-`N` breakpoint whose section contains `p`.
fn first_hit<Q: Scalar>(tower: &CurveTower<Q>, p: &Point) -> Result<Q> {
    if p.dim() != tower.dim() {
        return Err(Error::DimensionMismatch(tower.dim(), p.dim()));
    }
    let lvl = tower.level(tower.depth())?;
    let j = lvl.chain.pieces().iter().position(|k| k.contains_point(p)).ok_or(Error::PointOutside)?;
    Ok(lvl.breaks.get(j).clone())
}

pub fn anchor<'t, Q: Scalar>(tower: &'t CurveTower<Q>, x: &Point, y: &Point) -> Result<AnchoredCurve<'t, Q>> {
    let a = first_hit(tower, x)?;
    let b = first_hit(tower, y)?;
    Ok(AnchoredCurve { tower, a, b, x: x.clone(), y: y.clone() })
}

impl<'t, Q: Scalar> AnchoredCurve<'t, Q> {
    pub fn tower(&self) -> &'t CurveTower<Q> {
        self.tower
    }

    /// Parameters `(a, b)` with `x` in the section at `a` and `y` in the section at `b`.
    pub fn anchors(&self) -> (&Q, &Q) {
        (&self.a, &self.b)
    }

    pub fn endpoints(&self) -> (&Point, &Point) {
        (&self.x, &self.y)
    }

    /// Original parameter for anchored time `s`: runs `a → 0`, then `0 → 1`, then `1 → b`.
    pub fn param(&self, s: &Q) -> Result<Q> {
        if !in_unit(s) {
            return Err(Error::InvalidParameter(format!("parameter {s} outside [0, 1]")));
        }
        let three = Q::from_usize(3);
        let third = Q::ratio(1, 3);
        let two_thirds = Q::ratio(2, 3);
        let one = Q::one();
        Ok(if *s < third {
            self.a.clone() * (one - three * s.clone())
        } else if *s <= two_thirds {
            three * s.clone() - one
        } else {
            let b = self.b.clone();
            three.clone() * b.clone() * s.clone() - three.clone() * s.clone() - Q::from_usize(2) * b + three
        })
    }

    pub fn eval(&self, s: &Q) -> Result<(Point, Dyadic)> {
        self.tower.eval(&self.param(s)?)
    }

    /// Original parameters visited in order: the level-`N` breakpoint and midpoint grid
    /// from `a` down to 0, up to 1, then down to `b`.
    pub fn grid_params(&self) -> Result<Vec<Q>> {
        let grid = self.tower.level(self.tower.depth())?.breaks.grid();
        let ia = grid.binary_search(&self.a).expect("anchor on the grid");
        let ib = grid.binary_search(&self.b).expect("anchor on the grid");
        let last = grid.len() - 1;
        let mut out = Vec::with_capacity(ia + grid.len() + last - ib);
        out.extend(grid[1..=ia].iter().rev().cloned());
        out.extend(grid.iter().cloned());
        out.extend(grid[ib..last].iter().rev().cloned());
        Ok(out)
    }

    /// Curve values along [`grid_params`](Self::grid_params); consecutive values lie within `2^{1-N}`.
    pub fn grid_points(&self) -> Result<Vec<Point>> {
        let n = self.tower.depth();
        self.grid_params()?.iter().map(|u| self.tower.eval_at(n, u)).collect()
    }

    /// `(s, eval(s))` at `s = k · 2^-e`.
    pub fn samples(&self, e: u32) -> Result<Vec<(Dyadic, Point)>> {
        (0..=1u64 << e)
            .map(|k| {
                let s = Dyadic::new(k as i64, e);
                Ok((s, self.eval(&Q::from_dyadic(s))?.0))
            })
            .collect()
    }
}
