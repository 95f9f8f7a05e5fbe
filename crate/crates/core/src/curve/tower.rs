use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chains::{first_chain, refine_chain_with, refinement_violations, Chain, CoverMode, RefinementCode};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{DyadicCompactum, Point};
use crate::scalar::{in_unit, BigRational, Scalar};

use super::breaks::{Location, ParamBreaks};

/// One level of a tower: the chain `Ψ_n`, its breakpoints `τ_n` and the code tying it to level `n - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TowerLevel<Q: Scalar> {
    pub epsilon: Dyadic,
    pub breaks: ParamBreaks<Q>,
    pub chain: Chain,
    pub code: RefinementCode,
}

/// Chains `Ψ_1, …, Ψ_N` with parameter breakpoints; level `n` maps `[t_{i-1}, t_i]` to piece `K_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "", try_from = "TowerRepr<Q>")]
pub struct CurveTower<Q: Scalar = BigRational> {
    ambient: DyadicCompactum,
    levels: Vec<TowerLevel<Q>>,
}

#[derive(Deserialize)]
#[serde(bound = "")]
struct TowerRepr<Q: Scalar> {
    ambient: DyadicCompactum,
    levels: Vec<TowerLevel<Q>>,
}

impl<Q: Scalar> TryFrom<TowerRepr<Q>> for CurveTower<Q> {
    type Error = Error;

    fn try_from(r: TowerRepr<Q>) -> Result<Self> {
        let tower = CurveTower { ambient: r.ambient, levels: r.levels };
        if let Some(msg) = tower.structure_errors().into_iter().next() {
            return Err(Error::InvalidChain(msg));
        }
        Ok(tower)
    }
}

/// Builds the tower of levels `1..=n` with [`CoverMode::Direct`].
pub fn build_tower<Q: Scalar>(x: &DyadicCompactum, n: u32) -> Result<CurveTower<Q>> {
    build_tower_with(x, n, CoverMode::default())
}

pub fn build_tower_with<Q: Scalar>(x: &DyadicCompactum, n: u32, mode: CoverMode) -> Result<CurveTower<Q>> {
    if n == 0 {
        return Err(Error::InvalidParameter("tower needs at least one level".into()));
    }
    let comps = x.components().len();
    if comps > 1 {
        return Err(Error::Disconnected(comps));
    }
    let chain = first_chain(x, mode)?;
    let breaks = ParamBreaks::uniform(chain.len())?;
    let code = RefinementCode { mu: vec![1], nu: vec![chain.len()] };
    let mut levels = vec![TowerLevel { epsilon: chain.epsilon(), breaks, chain, code }];
    for k in 2..=n {
        let prev = levels.last().expect("nonempty");
        let (chain, code) = refine_chain_with(&prev.chain, k, mode)?;
        let breaks = prev.breaks.refine(&code.nu)?;
        levels.push(TowerLevel { epsilon: chain.epsilon(), breaks, chain, code });
    }
    Ok(CurveTower { ambient: x.clone(), levels })
}

impl<Q: Scalar> CurveTower<Q> {
    pub fn ambient(&self) -> &DyadicCompactum {
        &self.ambient
    }

    /// Deepest level `N`.
    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    /// Level `n`, 1-based.
    pub fn level(&self, n: u32) -> Result<&TowerLevel<Q>> {
        if n == 0 || n > self.depth() {
            return Err(Error::InvalidParameter(format!("level {n} outside 1..={}", self.depth())));
        }
        Ok(&self.levels[n as usize - 1])
    }

    pub fn levels(&self) -> &[TowerLevel<Q>] {
        &self.levels
    }

    /// Chain length `λ(X, n)`.
    pub fn chain_len(&self, n: u32) -> Result<usize> {
        Ok(self.level(n)?.chain.len())
    }

    /// 0-based indices of the pieces forming `ψ_n(t)`: one piece inside an interval or
    /// at `t = 0, 1`, two at an interior breakpoint.
    pub fn section_indices(&self, n: u32, t: &Q) -> Result<(usize, Option<usize>)> {
        if !in_unit(t) {
            return Err(Error::InvalidParameter(format!("parameter {t} outside [0, 1]")));
        }
        let lvl = self.level(n)?;
        let m = lvl.chain.len();
        Ok(match lvl.breaks.locate(t) {
            Location::Interior(i) => (i, None),
            Location::Break(0) => (0, None),
            Location::Break(i) if i == m => (m - 1, None),
            Location::Break(i) => (i - 1, Some(i)),
        })
    }

    pub fn section_pieces(&self, n: u32, t: &Q) -> Result<Vec<&Arc<DyadicCompactum>>> {
        let (i, j) = self.section_indices(n, t)?;
        let pieces = self.level(n)?.chain.pieces();
        Ok(std::iter::once(&pieces[i]).chain(j.map(|j| &pieces[j])).collect())
    }

    /// `ψ_n(t)`: `K_1` at 0, `K_m` at 1, `K_i` inside `(t_{i-1}, t_i)`, `K_i ∪ K_{i+1}` at `t_i`.
    pub fn section(&self, n: u32, t: &Q) -> Result<DyadicCompactum> {
        let pieces = self.section_pieces(n, t)?;
        DyadicCompactum::union_all(pieces.into_iter().map(|p| p.as_ref()))
    }

    /// Canonical point of `ψ_n(t)`.
    pub fn eval_at(&self, n: u32, t: &Q) -> Result<Point> {
        let pieces = self.section_pieces(n, t)?;
        Ok(pieces.iter().map(|p| p.canonical_point()).min().expect("nonempty section"))
    }

    /// Approximation of the limit curve at `t` and a bound `2^{1-N}` on its ℓ∞ error.
    pub fn eval(&self, t: &Q) -> Result<(Point, Dyadic)> {
        Ok((self.eval_at(self.depth(), t)?, self.error_bound()))
    }

    /// `2^{1-N}`.
    pub fn error_bound(&self) -> Dyadic {
        Dyadic::pow2_neg(self.depth() - 1)
    }

    /// Samples `(t, eval(t))` at `t = k · 2^-e`.
    pub fn samples(&self, e: u32) -> Result<Vec<(Dyadic, Point)>> {
        (0..=1u64 << e)
            .map(|k| {
                let t = Dyadic::new(k as i64, e);
                Ok((t, self.eval_at(self.depth(), &Q::from_dyadic(t))?))
            })
            .collect()
    }

    /// Consistency of levels, codes and breakpoints; chain clauses are not rechecked.
    fn structure_errors(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.levels.is_empty() {
            out.push("tower has no levels".into());
        }
        for (k, lvl) in self.levels.iter().enumerate() {
            let n = k as u32 + 1;
            if lvl.epsilon != Dyadic::pow2_neg(n) || lvl.chain.epsilon() != lvl.epsilon {
                out.push(format!("level {n} has epsilon {}", lvl.epsilon));
            }
            if lvl.breaks.intervals() != lvl.chain.len() {
                out.push(format!("level {n}: {} intervals for {} pieces", lvl.breaks.intervals(), lvl.chain.len()));
            }
            if lvl.chain.dim() != self.ambient.dim() {
                out.push(format!("level {n} has dimension {}", lvl.chain.dim()));
            }
            if let Err(e) = lvl.code.check(lvl.chain.len()) {
                out.push(format!("level {n}: {e}"));
            }
            if k > 0 {
                let prev = &self.levels[k - 1];
                if lvl.code.mu.len() != prev.chain.len() {
                    out.push(format!("level {n} code has {} blocks", lvl.code.mu.len()));
                } else if prev.breaks.refine(&lvl.code.nu).ok().as_ref() != Some(&lvl.breaks) {
                    out.push(format!("level {n} breakpoints do not split level {}", n - 1));
                }
            }
        }
        out
    }

    /// All chain, refinement and breakpoint clauses, one message per violation.
    pub fn violations(&self) -> Vec<String> {
        let mut out = self.structure_errors();
        for (k, lvl) in self.levels.iter().enumerate() {
            let n = k + 1;
            out.extend(lvl.chain.violations(&self.ambient).iter().map(|v| format!("level {n}: {v}")));
            if k > 0 {
                out.extend(
                    refinement_violations(&self.levels[k - 1].chain, &lvl.chain, &lvl.code)
                        .iter()
                        .map(|v| format!("level {n}: {v}")),
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::io::parse_ascii;
    use crate::Rational;

    fn l_shape() -> DyadicCompactum {
        parse_ascii("#.\n##\n").unwrap()
    }

    fn q(n: usize, d: usize) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn unit_interval_tower() {
        let x = DyadicCompactum::unit_cube(1);
        let tower: CurveTower = build_tower(&x, 1).unwrap();
        let lvl = tower.level(1).unwrap();
        assert!(tower.violations().is_empty());
        assert_eq!(lvl.breaks.values().len(), lvl.chain.len() + 1);
        assert_eq!(lvl.breaks, ParamBreaks::uniform(lvl.chain.len()).unwrap());
        assert_eq!(lvl.code, RefinementCode { mu: vec![1], nu: vec![lvl.chain.len()] });
        for p in lvl.chain.pieces() {
            assert!(p.diam() < Dyadic::new(1, 1));
        }
    }

    #[test]
    fn breakpoint_counts_and_sections() {
        let tower: CurveTower = build_tower(&l_shape(), 3).unwrap();
        assert!(tower.violations().is_empty());
        for n in 1..=3 {
            let lvl = tower.level(n).unwrap();
            assert_eq!(lvl.breaks.values().len(), tower.chain_len(n).unwrap() + 1);
            let chain = &lvl.chain;
            assert_eq!(tower.section(n, &q(0, 1)).unwrap(), chain.piece(0).clone());
            assert_eq!(tower.section(n, &q(1, 1)).unwrap(), chain.piece(chain.len() - 1).clone());
            let t1 = lvl.breaks.get(1).clone();
            let both = chain.piece(0).union(chain.piece(1)).unwrap();
            assert_eq!(tower.section(n, &t1).unwrap(), both);
        }
        assert!(tower.section(1, &q(3, 2)).is_err());
        assert!(tower.section(4, &q(1, 2)).is_err());
    }

    #[test]
    fn nested_sections_on_fine_grid() {
        let tower: CurveTower = build_tower(&l_shape(), 4).unwrap();
        for k in 0..=1024usize {
            let t = q(k, 1024);
            for n in 1..4 {
                let coarse = tower.section(n, &t).unwrap();
                let fine = tower.section(n + 1, &t).unwrap();
                assert!(fine.is_subset_of(&coarse), "t = {t}, level {n}");
                assert!(coarse.diam() <= Dyadic::pow2_neg(n - 1));
            }
        }
    }

    #[test]
    fn eval_endpoints_and_levels() {
        let x = l_shape();
        let tower: CurveTower = build_tower(&x, 3).unwrap();
        let (p0, bound) = tower.eval(&q(0, 1)).unwrap();
        assert_eq!(bound, Dyadic::new(1, 2));
        assert!(tower.level(3).unwrap().chain.piece(0).contains_point(&p0));
        assert!(tower.level(1).unwrap().chain.piece(0).contains_point(&p0));
        for k in 0..=64 {
            let t = q(k, 64);
            for n in 1..=3u32 {
                for m in 1..=3u32 {
                    let d = tower.eval_at(n, &t).unwrap().dist(&tower.eval_at(m, &t).unwrap());
                    assert!(d <= Dyadic::pow2_neg(n.min(m) - 1));
                }
            }
        }
    }

    #[test]
    fn rejects_disconnected_and_zero_depth() {
        let x = DyadicCompactum::new(2, 2, [[0u32, 0], [3, 3]]).unwrap();
        assert_eq!(build_tower::<Rational>(&x, 2), Err(Error::Disconnected(2)));
        assert!(build_tower::<Rational>(&l_shape(), 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let tower: CurveTower = build_tower(&l_shape(), 2).unwrap();
        let s = serde_json::to_string(&tower).unwrap();
        assert!(s.starts_with(r#"{"ambient":{"dim":2,"level":1"#));
        assert!(s.contains(r#""levels":[{"epsilon":"1/2^1","breaks":["0","#));
        let back: CurveTower = serde_json::from_str(&s).unwrap();
        assert_eq!(back, tower);
        let broken = s.replacen(r#""nu":["#, r#""nu":[1000,"#, 1);
        assert!(serde_json::from_str::<CurveTower>(&broken).is_err());
    }

    #[test]
    fn machine_rationals_agree_with_big() {
        use num_rational::Ratio;
        let big: CurveTower = build_tower(&l_shape(), 3).unwrap();
        let small: CurveTower<Ratio<i64>> = build_tower(&l_shape(), 3).unwrap();
        for k in 0..=256i64 {
            let t = Dyadic::new(k, 8);
            assert_eq!(
                big.eval(&Rational::from_dyadic(t)).unwrap(),
                small.eval(&Ratio::<i64>::from_dyadic(t)).unwrap()
            );
        }
    }
}
