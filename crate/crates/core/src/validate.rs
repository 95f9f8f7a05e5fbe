//! Invariant suite over one input set: chains, tower, evaluation, anchoring, arcs,
//! Cantor coding and serialization round trips.

use std::fmt;

use crate::arc::{arc_in_tower, gap_property, minimal_admissible};
use crate::cantor::{code, PrefixTree};
use crate::chains::{Chain, CoverMode};
use crate::curve::{anchor, build_tower_with, CurveTower};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{hausdorff_points, DyadicCompactum, Point};
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct ValidateOptions {
    /// Tower depth `N`.
    pub level: u32,
    /// Parameters are checked on the grid `k · 2^-grid_exp`.
    pub grid_exp: u32,
    /// Arc endpoints; defaults to the least corner and the greatest corner of `X`.
    pub endpoints: Option<(Point, Point)>,
    pub mode: CoverMode,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { level: 4, grid_exp: 10, endpoints: None, mode: CoverMode::default() }
    }
}

fn check(name: &'static str, failures: Vec<String>, ok: impl Into<String>) -> CheckResult {
    match failures.first() {
        None => CheckResult { name, passed: true, detail: ok.into() },
        Some(first) => CheckResult {
            name,
            passed: false,
            detail: format!("{} violation(s), first: {first}", failures.len()),
        },
    }
}

fn grid(e: u32) -> Vec<(Dyadic, Rational)> {
    (0..=1i64 << e).map(|k| Dyadic::new(k, e)).map(|t| (t, Rational::from_dyadic(t))).collect()
}

/// Greatest corner of the greatest cell.
fn top_corner(x: &DyadicCompactum) -> Point {
    let last = x.cells().last().expect("nonempty");
    Point::new(last.iter().map(|&c| Dyadic::new(c as i64 + 1, x.level())).collect()).expect("valid corner")
}

pub fn validate(x: &DyadicCompactum, opts: &ValidateOptions) -> Result<Vec<CheckResult>> {
    if opts.level == 0 {
        return Err(Error::InvalidParameter("level must be at least 1".into()));
    }
    let tower: CurveTower = build_tower_with(x, opts.level, opts.mode)?;
    let n_max = tower.depth();
    let ts = grid(opts.grid_exp);
    let mut out = Vec::new();

    out.push(check("chain validity", tower.violations(), format!("{n_max} levels, lengths {:?}", lengths(&tower))));

    let mut nest = Vec::new();
    let mut decay = Vec::new();
    let mut consistency = Vec::new();
    for (td, t) in &ts {
        let sections: Vec<DyadicCompactum> = (1..=n_max).map(|n| tower.section(n, t)).collect::<Result<_>>()?;
        let evals: Vec<Point> = (1..=n_max).map(|n| tower.eval_at(n, t)).collect::<Result<_>>()?;
        for n in 1..=n_max {
            let s = &sections[n as usize - 1];
            if n < n_max && !sections[n as usize].is_subset_of(s) {
                nest.push(format!("t = {td}, level {}", n + 1));
            }
            if s.diam() > Dyadic::pow2_neg(n - 1) {
                decay.push(format!("t = {td}, level {n}, diam {}", s.diam()));
            }
            for m in n + 1..=n_max {
                let d = evals[n as usize - 1].dist(&evals[m as usize - 1]);
                if d > Dyadic::pow2_neg(n - 1) {
                    consistency.push(format!("t = {td}, levels {n} and {m}, distance {d}"));
                }
            }
        }
    }
    let grid_note = format!("{} parameters", ts.len());
    out.push(check("nestedness", nest, grid_note.clone()));
    out.push(check("diameter decay", decay, grid_note.clone()));
    out.push(check("eval consistency", consistency, grid_note));

    let top = tower.level(n_max)?;
    let mut params: Vec<Rational> = ts.iter().map(|(_, t)| t.clone()).chain(top.breaks.grid()).collect();
    params.sort();
    params.dedup();
    let gap = top.breaks.min_gap();
    let bound = Dyadic::pow2_neg(n_max - 1).mul_int(3);
    let mut modulus = Vec::new();
    let mut prev: Option<(&Rational, Point)> = None;
    for t in &params {
        let p = tower.eval_at(n_max, t)?;
        if let Some((s, q)) = &prev {
            if t.clone() - (*s).clone() < gap && p.dist(q) > bound {
                modulus.push(format!("between {s} and {t}: {}", p.dist(q)));
            }
        }
        prev = Some((t, p));
    }
    out.push(check("modulus of continuity", modulus, format!("bound {bound}")));

    let samples: Vec<Point> = tower.samples(n_max + 2)?.into_iter().map(|(_, p)| p).collect();
    let h = hausdorff_points(&samples, x)?;
    let tol = Dyadic::pow2_neg(n_max).mul_int(4);
    let surj = if h <= tol { vec![] } else { vec![format!("hausdorff {h} exceeds {tol}")] };
    out.push(check("surjectivity", surj, format!("hausdorff {h} within {tol}")));

    let (ax, ay) = opts.endpoints.clone().unwrap_or_else(|| (x.canonical_point(), top_corner(x)));
    let curve = anchor(&tower, &ax, &ay)?;
    let mut anch = Vec::new();
    let image_parts: Vec<DyadicCompactum> =
        curve.grid_params()?.iter().map(|u| tower.section(n_max, u)).collect::<Result<_>>()?;
    if !DyadicCompactum::union_all(image_parts.iter())?.same_set(x) {
        anch.push("anchored image differs from X".to_string());
    }
    let eb = tower.error_bound();
    let (e0, _) = curve.eval(&Rational::from_usize(0))?;
    let (e1, _) = curve.eval(&Rational::from_usize(1))?;
    if e0.dist(&ax) > eb || e1.dist(&ay) > eb {
        anch.push(format!("endpoints {e0} and {e1} are not within {eb} of {ax} and {ay}"));
    }
    out.push(check("anchoring", anch, format!("from {ax} to {ay}")));

    out.push(arc_check(&tower, &curve.grid_points()?, &ax, &ay));

    let tree = code(x);
    let mut cantor = tree.violations();
    if tree.image()? != *x {
        cantor.push("leaf cells differ from X".into());
    }
    let witnesses = tree.witnesses();
    if witnesses.len() != x.len() {
        cantor.push(format!("{} cells reached, {} expected", witnesses.len(), x.len()));
    }
    for (input, cell) in &witnesses {
        if tree.reindex(input)? != *cell {
            cantor.push(format!("input {input:?} misses cell {:?}", cell.coords()));
        }
    }
    out.push(check("cantor coding", cantor, format!("depth {}, {} leaves", tree.depth(), tree.leaf_count())));

    out.push(check("round trip", round_trips(x, &tower, &tree), "shape, chains, tower and tree reload equal"));
    Ok(out)
}

fn lengths(tower: &CurveTower) -> Vec<usize> {
    tower.levels().iter().map(|l| l.chain.len()).collect()
}

fn arc_check(tower: &CurveTower, samples: &[Point], x: &Point, y: &Point) -> CheckResult {
    let name = "arc";
    if x == y || samples.first() == samples.last() {
        return CheckResult { name, passed: true, detail: "endpoints coincide at this level, nothing to check".into() };
    }
    let arc = match arc_in_tower(tower, x, y) {
        Ok(a) => a,
        Err(e) => return check(name, vec![e.to_string()], ""),
    };
    let mut bad = Vec::new();
    if !arc.is_simple() {
        bad.push("repeated point".to_string());
    }
    if arc.first_point() != &samples[0] || arc.last_point() != &samples[samples.len() - 1] {
        bad.push("endpoints differ from the anchored approximants".into());
    }
    if let Some(p) = arc.points().iter().find(|p| !tower.ambient().contains_point(p)) {
        bad.push(format!("{p} outside X"));
    }
    let step = tower.error_bound().mul_int(3);
    if arc.points().windows(2).any(|w| w[0].dist(&w[1]) > step) {
        bad.push(format!("consecutive points more than {step} apart"));
    }
    match minimal_admissible(samples) {
        Ok(k) if !gap_property(samples, &k) => bad.push("returned index set repeats a value across a gap".into()),
        Ok(_) => {}
        Err(e) => bad.push(e.to_string()),
    }
    check(name, bad, format!("{} points", arc.points().len()))
}

fn round_trips(x: &DyadicCompactum, tower: &CurveTower, tree: &PrefixTree) -> Vec<String> {
    fn again<T: serde::Serialize + serde::de::DeserializeOwned + PartialEq>(v: &T, what: &str) -> Option<String> {
        let s = match serde_json::to_string(v) {
            Ok(s) => s,
            Err(e) => return Some(format!("{what}: {e}")),
        };
        match serde_json::from_str::<T>(&s) {
            Ok(back) if back == *v => None,
            Ok(_) => Some(format!("{what} reloads to a different value")),
            Err(e) => Some(format!("{what}: {e}")),
        }
    }
    let mut out: Vec<String> = Vec::new();
    out.extend(again(x, "shape"));
    for lvl in tower.levels() {
        out.extend(again::<Chain>(&lvl.chain, "chain"));
    }
    out.extend(again(tower, "tower"));
    out.extend(again(tree, "tree"));
    out
}
