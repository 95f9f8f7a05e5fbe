//! Acceptance suite. Each test checks one criterion and writes a single PASS or FAIL
//! line to stderr, uncaptured, before asserting.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use peanokit::arc::{extract_arc, gap_property, is_admissible, minimal_admissible, whitney, IndexSet};
use peanokit::cantor::{code, phi_cell};
use peanokit::chains::{refinement_violations, s_accretion, AccretionParams};
use peanokit::curve::{anchor, build_tower, graph_distance, sup_eval_distance};
use peanokit::geometry::{hausdorff_points, io::parse_shape};
use peanokit::scalar::Scalar;
use peanokit::{CurveTower, Dyadic, DyadicCompactum, Error, Point, Rational};

const DEPTH: u32 = 6;
const RUNTIME_LIMIT: Duration = Duration::from_secs(30);
const SECTION_GRID_EXP: u32 = 10;
const SAMPLE_EXTRA_LEVELS: u32 = 2;
const RANDOM_EVALS: usize = 10_000;
const RANDOM_T_EXP: u32 = 30;
const GRAPH_PAIRS: usize = 100;
const GRAPH_GRID_LEVEL: u32 = 2;
const GRAPH_DEPTH: u32 = 2;
const ACCRETIONS: usize = 200;
const ARCS: usize = 50;
const MAX_PATTERN_M: usize = 10;
const GRID_POINTS: u8 = 9;
const WHITNEY_MAX_M: usize = 6;
const CANTOR_EXHAUSTIVE_R: u32 = 2;
const CANTOR_TOP_R: u32 = 3;
const CANTOR_RANDOM_SETS: usize = 200;
const CLI_LEVEL: &str = "3";

fn verdict(id: u8, title: &str, passed: bool, detail: &str) {
    let line = format!("acceptance {id:>2} {title}: {} ({detail})\n", if passed { "PASS" } else { "FAIL" });
    std::io::stderr().lock().write_all(line.as_bytes()).expect("stderr");
    assert!(passed, "{}", line.trim_end());
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn fixture_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixture_dir())
        .expect("fixture directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    files.sort();
    files
}

struct Fixture {
    name: String,
    x: DyadicCompactum,
}

/// The connected fixtures.
fn fixtures() -> Vec<Fixture> {
    fixture_files()
        .into_iter()
        .map(|p| Fixture {
            name: p.file_stem().unwrap().to_string_lossy().into_owned(),
            x: parse_shape(&std::fs::read_to_string(&p).unwrap()).unwrap(),
        })
        .filter(|f| f.x.is_connected())
        .collect()
}

fn towers() -> &'static [(String, CurveTower)] {
    static TOWERS: OnceLock<Vec<(String, CurveTower)>> = OnceLock::new();
    TOWERS.get_or_init(|| fixtures().into_iter().map(|f| (f.name, build_tower(&f.x, DEPTH).unwrap())).collect())
}

fn rat(d: Dyadic) -> Rational {
    Rational::from_dyadic(d)
}

/// Component of a random cell subset, at least two cells.
fn random_shape(rng: &mut ChaCha8Rng, level: u32, density: f64) -> DyadicCompactum {
    let side = 1u32 << level;
    loop {
        let cells: Vec<[u32; 2]> =
            (0..side).flat_map(|i| (0..side).map(move |j| [i, j])).filter(|_| rng.gen_bool(density)).collect();
        if cells.is_empty() {
            continue;
        }
        let k = DyadicCompactum::new(2, level, cells).unwrap();
        let comps = k.components();
        let pick = comps[rng.gen_range(0..comps.len())].clone();
        if pick.len() >= 2 {
            return pick;
        }
    }
}

/// Connected subset grown from one cell of `x` by random neighbor steps.
fn random_piece(rng: &mut ChaCha8Rng, x: &DyadicCompactum) -> DyadicCompactum {
    let cells: Vec<Vec<u32>> = x.cells().collect();
    let mut taken: BTreeSet<Vec<u32>> = BTreeSet::new();
    taken.insert(cells[rng.gen_range(0..cells.len())].clone());
    let target = rng.gen_range(1..=cells.len());
    while taken.len() < target {
        let frontier: Vec<&Vec<u32>> = cells
            .iter()
            .filter(|c| !taken.contains(*c))
            .filter(|c| taken.iter().any(|t| t.iter().zip(c.iter()).all(|(a, b)| a.abs_diff(*b) <= 1)))
            .collect();
        if frontier.is_empty() {
            break;
        }
        taken.insert(frontier[rng.gen_range(0..frontier.len())].clone());
    }
    DyadicCompactum::new(2, x.level(), taken).unwrap()
}

/// A point of a random cell of `x`, at quarter-cell offsets.
fn random_point(rng: &mut ChaCha8Rng, x: &DyadicCompactum) -> Point {
    let cells: Vec<Vec<u32>> = x.cells().collect();
    let c = &cells[rng.gen_range(0..cells.len())];
    let coords = c.iter().map(|&v| Dyadic::new(4 * v as i64 + rng.gen_range(0..=4), x.level() + 2)).collect();
    Point::new(coords).unwrap()
}

#[test]
fn c01_chain_validity() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut count = 0;
    for f in fixtures() {
        count += 1;
        let tower: CurveTower = build_tower(&f.x, DEPTH).unwrap();
        for n in 1..=DEPTH {
            let lvl = tower.level(n).unwrap();
            if lvl.chain.epsilon() != Dyadic::pow2_neg(n) {
                bad.push(format!("{} level {n}: epsilon {}", f.name, lvl.chain.epsilon()));
            }
            bad.extend(lvl.chain.violations(&f.x).into_iter().map(|v| format!("{} level {n}: {v:?}", f.name)));
            if n > 1 {
                let coarse = &tower.level(n - 1).unwrap().chain;
                bad.extend(
                    refinement_violations(coarse, &lvl.chain, &lvl.code)
                        .into_iter()
                        .map(|v| format!("{} level {n}: {v:?}", f.name)),
                );
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = count == 10 && bad.is_empty() && elapsed < RUNTIME_LIMIT;
    let detail = format!("{count} fixtures, {} violations, {:.2}s of {}s", bad.len(), elapsed.as_secs_f64(), RUNTIME_LIMIT.as_secs());
    if let Some(first) = bad.first() {
        eprintln!("first violation: {first}");
    }
    verdict(1, "chain validity", ok, &detail);
}

#[test]
fn c02_nestedness_and_decay() {
    let mut bad = Vec::new();
    for (name, tower) in towers() {
        for k in 0..=1i64 << SECTION_GRID_EXP {
            let t = rat(Dyadic::new(k, SECTION_GRID_EXP));
            let sections: Vec<DyadicCompactum> = (1..=DEPTH).map(|n| tower.section(n, &t).unwrap()).collect();
            for n in 1..=DEPTH as usize {
                if n < DEPTH as usize && !sections[n].is_subset_of(&sections[n - 1]) {
                    bad.push(format!("{name}: t = {k}/2^{SECTION_GRID_EXP}, level {}", n + 1));
                }
                if sections[n - 1].diam() > Dyadic::pow2_neg(n as u32 - 1) {
                    bad.push(format!("{name}: t = {k}/2^{SECTION_GRID_EXP}, level {n} diam {}", sections[n - 1].diam()));
                }
            }
        }
    }
    let detail = format!("{} towers, {} parameters, {} violations", towers().len(), (1 << SECTION_GRID_EXP) + 1, bad.len());
    verdict(2, "tower nestedness and decay", bad.is_empty(), &detail);
}

#[test]
fn c03_surjectivity() {
    let tol = Dyadic::pow2_neg(DEPTH).mul_int(4);
    let mut failed = Vec::new();
    let mut rows = Vec::new();
    for (name, tower) in towers() {
        let pts: Vec<Point> =
            tower.samples(DEPTH + SAMPLE_EXTRA_LEVELS).unwrap().into_iter().map(|(_, p)| p).collect();
        let h = hausdorff_points(&pts, tower.ambient()).unwrap();
        rows.push(format!("{name} {h}"));
        if h > tol {
            failed.push(name.clone());
        }
    }
    eprintln!("hausdorff at N = {DEPTH}: {}", rows.join(", "));
    let detail = format!("tolerance {tol}, {} of {} fixtures over: {}", failed.len(), rows.len(), failed.join(", "));
    verdict(3, "surjectivity", failed.is_empty(), &detail);
}

#[test]
fn c04_eval_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let all = towers();
    let mut bad = 0;
    for i in 0..RANDOM_EVALS {
        let (_, tower) = &all[rng.gen_range(0..all.len())];
        let n = rng.gen_range(1..=DEPTH);
        let m = rng.gen_range(1..=DEPTH);
        // every tenth parameter is a breakpoint
        let t = if i % 10 == 0 {
            let vals = tower.level(n.max(m)).unwrap().breaks.values();
            vals[rng.gen_range(0..vals.len())].clone()
        } else {
            rat(Dyadic::new(rng.gen_range(0..=1i64 << RANDOM_T_EXP), RANDOM_T_EXP))
        };
        let d = tower.eval_at(n, &t).unwrap().dist(&tower.eval_at(m, &t).unwrap());
        if d > Dyadic::pow2_neg(n.min(m) - 1) {
            bad += 1;
        }
    }
    verdict(4, "eval consistency", bad == 0, &format!("{RANDOM_EVALS} checks, {bad} violations"));
}

#[test]
fn c05_graph_lipschitz() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let slack = Dyadic::pow2_neg(GRAPH_DEPTH - 1);
    let mut bad = Vec::new();
    for _ in 0..GRAPH_PAIRS {
        let f: CurveTower = build_tower(&random_shape(&mut rng, GRAPH_GRID_LEVEL, 0.6), GRAPH_DEPTH).unwrap();
        let g: CurveTower = build_tower(&random_shape(&mut rng, GRAPH_GRID_LEVEL, 0.6), GRAPH_DEPTH).unwrap();
        match (graph_distance(&f, &g), sup_eval_distance(&f, &g)) {
            (Ok(dg), Ok(m)) if dg <= m + slack => {}
            (Ok(dg), Ok(m)) => bad.push(format!("graph distance {dg} > {m} + {slack}")),
            (a, b) => bad.push(format!("{a:?} {b:?}")),
        }
    }
    if let Some(first) = bad.first() {
        eprintln!("first violation: {first}");
    }
    verdict(5, "graph Lipschitz bound", bad.is_empty(), &format!("{GRAPH_PAIRS} pairs, slack {slack}, {} violations", bad.len()));
}

#[test]
fn c06_accretion_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = Vec::new();
    for _ in 0..ACCRETIONS {
        let level = rng.gen_range(2..=3);
        let x = random_shape(&mut rng, level, 0.65);
        let a = random_piece(&mut rng, &x);
        let eps = Dyadic::new(rng.gen_range(1..=8), rng.gen_range(2..=5));
        let out = s_accretion(&AccretionParams::new(a.clone(), eps, x.clone()).unwrap()).unwrap();
        let bound = eps.mul_int(2) + a.diam();
        if out.diam() > bound || !a.is_subset_of(&out) || !out.is_subset_of(&x) || !out.is_connected() {
            bad.push(format!("eps {eps}: diam {} bound {bound}", out.diam()));
        }
    }
    if let Some(first) = bad.first() {
        eprintln!("first violation: {first}");
    }
    verdict(6, "accretion diameter bound", bad.is_empty(), &format!("{ACCRETIONS} instances, {} violations", bad.len()));
}

/// Least cardinality then lexicographically least admissible set, by ordered
/// enumeration of index combinations.
fn whitney_min_oracle(p: &[u8]) -> Option<Vec<usize>> {
    fn admissible(p: &[u8], k: &[usize]) -> bool {
        let m = p.len() - 1;
        p[k[0]] == p[0]
            && p[k[k.len() - 1]] == p[m]
            && k.windows(2).all(|w| w[1] == w[0] + 1 || p[w[0]] == p[w[1]])
    }
    fn go(p: &[u8], size: usize, cur: &mut Vec<usize>) -> bool {
        if cur.len() == size {
            return admissible(p, cur);
        }
        let from = cur.last().map_or(0, |&i| i + 1);
        for j in from..p.len() {
            let fits = match cur.last() {
                Some(&i) => j == i + 1 || p[i] == p[j],
                None => p[j] == p[0],
            };
            if fits {
                cur.push(j);
                if go(p, size, cur) {
                    return true;
                }
                cur.pop();
            }
        }
        false
    }
    (1..=p.len()).find_map(|size| {
        let mut cur = Vec::with_capacity(size);
        go(p, size, &mut cur).then_some(cur)
    })
}

/// Every sequence of `n` values up to relabelling, with at most `classes` distinct values.
fn equality_patterns(n: usize, classes: u8, f: &mut dyn FnMut(&[u8])) {
    fn go(cur: &mut Vec<u8>, n: usize, top: u8, classes: u8, f: &mut dyn FnMut(&[u8])) {
        if cur.len() == n {
            f(cur);
            return;
        }
        for v in 0..=top.min(classes - 1) {
            cur.push(v);
            go(cur, n, top.max(v + 1), classes, f);
            cur.pop();
        }
    }
    go(&mut Vec::with_capacity(n), n, 0, classes, f);
}

#[test]
fn c07_arc_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = Vec::new();
    let mut done = 0;
    let mut skipped = 0;
    while done < ARCS {
        let level = rng.gen_range(2..=3);
        let x_set = random_shape(&mut rng, level, 0.6);
        let (x, y) = (random_point(&mut rng, &x_set), random_point(&mut rng, &x_set));
        let n = rng.gen_range(2..=4);
        if x == y {
            continue;
        }
        let arc = match extract_arc(&x_set, &x, &y, n) {
            Ok(a) => a,
            Err(Error::SameEndpoints) => {
                skipped += 1;
                continue;
            }
            Err(e) => {
                bad.push(format!("extract_arc: {e}"));
                done += 1;
                continue;
            }
        };
        done += 1;
        let tower: CurveTower = build_tower(&x_set, n).unwrap();
        let samples = anchor(&tower, &x, &y).unwrap().grid_points().unwrap();
        let k = minimal_admissible(&samples).unwrap();
        let eb = tower.error_bound();
        let pts = arc.points();
        let distinct: BTreeSet<&Point> = pts.iter().collect();
        if distinct.len() != pts.len() {
            bad.push("repeated point".into());
        }
        if pts[0].dist(&x) > eb || pts[pts.len() - 1].dist(&y) > eb {
            bad.push(format!("endpoints {} {} for {x} {y}", pts[0], pts[pts.len() - 1]));
        }
        if pts.iter().any(|p| !x_set.contains_point(p)) {
            bad.push("point outside X".into());
        }
        if !gap_property(&samples, &k) || !is_admissible(&samples, &k) {
            bad.push(format!("returned set {:?}", k.indices()));
        }
    }
    let mut patterns = 0u64;
    for m in 1..=MAX_PATTERN_M {
        equality_patterns(m + 1, GRID_POINTS, &mut |p| {
            patterns += 1;
            let got = minimal_admissible(p);
            if p[0] == p[m] {
                if got != Err(Error::SameEndpoints) {
                    bad.push(format!("{p:?}: expected coinciding endpoints"));
                }
                return;
            }
            let want = whitney_min_oracle(p).expect("full index set is admissible");
            match got {
                Ok(k) if k.indices() == want.as_slice() && gap_property(p, &k) => {}
                other => bad.push(format!("{p:?}: got {other:?}, oracle {want:?}")),
            }
        });
    }
    if let Some(first) = bad.first() {
        eprintln!("first violation: {first}");
    }
    let detail = format!(
        "{ARCS} arcs ({skipped} draws with coinciding approximants redrawn), {patterns} equality patterns with M <= {MAX_PATTERN_M}, {} violations",
        bad.len()
    );
    verdict(7, "arc correctness", bad.is_empty(), &detail);
}

#[test]
fn c08_whitney_monotonicity() {
    let mut bad = 0;
    let mut pairs = 0u64;
    for m in 0..=WHITNEY_MAX_M {
        let sets: Vec<(u32, IndexSet)> = (1u32..1 << (m + 1))
            .map(|mask| (mask, IndexSet::new((0..=m).filter(|i| mask >> i & 1 == 1).collect()).unwrap()))
            .collect();
        for (a, k) in &sets {
            for (b, l) in &sets {
                if a != b && a & b == *a {
                    pairs += 1;
                    if whitney::<Rational>(k, m) >= whitney::<Rational>(l, m) {
                        bad += 1;
                    }
                }
            }
        }
    }
    verdict(8, "whitney monotonicity", bad == 0, &format!("{pairs} strict inclusions, {bad} violations"));
}

fn all_inputs(bits: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << bits).map(move |v| (0..bits).map(|i| v >> (bits - 1 - i) & 1 == 1).collect())
}

/// Leaf scan, onto check and continuity modulus for one target set.
fn cantor_violations(k: &DyadicCompactum, inputs: &[Vec<bool>]) -> Vec<String> {
    let r = k.level();
    let tree = code(k);
    let mut out = tree.violations();
    for (_, cell) in tree.leaves() {
        if !k.contains_cell(cell.coords()) {
            out.push(format!("leaf cell {:?} outside K", cell.coords()));
        }
    }
    let mut hit = BTreeSet::new();
    let images: Vec<Vec<u32>> = inputs.iter().map(|b| tree.reindex(b).unwrap().coords().to_vec()).collect();
    hit.extend(images.iter().cloned());
    if hit.len() != k.len() || tree.witnesses().len() != k.len() {
        out.push(format!("{} of {} cells reached", hit.len(), k.len()));
    }
    for kk in 1..=r {
        let block = 1usize << (inputs[0].len() - 4 * kk as usize);
        for (w, chunk) in images.chunks(block).enumerate() {
            let head = &chunk[0];
            let direct = phi_cell(&inputs[w * block], 2, r).unwrap();
            for (i, c) in chunk.iter().enumerate() {
                let p = phi_cell(&inputs[w * block + i], 2, r).unwrap();
                for j in 0..2 {
                    if c[j] >> (r - kk) != head[j] >> (r - kk) || p.coords()[j] >> (r - kk) != direct.coords()[j] >> (r - kk) {
                        out.push(format!("modulus fails at k = {kk}"));
                    }
                }
            }
        }
    }
    out
}

#[test]
fn c09_cantor_coding() {
    let mut bad = Vec::new();
    let mut sets = 0u64;
    for r in 1..=CANTOR_EXHAUSTIVE_R {
        let side = 1u32 << r;
        let inputs: Vec<Vec<bool>> = all_inputs(4 * r as usize).collect();
        let cells: Vec<[u32; 2]> = (0..side).flat_map(|i| (0..side).map(move |j| [i, j])).collect();
        for mask in 1u64..1 << cells.len() {
            let pick = cells.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, c)| *c);
            let k = DyadicCompactum::new(2, r, pick).unwrap();
            sets += 1;
            bad.extend(cantor_violations(&k, &inputs));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let r = CANTOR_TOP_R;
    let inputs: Vec<Vec<bool>> = all_inputs(4 * r as usize).collect();
    for _ in 0..CANTOR_RANDOM_SETS {
        let density = rng.gen_range(0.02..0.9);
        let side = 1u32 << r;
        let mut cells: Vec<[u32; 2]> =
            (0..side).flat_map(|i| (0..side).map(move |j| [i, j])).filter(|_| rng.gen_bool(density)).collect();
        if cells.is_empty() {
            cells.push([rng.gen_range(0..side), rng.gen_range(0..side)]);
        }
        sets += 1;
        bad.extend(cantor_violations(&DyadicCompactum::new(2, r, cells).unwrap(), &inputs));
    }
    if let Some(first) = bad.first() {
        eprintln!("first violation: {first}");
    }
    let detail = format!(
        "{sets} target sets (all for r <= {CANTOR_EXHAUSTIVE_R}, {CANTOR_RANDOM_SETS} random at r = {CANTOR_TOP_R}), {} violations",
        bad.len()
    );
    verdict(9, "cantor coding", bad.is_empty(), &detail);
}

fn corner_args(x: &DyadicCompactum) -> (String, String) {
    let fmt = |p: &Point| p.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
    let last = x.cells().last().unwrap();
    let top = Point::new(last.iter().map(|&c| Dyadic::new(c as i64 + 1, x.level())).collect()).unwrap();
    (fmt(&x.canonical_point()), fmt(&top))
}

/// Exit status, stdout, stderr and the written file of one run.
fn run_cli(args: &[&str], dir: &Path) -> (Option<i32>, Vec<u8>, Vec<u8>, Option<Vec<u8>>) {
    let out_path = dir.join("out");
    let _ = std::fs::remove_file(&out_path);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_peanokit"));
    cmd.args(args).arg("--out").arg(&out_path);
    let o = cmd.output().expect("run peanokit");
    (o.status.code(), o.stdout, o.stderr, std::fs::read(&out_path).ok())
}

#[test]
fn c10_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = 0;
    let mut bad = Vec::new();
    for path in fixture_files() {
        let input = path.to_str().unwrap().to_string();
        let x = parse_shape(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let (xs, ys) = corner_args(&x);
        let base = ["--input", input.as_str(), "--level", CLI_LEVEL];
        let jobs: Vec<Vec<&str>> = vec![
            vec!["curve", "--format", "json"],
            vec!["curve", "--format", "csv"],
            vec!["curve", "--format", "svg"],
            vec!["arc", "--format", "json", "--x", &xs, "--y", &ys],
            vec!["arc", "--format", "csv", "--x", &xs, "--y", &ys],
            vec!["cantor"],
            vec!["validate"],
        ];
        for job in jobs {
            let mut args = vec![job[0]];
            args.extend_from_slice(&base);
            args.extend_from_slice(&job[1..]);
            if job[0] == "cantor" {
                args.truncate(args.len() - 2);
            }
            let first = run_cli(&args, dir.path());
            let second = run_cli(&args, dir.path());
            runs += 2;
            if first != second {
                bad.push(args.join(" "));
            }
        }
    }
    if let Some(first) = bad.first() {
        eprintln!("differs: {first}");
    }
    verdict(10, "cli determinism", bad.is_empty(), &format!("{runs} runs, {} mismatched pairs", bad.len()));
}
