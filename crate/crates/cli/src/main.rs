//! `peanokit` command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use peanokit::arc::arc_in_tower;
use peanokit::cantor::code;
use peanokit::chains::CoverMode;
use peanokit::curve::{build_tower_with, export};
use peanokit::geometry::io::parse_shape;
use peanokit::validate::{validate, ValidateOptions};
use peanokit::{CurveTower, DyadicCompactum, Point};

#[derive(Parser)]
#[command(name = "peanokit", version, about = "Space-filling curves, arcs and Cantor codings of cubical sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a curve tower and write it with samples of the limit curve.
    Curve(Job),
    /// Extract an arc from --x to --y.
    Arc(Job),
    /// Write the prefix tree coding the input.
    Cantor(Job),
    /// Run the invariant suite and report each check.
    Validate(Job),
}

#[derive(Args, Clone)]
struct Job {
    /// Shape file: ASCII grid or JSON {"dim", "level", "cells"}.
    #[arg(long)]
    input: PathBuf,
    /// Expected dimension of the input.
    #[arg(long)]
    dim: Option<usize>,
    /// Tower depth N; for `cantor`, the grid level to code at.
    #[arg(long)]
    level: Option<u32>,
    /// Start point, comma-separated dyadic rationals such as `1/2^3,0`.
    #[arg(long)]
    x: Option<String>,
    /// End point.
    #[arg(long)]
    y: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, value_enum, default_value_t = Cover::Direct)]
    cover: Cover,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Cover {
    Direct,
    Peano,
}

impl From<Cover> for CoverMode {
    fn from(c: Cover) -> Self {
        match c {
            Cover::Direct => CoverMode::Direct,
            Cover::Peano => CoverMode::Peano,
        }
    }
}

const DEFAULT_LEVEL: u32 = 4;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Core(#[from] peanokit::Error),
    #[error("{0} check(s) failed")]
    Failed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use peanokit::Error as E;
        match self {
            CliError::Usage(_) | CliError::Read { .. } => 2,
            CliError::Core(E::Parse(_) | E::InvalidCell(_) | E::Empty) => 2,
            CliError::Core(E::Disconnected(_)) => 3,
            CliError::Core(E::SameEndpoints) => 4,
            CliError::Core(E::PointOutside) => 5,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read_shape(job: &Job) -> Result<DyadicCompactum> {
    let text = fs::read_to_string(&job.input).map_err(|source| CliError::Read { path: job.input.clone(), source })?;
    let x = parse_shape(&text)?;
    if let Some(d) = job.dim {
        if d != x.dim() {
            return Err(CliError::Usage(format!("--dim {d} but the input has dimension {}", x.dim())));
        }
    }
    Ok(x)
}

fn level(job: &Job) -> Result<u32> {
    match job.level.unwrap_or(DEFAULT_LEVEL) {
        0 => Err(CliError::Usage("--level must be at least 1".into())),
        n => Ok(n),
    }
}

fn point(flag: &str, s: &Option<String>, d: usize) -> Result<Option<Point>> {
    let Some(s) = s else { return Ok(None) };
    let p = Point::parse(s).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))?;
    if p.dim() != d {
        return Err(CliError::Usage(format!("--{flag} has dimension {}, the input has {d}", p.dim())));
    }
    Ok(Some(p))
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body).map_err(|source| CliError::Write { path: path.clone(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|source| CliError::Write { path: PathBuf::from("-"), source })
        }
    }
}

/// Messages go to stdout when the artifact goes to a file, to stderr otherwise.
fn note(job: &Job, msg: &str) {
    if job.out.is_some() {
        println!("{msg}");
    } else {
        eprintln!("{msg}");
    }
}

fn json_line(v: &Value) -> String {
    let mut s = v.to_string();
    s.push('\n');
    s
}

/// SVG only exists for planar data; other dimensions fall back to CSV.
fn planar_or_csv(job: &Job, d: usize) -> Format {
    if job.format == Format::Svg && d != 2 {
        note(job, &format!("svg needs d = 2, writing csv for d = {d}"));
        return Format::Csv;
    }
    job.format
}

fn curve(job: &Job) -> Result<()> {
    let x = read_shape(job)?;
    let n = level(job)?;
    let tower: CurveTower = build_tower_with(&x, n, job.cover.into())?;
    let samples = tower.samples(n + 2)?;
    let body = match planar_or_csv(job, x.dim()) {
        Format::Json => {
            let mut v = serde_json::to_value(&tower).map_err(|e| CliError::Usage(e.to_string()))?;
            let rows: Vec<Value> = samples.iter().map(|(t, p)| json!({ "t": t, "point": p })).collect();
            v["samples"] = Value::Array(rows);
            json_line(&v)
        }
        Format::Csv => export::samples_csv(&samples),
        Format::Svg => export::polyline_svg(&samples.into_iter().map(|(_, p)| p).collect::<Vec<_>>())?,
    };
    emit(&job.out, &body)?;
    let lens: Vec<String> = tower.levels().iter().map(|l| l.chain.len().to_string()).collect();
    note(job, &format!("levels {n}, chain lengths {}", lens.join(" ")));
    Ok(())
}

fn arc(job: &Job) -> Result<()> {
    let x = read_shape(job)?;
    let n = level(job)?;
    let (Some(a), Some(b)) = (point("x", &job.x, x.dim())?, point("y", &job.y, x.dim())?) else {
        return Err(CliError::Usage("arc needs --x and --y".into()));
    };
    let comps = x.components().len();
    if comps > 1 {
        return Err(peanokit::Error::Disconnected(comps).into());
    }
    if a == b {
        return Err(peanokit::Error::SameEndpoints.into());
    }
    if !x.contains_point(&a) || !x.contains_point(&b) {
        return Err(peanokit::Error::PointOutside.into());
    }
    let tower: CurveTower = build_tower_with(&x, n, job.cover.into())?;
    let path = arc_in_tower(&tower, &a, &b)?;
    let body = match planar_or_csv(job, x.dim()) {
        Format::Json => json_line(&json!({ "points": path.points() })),
        Format::Csv => export::points_csv(path.points()),
        Format::Svg => export::polyline_svg(path.points())?,
    };
    emit(&job.out, &body)?;
    note(job, &format!("arc with {} points", path.points().len()));
    Ok(())
}

fn cantor(job: &Job) -> Result<()> {
    let mut x = read_shape(job)?;
    if job.format != Format::Json {
        return Err(CliError::Usage("cantor writes json only".into()));
    }
    if let Some(r) = job.level {
        x = x.subdivide(r)?;
    }
    let tree = code(&x);
    let body = json_line(&serde_json::to_value(&tree).map_err(|e| CliError::Usage(e.to_string()))?);
    emit(&job.out, &body)?;
    note(job, &format!("leaves {}", tree.leaf_count()));
    note(job, &format!("depth {}", tree.depth()));
    Ok(())
}

fn run_validate(job: &Job) -> Result<()> {
    let x = read_shape(job)?;
    let endpoints = match (point("x", &job.x, x.dim())?, point("y", &job.y, x.dim())?) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        _ => return Err(CliError::Usage("give both --x and --y or neither".into())),
    };
    let opts = ValidateOptions { level: level(job)?, endpoints, mode: job.cover.into(), ..Default::default() };
    let report = validate(&x, &opts)?;
    for r in &report {
        println!("{r}");
    }
    if job.out.is_some() {
        let rows: Vec<Value> =
            report.iter().map(|r| json!({ "name": r.name, "passed": r.passed, "detail": r.detail })).collect();
        emit(&job.out, &json_line(&Value::Array(rows)))?;
    }
    match report.iter().filter(|r| !r.passed).count() {
        0 => Ok(()),
        k => Err(CliError::Failed(k)),
    }
}

fn input_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (job, result) = match &cli.command {
        Command::Curve(j) => (j, curve(j)),
        Command::Arc(j) => (j, arc(j)),
        Command::Cantor(j) => (j, cantor(j)),
        Command::Validate(j) => (j, run_validate(j)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("peanokit: {}: {e}", input_name(&job.input));
            ExitCode::from(e.exit_code())
        }
    }
}
