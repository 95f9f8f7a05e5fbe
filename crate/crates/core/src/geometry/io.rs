//! Shape ingestion: JSON cell lists and ASCII grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::compactum::DyadicCompactum;

#[derive(Serialize, Deserialize)]
struct ShapeJson {
    dim: usize,
    level: u32,
    cells: Vec<Vec<u32>>,
}

impl Serialize for DyadicCompactum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ShapeJson { dim: self.dim(), level: self.level(), cells: self.cells().collect() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DyadicCompactum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = ShapeJson::deserialize(deserializer)?;
        DyadicCompactum::new(s.dim, s.level, s.cells).map_err(serde::de::Error::custom)
    }
}

/// Parses a 2-D ASCII grid: `#` is a cell, `.` is empty, row 0 is the top row.
///
/// The level is the smallest `r` with `2^r` at least the grid's width and height;
/// the bottom row sits at `y = 0` and the first column at `x = 0`.
pub fn parse_ascii(text: &str) -> Result<DyadicCompactum> {
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty())
        .collect();
    if rows.is_empty() {
        return Err(Error::Parse("empty grid".into()));
    }
    let width = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
    let height = rows.len();
    let size = width.max(height);
    let level = size.next_power_of_two().trailing_zeros();
    let mut cells = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let y = (height - 1 - i) as u32;
        for (x, ch) in row.chars().enumerate() {
            match ch {
                '#' => cells.push([x as u32, y]),
                '.' | ' ' => {}
                other => return Err(Error::Parse(format!("unexpected character {other:?} in grid"))),
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::Parse("grid has no cells".into()));
    }
    DyadicCompactum::new(2, level, cells)
}

/// Renders a 2-D compactum in the ASCII grid format, `2^level` rows and columns.
pub fn to_ascii(k: &DyadicCompactum) -> Result<String> {
    if k.dim() != 2 {
        return Err(Error::DimensionMismatch(2, k.dim()));
    }
    let n = 1u32 << k.level();
    let mut out = String::new();
    for y in (0..n).rev() {
        for x in 0..n {
            out.push(if k.contains_cell(&[x, y]) { '#' } else { '.' });
        }
        out.push('\n');
    }
    Ok(out)
}

/// Reads either format: JSON when the text starts with `{`, ASCII grid otherwise.
pub fn parse_shape(text: &str) -> Result<DyadicCompactum> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    } else {
        parse_ascii(text)
    }
}
