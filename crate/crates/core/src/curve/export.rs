use std::fmt::Write;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::Point;

fn header(prefix: Option<&str>, d: usize) -> String {
    let coords = (1..=d).map(|j| format!("p{j}"));
    prefix.map(str::to_string).into_iter().chain(coords).collect::<Vec<_>>().join(",")
}

fn row(out: &mut String, t: Option<&Dyadic>, p: &Point) {
    let cols = t.into_iter().chain(p.coords()).map(Dyadic::to_decimal);
    out.push_str(&cols.collect::<Vec<_>>().join(","));
    out.push('\n');
}

/// CSV rows `t, p1, …, pd` with exact decimal values.
pub fn samples_csv(samples: &[(Dyadic, Point)]) -> String {
    let d = samples.first().map_or(0, |(_, p)| p.dim());
    let mut out = header(Some("t"), d);
    out.push('\n');
    for (t, p) in samples {
        row(&mut out, Some(t), p);
    }
    out
}

/// CSV rows `p1, …, pd`.
pub fn points_csv(points: &[Point]) -> String {
    let d = points.first().map_or(0, Point::dim);
    let mut out = header(None, d);
    out.push('\n');
    for p in points {
        row(&mut out, None, p);
    }
    out
}

const SIZE: f64 = 512.0;

/// SVG polyline through planar points, unit square scaled to 512 px with `y` pointing up.
pub fn polyline_svg(points: &[Point]) -> Result<String> {
    if let Some(p) = points.iter().find(|p| p.dim() != 2) {
        return Err(Error::DimensionMismatch(2, p.dim()));
    }
    let mut path = String::new();
    for (i, p) in points.iter().enumerate() {
        let [x, y]: [f64; 2] = p.to_float().try_into().expect("planar point");
        if i > 0 {
            path.push(' ');
        }
        write!(path, "{:.3},{:.3}", x * SIZE, (1.0 - y) * SIZE).expect("write to string");
    }
    Ok(format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {s} {s}\" width=\"{s}\" height=\"{s}\">\n",
            "<rect width=\"{s}\" height=\"{s}\" fill=\"white\"/>\n",
            "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"{p}\"/>\n",
            "</svg>\n"
        ),
        s = SIZE,
        p = path
    ))
}
