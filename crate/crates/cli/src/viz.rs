//! CSV and SVG renderings of planar directed sets.

use std::fmt::Write;

use dirsub_core::geometry::circle_angle;
use dirsub_core::json::fmt_sig17;
use dirsub_core::{DirectedSet, Error, GridSpec};

const SIZE: f64 = 800.0;
const CENTER: f64 = SIZE / 2.0;
/// Radius of the zero level.
const BASE: f64 = 200.0;
/// Radial distance representing the largest absolute value.
const SPAN: f64 = 160.0;

struct Row {
    angle: f64,
    support: f64,
    lo: f64,
    hi: f64,
}

fn rows(value: &DirectedSet) -> Result<Vec<Row>, Error> {
    let k = match value.grid_spec() {
        GridSpec::Circle { k } => k,
        other => return Err(Error::DimensionMismatch { expected: 2, found: other.dim() }),
    };
    value
        .entries()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let d = e.lower.as_interval().ok_or_else(|| Error::Malformed("lower part is not an interval".into()))?;
            Ok(Row { angle: circle_angle(i, k), support: e.support, lo: d.lo(), hi: d.hi() })
        })
        .collect()
}

/// One row per grid direction: `angle` in radians, the support value, and
/// the endpoints `[lower_neg, lower_pos]` of the directed interval (so an
/// inverted interval has `lower_neg > lower_pos`).
pub fn csv(value: &DirectedSet) -> Result<String, Error> {
    let mut out = String::from("angle,support,lower_neg,lower_pos\n");
    for r in rows(value)? {
        let _ = writeln!(out, "{},{},{},{}", fmt_sig17(r.angle), fmt_sig17(r.support), fmt_sig17(r.lo), fmt_sig17(r.hi));
    }
    Ok(out)
}

fn point(angle: f64, v: f64, scale: f64) -> (f64, f64) {
    let r = BASE + v * scale;
    (CENTER + r * angle.cos(), CENTER - r * angle.sin())
}

/// Polar plot: the support curve, the interval of every direction as a
/// radial segment (red when inverted), and a dashed circle at zero.
pub fn svg(value: &DirectedSet) -> Result<String, Error> {
    let rows = rows(value)?;
    let largest = rows.iter().map(|r| r.support.abs().max(r.lo.abs()).max(r.hi.abs())).fold(0.0, f64::max);
    let scale = if largest > 0.0 { SPAN / largest } else { 0.0 };

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 800" width="800" height="800">"#);
    let _ = writeln!(out, r##"<rect width="800" height="800" fill="#ffffff"/>"##);
    let _ = writeln!(
        out,
        r##"<circle cx="{CENTER:.3}" cy="{CENTER:.3}" r="{BASE:.3}" fill="none" stroke="#999999" stroke-dasharray="4 4"/>"##
    );
    let _ = writeln!(out, r#"<g stroke-width="1.5">"#);
    for r in &rows {
        let (x1, y1) = point(r.angle, r.lo, scale);
        let (x2, y2) = point(r.angle, r.hi, scale);
        let colour = if r.lo > r.hi { "#cc3311" } else { "#4477aa" };
        let _ = writeln!(out, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{colour}"/>"#);
    }
    let _ = writeln!(out, "</g>");
    let mut points: Vec<String> = rows
        .iter()
        .map(|r| {
            let (x, y) = point(r.angle, r.support, scale);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    if let Some(first) = points.first().cloned() {
        points.push(first);
    }
    let _ = writeln!(out, r##"<polyline points="{}" fill="none" stroke="#222222" stroke-width="2"/>"##, points.join(" "));
    let _ = writeln!(
        out,
        r##"<text x="16" y="28" font-family="monospace" font-size="14" fill="#222222">support (black), interval (blue; red if inverted), zero level dashed; max |value| {}</text>"##,
        fmt_sig17(largest)
    );
    out.push_str("</svg>\n");
    Ok(out)
}
