//! CSV and SVG output.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use ph3_core::Rational;
use serde::Serialize;

/// Opens `path` for writing, or stdout when absent.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(File::create(p).with_context(|| format!("cannot write {}", p.display()))?)
        }
        None => Box::new(io::stdout()),
    })
}

pub fn write_csv<T: Serialize>(path: Option<&Path>, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink(path)?);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Exact `p/q` and the 4-decimal round-up, for paired CSV columns.
pub fn ratio_columns(r: &Rational) -> (String, String) {
    (r.to_string(), r.to_decimal_ceil(4))
}

/// A line plot with axes and tick labels; a second dashed series is optional.
pub fn line_svg(title: &str, points: &[(f64, f64)], overlay: Option<&[(f64, f64)]>) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;
    let xs = points.iter().map(|p| p.0);
    let ys = points.iter().chain(overlay.unwrap_or(&[])).map(|p| p.1);
    let (x0, x1) = bounds(xs);
    let (y0, y1) = bounds(ys);
    let sx = |x: f64| M + (x - x0) / (x1 - x0).max(f64::EPSILON) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0).max(f64::EPSILON) * (H - 2.0 * M);
    let path = |pts: &[(f64, f64)]| {
        pts.iter()
            .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\">\n\
         <text x=\"{M}\" y=\"25\" font-size=\"14\">{title}</text>\n\
         <line x1=\"{M}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{b}\" stroke=\"black\"/>\n",
        b = H - M,
        r = W - M,
    );
    svg.push_str(&format!(
        "<text x=\"{M}\" y=\"{}\" font-size=\"11\">{x0}</text>\n\
         <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{x1}</text>\n\
         <text x=\"5\" y=\"{}\" font-size=\"11\">{y0:.4}</text>\n\
         <text x=\"5\" y=\"{}\" font-size=\"11\">{y1:.4}</text>\n",
        H - M + 15.0,
        W - M,
        H - M + 15.0,
        H - M,
        M + 4.0,
    ));
    svg.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>\n",
        path(points)
    ));
    if let Some(extra) = overlay {
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 3\" points=\"{}\"/>\n",
            path(extra)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}
