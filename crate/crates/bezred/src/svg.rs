//! Static SVG rendering of a planar curve pair with control polygons.

use crate::bernstein::BezierCurve;
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

const SAMPLES: usize = 500;

/// Render the input curve (solid), the reduced curve (dashed) and both
/// control polygons (thin, with circle markers) into an SVG file. Both
/// curves must be planar.
pub fn emit_svg(p: &BezierCurve, r: &BezierCurve, path: &Path) -> Result<()> {
    let doc = render(p, r)?;
    std::fs::write(path, doc)?;
    Ok(())
}

pub fn render(p: &BezierCurve, r: &BezierCurve) -> Result<String> {
    if p.dimension() != 2 || r.dimension() != 2 {
        return Err(Error::domain(format!(
            "SVG output needs planar curves, got dimensions {} and {}",
            p.dimension(),
            r.dimension()
        )));
    }

    // bounds over all control points of both curves (the curves lie in the
    // convex hulls), with a 5% margin on each side
    let all = p.points().iter().chain(r.points());
    let (mut x0, mut y0, mut x1, mut y1) =
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for pt in all {
        x0 = x0.min(pt[0]);
        y0 = y0.min(pt[1]);
        x1 = x1.max(pt[0]);
        y1 = y1.max(pt[1]);
    }
    let margin_x = 0.05 * (x1 - x0).max(1e-9);
    let margin_y = 0.05 * (y1 - y0).max(1e-9);
    x0 -= margin_x;
    x1 += margin_x;
    y0 -= margin_y;
    y1 += margin_y;
    let (w, h) = (x1 - x0, y1 - y0);
    // SVG y axis points down; flip so the plot reads like standard axes
    let fy = move |y: f64| y1 - (y - y0);

    let polyline = |c: &BezierCurve| {
        let mut s = String::new();
        for g in 0..=SAMPLES {
            let t = g as f64 / SAMPLES as f64;
            let pt = c.eval(t);
            let _ = write!(s, "{},{} ", pt[0], fy(pt[1]));
        }
        s.trim_end().to_string()
    };
    let polygon = |c: &BezierCurve| {
        let mut s = String::new();
        for pt in c.points() {
            let _ = write!(s, "{},{} ", pt[0], fy(pt[1]));
        }
        s.trim_end().to_string()
    };

    let stroke = 0.004 * w.max(h);
    let marker = 1.5 * stroke;
    let mut doc = String::new();
    let _ = writeln!(
        doc,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x0} {y0} {w} {h}\">"
    );
    let _ = writeln!(
        doc,
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#888\" stroke-width=\"{}\"/>",
        polygon(p),
        stroke * 0.5
    );
    let _ = writeln!(
        doc,
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#c88\" stroke-width=\"{}\"/>",
        polygon(r),
        stroke * 0.5
    );
    for pt in p.points() {
        let _ = writeln!(
            doc,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{marker}\" fill=\"#888\"/>",
            pt[0],
            fy(pt[1])
        );
    }
    for pt in r.points() {
        let _ = writeln!(
            doc,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{marker}\" fill=\"#c88\"/>",
            pt[0],
            fy(pt[1])
        );
    }
    let _ = writeln!(
        doc,
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#004\" stroke-width=\"{stroke}\"/>",
        polyline(p)
    );
    let _ = writeln!(
        doc,
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#c00\" stroke-width=\"{stroke}\" \
         stroke-dasharray=\"{},{}\"/>",
        polyline(r),
        3.0 * stroke,
        2.0 * stroke
    );
    let _ = writeln!(doc, "</svg>");
    Ok(doc)
}
