//! SVG 1.1 plots of lattice walks.

use std::fmt::Write;

use sawtree_core::LatticePoint;

#[derive(Clone, Debug)]
pub struct SvgStyle {
    /// Pixels per lattice unit.
    pub scale: u32,
    pub margin: u32,
    pub grid: bool,
    /// Draw the line `y = 0`.
    pub axis: bool,
    pub stroke: String,
    pub stroke_width: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { scale: 6, margin: 2, grid: true, axis: true, stroke: "#1f3a93".into(), stroke_width: 1.5 }
    }
}

/// Renders `points` as one polyline, with an optional lattice grid, the
/// line `y = 0` and a marker at the first point.
pub fn render_svg(points: &[LatticePoint], style: &SvgStyle) -> String {
    let first = points.first().copied().unwrap_or(LatticePoint::ORIGIN);
    let (mut x0, mut x1, mut y0, mut y1) = (first.x, first.x, first.y, first.y);
    for p in points {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let m = style.margin as i64;
    let s = style.scale as i64;
    let (x0, x1, y0, y1) = (x0 as i64 - m, x1 as i64 + m, y0 as i64 - m, y1 as i64 + m);
    let w = (x1 - x0) * s;
    let h = (y1 - y0) * s;
    let px = |x: i32| (x as i64 - x0) * s;
    let py = |y: i32| (y1 - y as i64) * s;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    out.push_str("<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if style.grid {
        out.push_str("<g stroke=\"#e4e4e4\" stroke-width=\"0.5\">\n");
        for x in x0..=x1 {
            let _ = writeln!(out, "<line x1=\"{0}\" y1=\"0\" x2=\"{0}\" y2=\"{h}\"/>", (x - x0) * s);
        }
        for y in y0..=y1 {
            let _ = writeln!(out, "<line x1=\"0\" y1=\"{0}\" x2=\"{w}\" y2=\"{0}\"/>", (y1 - y) * s);
        }
        out.push_str("</g>\n");
    }
    if style.axis && y0 <= 0 && 0 <= y1 {
        let _ = writeln!(out, "<line x1=\"0\" y1=\"{0}\" x2=\"{w}\" y2=\"{0}\" stroke=\"#b03030\" stroke-width=\"1\"/>", py(0));
    }
    out.push_str("<polyline fill=\"none\" stroke=\"");
    out.push_str(&style.stroke);
    let _ = write!(out, "\" stroke-width=\"{}\" stroke-linejoin=\"round\" points=\"", style.stroke_width);
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{},{}", px(p.x), py(p.y));
    }
    out.push_str("\"/>\n");
    let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#b03030\"/>", px(first.x), py(first.y), (s as f64 * 0.6).max(1.5));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyline_has_every_point() {
        let pts: Vec<_> = (0..5).map(|i| LatticePoint::new(i, i % 2)).collect();
        let svg = render_svg(&pts, &SvgStyle::default());
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let poly = doc.descendants().find(|n| n.has_tag_name("polyline")).unwrap();
        assert_eq!(poly.attribute("points").unwrap().split(' ').count(), 5);
        assert_eq!(doc.root_element().attribute("version"), Some("1.1"));
    }

    #[test]
    fn empty_walk() {
        let svg = render_svg(&[], &SvgStyle { grid: false, ..Default::default() });
        assert!(roxmltree::Document::parse(&svg).is_ok());
    }
}
