use std::fmt::Write;

use crate::laplace::Embedding;
use crate::map::MatedCrtGraph;
use crate::stats::LinearFit;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Drawing of an embedded map: one `<line>` per edge record (parallel edges
/// coincide), one `<circle>` per vertex, and the pinned polygon outlined.
pub fn embedding_svg(graph: &MatedCrtGraph, embedding: &Embedding) -> String {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in &embedding.coords {
        for k in 0..2 {
            lo[k] = lo[k].min(c[k]);
            hi[k] = hi[k].max(c[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let pad = 0.05 * span;
    let size = span + 2.0 * pad;
    let px = |c: [f64; 2]| (c[0] - lo[0] + pad, hi[1] - c[1] + pad);
    let stroke = span / 800.0;
    let radius = span / 400.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" width="800" height="800">"#
    );
    let points: Vec<String> = embedding
        .pinned_positions
        .iter()
        .map(|&c| {
            let (x, y) = px(c);
            format!("{x},{y}")
        })
        .collect();
    let _ = writeln!(
        s,
        r##"<polygon class="boundary" points="{}" fill="#f4f4f4" stroke="#c00" stroke-width="{}"/>"##,
        points.join(" "),
        3.0 * stroke
    );
    let _ = writeln!(s, r#"<g class="edges" stroke-width="{stroke}">"#);
    for e in graph.edges() {
        let (x1, y1) = px(embedding.coords[e.u]);
        let (x2, y2) = px(embedding.coords[e.v]);
        let color = match e.side {
            crate::map::Side::L => "#1f5fa8",
            crate::map::Side::R => "#2a8a3a",
        };
        let _ = writeln!(
            s,
            r#"<line class="{}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{color}"/>"#,
            e.side.as_str()
        );
    }
    s.push_str("</g>\n<g class=\"vertices\" fill=\"#222\">\n");
    for &c in &embedding.coords {
        let (x, y) = px(c);
        let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="{radius}"/>"#);
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// Log-log scatter of `(x, y)` with an optional fitted line in log space.
pub fn loglog_svg(x: &[f64], y: &[f64], fit: Option<&LinearFit>, x_label: &str, y_label: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const M: f64 = 60.0;
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let bounds = |f: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() && hi > lo {
            (lo, hi)
        } else if lo.is_finite() {
            (lo - 1.0, lo + 1.0)
        } else {
            (0.0, 1.0)
        }
    };
    let (x0, x1) = bounds(|p| p.0);
    let (y0, y1) = bounds(|p| p.1);
    let sx = |u: f64| M + (u - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |v: f64| H - M - (v - y0) / (y1 - y0) * (H - 2.0 * M);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        W - 2.0 * M,
        H - 2.0 * M
    );
    for &(u, v) in &pts {
        let _ = writeln!(s, r##"<circle cx="{}" cy="{}" r="3" fill="#1f5fa8"/>"##, sx(u), sy(v));
    }
    if let Some(f) = fit {
        let _ = writeln!(
            s,
            r##"<line class="fit" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#c00"/>"##,
            sx(x0),
            sy(f.intercept + f.slope * x0),
            sx(x1),
            sy(f.intercept + f.slope * x1)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">slope {:.4} [{:.4}, {:.4}]</text>"#,
            M + 8.0,
            M + 16.0,
            f.slope,
            f.slope_ci[0],
            f.slope_ci[1]
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">log {}</text>"#,
        W / 2.0,
        H - 20.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" transform="rotate(-90 20 {})" text-anchor="middle">log {}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    s.push_str("</svg>\n");
    s
}
