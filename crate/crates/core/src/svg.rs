//! Static SVG scatter of an interest map: marker area tracks document
//! frequency, fill colour tracks cluster id.

use std::fmt::Write as _;

use crate::analytics::InterestMap;

/// Categorical palette, cycled when there are more clusters than colours.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgStyle {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    /// Radius given to the most frequent feature.
    pub max_radius: f64,
    /// How many of the most frequent features get a text label.
    pub labelled: usize,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            width: 960.0,
            height: 720.0,
            margin: 40.0,
            max_radius: 18.0,
            labelled: 40,
        }
    }
}

pub fn cluster_colour(cluster: usize) -> &'static str {
    PALETTE[cluster % PALETTE.len()]
}

/// Marker radius proportional to √df, scaled so `max_df` maps to `max_radius`.
pub fn marker_radius(df: usize, max_df: usize, max_radius: f64) -> f64 {
    if max_df == 0 {
        return 0.0;
    }
    max_radius * (df as f64 / max_df as f64).sqrt()
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if lo > hi {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Renders the map as a self-contained SVG document. Larger markers are drawn
/// first so small ones stay visible.
pub fn render_map(map: &InterestMap, style: &SvgStyle) -> String {
    let (x0, x1) = extent(map.points.iter().map(|p| p.x));
    let (y0, y1) = extent(map.points.iter().map(|p| p.y));
    let inner_w = style.width - 2.0 * style.margin;
    let inner_h = style.height - 2.0 * style.margin;
    let sx = |x: f64| style.margin + (x - x0) / (x1 - x0) * inner_w;
    // SVG y grows downwards.
    let sy = |y: f64| style.margin + (y1 - y) / (y1 - y0) * inner_h;
    let max_df = map.points.iter().map(|p| p.df).max().unwrap_or(0);

    let mut order: Vec<usize> = (0..map.points.len()).collect();
    order.sort_by(|&a, &b| map.points[b].df.cmp(&map.points[a].df).then(a.cmp(&b)));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = style.width,
        h = style.height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<g fill-opacity="0.6" stroke="black" stroke-width="0.5">"#
    );
    for &i in &order {
        let p = &map.points[i];
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{}"><title>{} (cluster {}, df {})</title></circle>"#,
            sx(p.x),
            sy(p.y),
            marker_radius(p.df, max_df, style.max_radius),
            cluster_colour(p.cluster),
            escape(&p.surface),
            p.cluster,
            p.df
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<g font-family="sans-serif" font-size="10" text-anchor="middle">"#
    );
    for &i in order.iter().take(style.labelled) {
        let p = &map.points[i];
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            sx(p.x),
            sy(p.y) + 3.0,
            escape(&p.surface)
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}
