//! Standalone SVG 1.1 scatter and stem plots with labelled axes.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    Points(Vec<(f64, f64)>),
    /// Vertical segments from `y = 0` to each point.
    Stems(Vec<(f64, f64)>),
}

impl Series {
    fn data(&self) -> &[(f64, f64)] {
        match self {
            Series::Points(p) | Series::Stems(p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub width: u32,
    pub height: u32,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub color: String,
}

impl Default for PlotStyle {
    fn default() -> Self {
        Self {
            width: 640,
            height: 480,
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            color: "#1f4e99".into(),
        }
    }
}

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Data range padded by 5%, widened to unit length when degenerate.
fn range(values: impl Iterator<Item = f64>, include_zero: bool) -> (f64, f64) {
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if include_zero {
        lo = lo.min(0.0);
        hi = hi.max(0.0);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Tick positions at a 1-2-5 step giving about five ticks, and the number of
/// decimals needed to print them.
fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let raw = (hi - lo) / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|f| f * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    ((first..=last).map(|i| i as f64 * step).collect(), decimals)
}

fn label(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        format!("{:.decimals$}", 0.0)
    } else {
        s
    }
}

/// Deterministic SVG text for `series`: same input and style, same bytes.
pub fn render_svg(series: &Series, style: &PlotStyle) -> String {
    let data: Vec<(f64, f64)> = series.data().iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let stems = matches!(series, Series::Stems(_));
    let (x0, x1) = range(data.iter().map(|p| p.0), false);
    let (y0, y1) = range(data.iter().map(|p| p.1), stems);
    let (w, h) = (f64::from(style.width), f64::from(style.height));
    let (left, right, top, bottom) = (MARGIN_LEFT, w - MARGIN_RIGHT, MARGIN_TOP, h - MARGIN_BOTTOM);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        style.width, style.height, style.width, style.height
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, style.width, style.height);
    if !style.title.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
            w / 2.0,
            escape(&style.title)
        );
    }

    let _ = writeln!(out, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(out, r#"<line x1="{left:.2}" y1="{bottom:.2}" x2="{right:.2}" y2="{bottom:.2}"/>"#);
    let _ = writeln!(out, r#"<line x1="{left:.2}" y1="{bottom:.2}" x2="{left:.2}" y2="{top:.2}"/>"#);
    let (xt, xd) = ticks(x0, x1);
    for t in &xt {
        let x = sx(*t);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}"/>"#, bottom + 5.0);
    }
    let (yt, yd) = ticks(y0, y1);
    for t in &yt {
        let y = sy(*t);
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{left:.2}" y2="{y:.2}"/>"#, left - 5.0);
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g class="tick-labels" font-family="sans-serif" font-size="11" fill="black">"#);
    for t in &xt {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(*t),
            bottom + 18.0,
            label(*t, xd)
        );
    }
    for t in &yt {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 8.0,
            sy(*t) + 4.0,
            label(*t, yd)
        );
    }
    let _ = writeln!(out, "</g>");
    if !style.x_label.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
            (left + right) / 2.0,
            h - 12.0,
            escape(&style.x_label)
        );
    }
    if !style.y_label.is_empty() {
        let cy = (top + bottom) / 2.0;
        let _ = writeln!(
            out,
            r#"<text x="18" y="{cy:.2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {cy:.2})">{}</text>"#,
            escape(&style.y_label)
        );
    }

    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            out,
            r##"<line class="zero" x1="{left:.2}" y1="{0:.2}" x2="{right:.2}" y2="{0:.2}" stroke="#999999" stroke-dasharray="4 3"/>"##,
            sy(0.0)
        );
    }
    let _ = writeln!(out, r#"<g class="data" fill="{0}" stroke="{0}">"#, escape(&style.color));
    for &(x, y) in &data {
        if stems {
            let _ = writeln!(
                out,
                r#"<line class="stem" x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke-width="1.5"/>"#,
                sx(x),
                sy(0.0),
                sy(y)
            );
        }
        let _ = writeln!(out, r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3"/>"#, sx(x), sy(y));
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_plot_has_axes_only() {
        let svg = render_svg(&Series::Points(vec![]), &PlotStyle::default());
        assert!(svg.contains(r#"class="axes""#));
        assert_eq!(svg.matches("<circle").count(), 0);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn stems_and_points_are_counted() {
        let stems: Vec<(f64, f64)> = (-3..=3).map(|b| (f64::from(b), 1.0)).collect();
        let svg = render_svg(&Series::Stems(stems), &PlotStyle::default());
        assert_eq!(svg.matches(r#"class="stem""#).count(), 7);
        assert_eq!(svg.matches(r#"class="point""#).count(), 7);
    }

    #[test]
    fn ticks_use_nice_steps() {
        let (t, d) = ticks(-0.4, 0.6);
        assert_eq!(t.len(), 6);
        assert_eq!(d, 1);
        assert_eq!(label(t[0], d), "-0.4");
        assert_eq!(label(-1e-17, 1), "0.0");
    }

    #[test]
    fn labels_are_escaped() {
        let style = PlotStyle {
            title: "a < b & c".into(),
            ..PlotStyle::default()
        };
        assert!(render_svg(&Series::Points(vec![(0.0, 0.0)]), &style).contains("a &lt; b &amp; c"));
    }
}
