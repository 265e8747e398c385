//! Standalone SVG line chart of mean sum-rate with standard-error bars.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::Aggregate;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Data range widened by 5% of its span on each side. A degenerate range is
/// widened by 5% of `max(|lo|, 1)`.
pub fn axis_range(lo: f64, hi: f64) -> (f64, f64) {
    let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
    (lo - 0.05 * span, hi + 0.05 * span)
}

struct Series {
    label: String,
    /// (x, mean, stderr), sorted by x.
    points: Vec<(f64, f64, f64)>,
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Groups aggregates into series. Returns the x-axis label and the series.
fn build_series(aggregates: &[Aggregate]) -> (&'static str, Vec<Series>) {
    let n_ith = distinct(aggregates.iter().map(|a| a.i_th_db));
    let n_k = distinct(aggregates.iter().map(|a| a.k as f64));
    let by_k = n_ith == 1 && n_k > 1;
    let mut series: Vec<Series> = Vec::new();
    for a in aggregates {
        if !a.mean_sum_rate.is_finite() {
            continue;
        }
        let label = if by_k || n_k == 1 {
            a.scheme_id.clone()
        } else {
            format!("{} (K={})", a.scheme_id, a.k)
        };
        let x = if by_k { a.k as f64 } else { a.i_th_db };
        let se = if a.stderr_sum_rate.is_finite() { a.stderr_sum_rate } else { 0.0 };
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((x, a.mean_sum_rate, se)),
            None => series.push(Series {
                label,
                points: vec![(x, a.mean_sum_rate, se)],
            }),
        }
    }
    for s in &mut series {
        s.points.sort_by(|p, q| p.0.total_cmp(&q.0));
    }
    (if by_k { "K (users)" } else { "I_th (dB)" }, series)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

/// Renders the chart; errors with [`Error::NoData`] when nothing is plottable.
pub fn render_svg(aggregates: &[Aggregate]) -> Result<String> {
    let (x_label, series) = build_series(aggregates);
    let pts = || series.iter().flat_map(|s| s.points.iter());
    if pts().next().is_none() {
        return Err(Error::NoData);
    }
    let (x0, x1) = axis_range(
        pts().map(|p| p.0).fold(f64::INFINITY, f64::min),
        pts().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
    );
    let (y0, y1) = axis_range(
        pts().map(|p| p.1 - p.2).fold(f64::INFINITY, f64::min),
        pts().map(|p| p.1 + p.2).fold(f64::NEG_INFINITY, f64::max),
    );
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut svg = String::new();
    // Writing into a String cannot fail.
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<g class="axes" data-x-min="{x0}" data-x-max="{x1}" data-y-min="{y0}" data-y-max="{y1}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{b:.2}" x2="{px:.2}" y2="{b2:.2}" stroke="black"/><text x="{px:.2}" y="{t:.2}" text-anchor="middle">{}</text>"#,
            tick_label(xv),
            b = TOP + ph,
            b2 = TOP + ph + 5.0,
            t = TOP + ph + 18.0
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{l:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{t:.2}" y="{ty:.2}" text-anchor="end">{}</text>"#,
            tick_label(yv),
            l = LEFT - 5.0,
            t = LEFT - 8.0,
            ty = py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">Sum rate (bits/s/Hz)</text>"#,
        TOP + ph / 2.0
    );
    let _ = writeln!(svg, "</g>");

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(svg, r#"<g class="series" data-label="{}">"#, escape(&s.label));
        if s.points.len() >= 2 {
            let coords: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y, _)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                coords.join(" ")
            );
        }
        for &(x, y, se) in &s.points {
            let px = sx(x);
            if se > 0.0 {
                let _ = writeln!(
                    svg,
                    r#"<line class="errbar" x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="{color}"/>"#,
                    sy(y - se),
                    sy(y + se)
                );
            }
            let _ = writeln!(
                svg,
                r#"<circle cx="{px:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
                sy(y)
            );
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(aggregates: &[Aggregate], path: &Path) -> Result<()> {
    let svg = render_svg(aggregates)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
