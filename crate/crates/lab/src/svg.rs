//! Hand-written SVG line plots of CSR against the swept parameter.

use std::fmt::Write as _;
use std::path::Path;

use covert_core::ScenarioId;

use crate::sweep::ResultRow;
use crate::LabError;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 640.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 700.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 570.0;
const TICKS: usize = 6;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const DASHES: [&str; 2] = ["none", "8 5"];

/// Twelve stroke styles: six colours, solid then dashed.
fn stroke(index: usize) -> (&'static str, &'static str) {
    let i = index % (COLORS.len() * DASHES.len());
    (COLORS[i % COLORS.len()], DASHES[i / COLORS.len()])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

impl PlotSpec {
    pub fn for_rows(title: &str, rows: &[ResultRow]) -> Self {
        Self {
            title: title.to_string(),
            x_label: rows.first().map(|r| r.axis_param.key().to_string()).unwrap_or_default(),
            y_label: "CSR".into(),
        }
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

struct Curve<'a> {
    scenario: ScenarioId,
    series: &'a str,
    points: Vec<(f64, f64)>,
}

/// Groups rows into curves by (scenario, series), in first-seen order.
fn curves(rows: &[ResultRow]) -> Vec<Curve<'_>> {
    let mut out: Vec<Curve<'_>> = Vec::new();
    for r in rows {
        let point = (r.axis_value, r.solution.csr);
        match out
            .iter_mut()
            .find(|c| c.scenario == r.scenario && c.series == r.series_label)
        {
            Some(c) => c.points.push(point),
            None => out.push(Curve {
                scenario: r.scenario,
                series: &r.series_label,
                points: vec![point],
            }),
        }
    }
    out
}

pub fn render_svg(rows: &[ResultRow], plot: &PlotSpec) -> Result<String, LabError> {
    let first = rows.first().ok_or(LabError::EmptyRows)?;
    if rows.iter().any(|r| r.axis_param != first.axis_param) {
        return Err(LabError::MixedAxes);
    }
    let finite = |v: f64| if v.is_finite() { v } else { 0.0 };
    let (x_min, x_max) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r.axis_value), hi.max(r.axis_value))
    });
    let (x_min, x_max) = if x_max > x_min {
        (x_min, x_max)
    } else {
        (x_min - 0.5, x_min + 0.5)
    };
    let y_top = rows.iter().map(|r| finite(r.solution.csr)).fold(0.0, f64::max);
    let y_max = if y_top > 0.0 { y_top * 1.05 } else { 1.0 };
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * (RIGHT - LEFT);
    let sy = |y: f64| BOTTOM - finite(y) / y_max * (BOTTOM - TOP);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="30" text-anchor="middle" font-size="16">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(&plot.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );

    for k in 0..TICKS {
        let t = k as f64 / (TICKS - 1) as f64;
        let xv = x_min + t * (x_max - x_min);
        let yv = t * y_max;
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{BOTTOM}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            BOTTOM + 6.0,
            BOTTOM + 22.0,
            tick_label(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            LEFT - 10.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 50.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="25" y="{0:.2}" text-anchor="middle" transform="rotate(-90 25 {0:.2})">{1}</text>"#,
        (TOP + BOTTOM) / 2.0,
        escape(&plot.y_label)
    );

    for (i, curve) in curves(rows).iter().enumerate() {
        let (color, dash) = stroke(i);
        let points: Vec<String> = curve
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" stroke-dasharray="{dash}" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 22.0 * i as f64;
        let label = if curve.series.is_empty() {
            curve.scenario.to_string()
        } else {
            format!("{} {}", curve.scenario, curve.series)
        };
        let _ = writeln!(
            s,
            r#"<g class="legend"><line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2" stroke-dasharray="{dash}"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            RIGHT + 15.0,
            RIGHT + 45.0,
            RIGHT + 52.0,
            ly + 4.0,
            escape(&label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(rows: &[ResultRow], plot: &PlotSpec, path: &Path) -> Result<(), LabError> {
    let text = render_svg(rows, plot)?;
    std::fs::write(path, text).map_err(|source| LabError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_distinct_styles() {
        let styles: std::collections::BTreeSet<_> = (0..12).map(stroke).collect();
        assert_eq!(styles.len(), 12);
        assert_eq!(stroke(12), stroke(0));
    }

    #[test]
    fn tick_labels_are_trimmed() {
        assert_eq!(tick_label(0.5), "0.5");
        assert_eq!(tick_label(0.0), "0");
        assert_eq!(tick_label(-0.00001), "0");
        assert_eq!(tick_label(12.0), "12");
    }
}
