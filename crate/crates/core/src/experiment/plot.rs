//! Self-contained SVG scatter of clause counts, one point per board.

use std::fmt::Write as _;

use super::{classify_all, AreaLabel, FlowConfig, RunRecord};

#[derive(Debug, Clone)]
pub struct ScatterOptions {
    pub width: f64,
    pub height: f64,
    /// Plot log10 of the counts (counts below 1 are drawn at 1).
    pub log_axes: bool,
    /// Color points by area label at this threshold, when the records also
    /// carry the baseline flow.
    pub theta: Option<f64>,
    pub title: Option<String>,
}

impl Default for ScatterOptions {
    fn default() -> ScatterOptions {
        ScatterOptions { width: 640.0, height: 520.0, log_axes: false, theta: None, title: None }
    }
}

#[derive(Debug, Clone)]
pub struct ScatterPlot {
    pub svg: String,
    pub points: usize,
    /// Boards missing one of the two flows.
    pub skipped: usize,
    pub x_range: Option<(u64, u64)>,
    pub y_range: Option<(u64, u64)>,
}

const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 58.0;

fn area_color(label: Option<AreaLabel>) -> &'static str {
    match label {
        Some(AreaLabel::A) => "#1f77b4",
        Some(AreaLabel::B) => "#d62728",
        Some(AreaLabel::C) => "#2ca02c",
        Some(AreaLabel::D) => "#7f7f7f",
        None => "#3b4cc0",
    }
}

struct Axis {
    min: u64,
    max: u64,
    log: bool,
}

impl Axis {
    fn value(&self, v: u64) -> f64 {
        if self.log {
            (v.max(1) as f64).log10()
        } else {
            v as f64
        }
    }

    /// Data span in plotting units; a degenerate span is widened around its
    /// single value so that the point lands mid-axis.
    fn span(&self) -> (f64, f64) {
        let (lo, hi) = (self.value(self.min), self.value(self.max));
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, hi + 1.0)
        }
    }

    fn fraction(&self, v: u64) -> f64 {
        let (lo, hi) = self.span();
        (self.value(v) - lo) / (hi - lo)
    }

    fn ticks(&self) -> Vec<u64> {
        let mut ticks = vec![self.min];
        if self.max > self.min {
            for k in 1..4 {
                let t = if self.log {
                    let (lo, hi) = self.span();
                    10f64.powf(lo + (hi - lo) * k as f64 / 4.0).round() as u64
                } else {
                    self.min + (self.max - self.min) * k / 4
                };
                ticks.push(t);
            }
            ticks.push(self.max);
        }
        ticks.dedup();
        ticks
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Scatter of generated-clause counts: x from `x_flow`, y from `y_flow`.
pub fn scatter_svg(records: &[RunRecord], x_flow: FlowConfig, y_flow: FlowConfig, options: &ScatterOptions) -> ScatterPlot {
    let mut ids: Vec<u32> = records.iter().map(|r| r.board_id).collect();
    ids.sort_unstable();
    ids.dedup();
    let lookup = |id: u32, flow: FlowConfig| records.iter().find(|r| r.board_id == id && r.flow == flow);
    let labels = options.theta.map(|theta| classify_all(records, theta)).unwrap_or_default();

    let mut points = Vec::new();
    let mut skipped = 0;
    for id in ids {
        match (lookup(id, x_flow), lookup(id, y_flow)) {
            (Some(x), Some(y)) => {
                let label = labels.iter().find(|(i, _)| *i == id).map(|(_, l)| *l);
                points.push((id, x, y.generated, label));
            }
            _ => skipped += 1,
        }
    }

    let extent = |vals: Vec<u64>| Some((*vals.iter().min()?, *vals.iter().max()?));
    let x_range = extent(points.iter().map(|p| p.1.generated).collect());
    let y_range = extent(points.iter().map(|p| p.2).collect());
    let x_axis = Axis { min: x_range.map_or(0, |r| r.0), max: x_range.map_or(1, |r| r.1), log: options.log_axes };
    let y_axis = Axis { min: y_range.map_or(0, |r| r.0), max: y_range.map_or(1, |r| r.1), log: options.log_axes };

    let (w, h) = (options.width, options.height);
    let plot_w = w - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = h - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |v: u64| MARGIN_LEFT + x_axis.fraction(v) * plot_w;
    let py = |v: u64| MARGIN_TOP + plot_h - y_axis.fraction(v) * plot_h;
    let scale = if options.log_axes { "log" } else { "linear" };

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let title = options
        .title
        .clone()
        .unwrap_or_else(|| format!("Generated clauses per board: {x_flow} vs {y_flow} heat flow"));
    let _ = writeln!(svg, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(&title));

    let (x0, y0, x1, y1) = (MARGIN_LEFT, MARGIN_TOP + plot_h, MARGIN_LEFT + plot_w, MARGIN_TOP);
    let range_attrs = |r: Option<(u64, u64)>| match r {
        Some((lo, hi)) => format!(r#" data-min="{lo}" data-max="{hi}""#),
        None => String::new(),
    };
    let _ = writeln!(svg, r#"<g class="x-axis" data-flow="{x_flow}" data-scale="{scale}"{}>"#, range_attrs(x_range));
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    for t in x_axis.ticks() {
        let x = px(t);
        let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{t}</text>"#, y0 + 18.0);
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">generated clauses, {x_flow} heat flow ({scale})</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        h - 14.0
    );
    svg.push_str("</g>\n");

    let _ = writeln!(svg, r#"<g class="y-axis" data-flow="{y_flow}" data-scale="{scale}"{}>"#, range_attrs(y_range));
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    for t in y_axis.ticks() {
        let y = py(t);
        let _ = writeln!(svg, r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">{t}</text>"#, x0 - 8.0, y + 4.0);
    }
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {})">generated clauses, {y_flow} heat flow ({scale})</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );
    svg.push_str("</g>\n");

    svg.push_str("<g class=\"points\">\n");
    for (id, x, y, label) in &points {
        let area = label.map(|l| format!(r#" data-area="{l}""#)).unwrap_or_default();
        let _ = writeln!(
            svg,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="2.5" fill="{}" fill-opacity="0.7" data-board="{id}" data-x="{}" data-y="{y}"{area}><title>#{id} {} ({}, {y})</title></circle>"#,
            px(x.generated),
            py(*y),
            area_color(*label),
            x.generated,
            x.board.dashed(),
            x.generated
        );
    }
    svg.push_str("</g>\n");

    if !labels.is_empty() {
        svg.push_str("<g class=\"legend\">\n");
        for (i, (label, text)) in [
            (AreaLabel::A, "A: vertical effective"),
            (AreaLabel::B, "B: horizontal effective"),
            (AreaLabel::C, "C: both effective"),
            (AreaLabel::D, "D: neither"),
        ]
        .into_iter()
        .enumerate()
        {
            let y = MARGIN_TOP + 10.0 + 16.0 * i as f64;
            let x = x1 - 150.0;
            let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="4" fill="{}"/>"#, area_color(Some(label)));
            let _ = writeln!(svg, r#"<text x="{}" y="{}">{text}</text>"#, x + 9.0, y + 4.0);
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");

    ScatterPlot { svg, points: points.len(), skipped, x_range, y_range }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::Verdict;
    use crate::puzzle::Board;

    fn rec(id: u32, flow: FlowConfig, generated: u64) -> RunRecord {
        RunRecord {
            board_id: id,
            board: Board::goal(3),
            flow,
            result: Verdict::Proof,
            generated,
            retained: 0,
            given: 0,
            moves: None,
            wall_ms: 0.0,
        }
    }

    #[test]
    fn single_point_sits_inside() {
        let records = [rec(295, FlowConfig::Vertical, 254), rec(295, FlowConfig::Horizontal, 388)];
        let plot = scatter_svg(&records, FlowConfig::Vertical, FlowConfig::Horizontal, &ScatterOptions::default());
        assert_eq!(plot.points, 1);
        assert_eq!(plot.x_range, Some((254, 254)));
        assert_eq!(plot.y_range, Some((388, 388)));
        assert!(plot.svg.contains(r#"data-x="254" data-y="388""#));
        // degenerate span centres the point
        assert!(plot.svg.contains(r#"cx="347.00""#), "{}", plot.svg);
    }

    #[test]
    fn empty_plot_has_axes() {
        let plot = scatter_svg(&[], FlowConfig::Vertical, FlowConfig::Horizontal, &ScatterOptions::default());
        assert_eq!(plot.points, 0);
        assert!(plot.svg.contains("class=\"x-axis\""));
        assert!(plot.svg.contains("class=\"y-axis\""));
        assert!(!plot.svg.contains("class=\"point\""));
    }

    #[test]
    fn missing_flow_is_skipped() {
        let records = [rec(0, FlowConfig::Vertical, 10), rec(0, FlowConfig::Horizontal, 20), rec(1, FlowConfig::Vertical, 5)];
        let plot = scatter_svg(&records, FlowConfig::Vertical, FlowConfig::Horizontal, &ScatterOptions::default());
        assert_eq!((plot.points, plot.skipped), (1, 1));
    }

    #[test]
    fn area_colors_and_log_axes() {
        let records = [
            rec(0, FlowConfig::None, 1000),
            rec(0, FlowConfig::Vertical, 400),
            rec(0, FlowConfig::Horizontal, 950),
            rec(1, FlowConfig::None, 10),
            rec(1, FlowConfig::Vertical, 10),
            rec(1, FlowConfig::Horizontal, 10_000),
        ];
        let options = ScatterOptions { log_axes: true, theta: Some(0.9), ..Default::default() };
        let plot = scatter_svg(&records, FlowConfig::Vertical, FlowConfig::Horizontal, &options);
        assert!(plot.svg.contains(r#"data-area="A""#));
        assert!(plot.svg.contains(r#"data-area="D""#));
        assert!(plot.svg.contains(r#"data-scale="log""#));
        assert_eq!(plot.y_range, Some((950, 10_000)));
    }
}
