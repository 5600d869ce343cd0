//! Self-contained SVG boxplots and time-series panels.
//!
//! Output is a pure function of the inputs: fixed canvas sizes, fixed number
//! formatting, no timestamps. Boxplot elements carry the classes `box`,
//! `median`, `whisker`, `mean` and `outlier`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Error;
use crate::report::stats::SummaryStats;

/// Spans of at least this many decades switch the value axis to log scale.
pub const LOG_SCALE_DECADES: f64 = 3.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Clone, Copy, Debug, PartialEq)]
enum Scale {
    Linear { lo: f64, hi: f64 },
    Log { lo: f64, hi: f64 },
}

impl Scale {
    /// Log scale iff every value is positive and they span ≥ 3 decades.
    fn for_values(values: &[f64]) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() || !hi.is_finite() {
            return Scale::Linear { lo: 0.0, hi: 1.0 };
        }
        if lo > 0.0 && (hi / lo).log10() >= LOG_SCALE_DECADES {
            return Scale::Log { lo: lo.log10().floor(), hi: hi.log10().ceil() };
        }
        let pad = if hi > lo { 0.05 * (hi - lo) } else { lo.abs().max(1.0) * 0.5 };
        Scale::Linear { lo: lo - pad, hi: hi + pad }
    }

    /// Position in [0, 1], 0 at the bottom.
    fn unit(&self, v: f64) -> f64 {
        match *self {
            Scale::Linear { lo, hi } => (v - lo) / (hi - lo),
            Scale::Log { lo, hi } => (v.log10() - lo) / (hi - lo),
        }
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        match *self {
            Scale::Linear { lo, hi } => (0..=4)
                .map(|i| {
                    let v = lo + (hi - lo) * i as f64 / 4.0;
                    (v, format!("{v:.3e}"))
                })
                .collect(),
            Scale::Log { lo, hi } => (lo as i32..=hi as i32).map(|e| (10f64.powi(e), format!("1e{e}"))).collect(),
        }
    }

    pub fn is_log(&self) -> bool {
        matches!(self, Scale::Log { .. })
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    scale: Scale,
}

impl Frame {
    fn y(&self, v: f64) -> f64 {
        self.y0 + self.h * (1.0 - self.scale.unit(v))
    }

    fn axes(&self, svg: &mut String, y_label: &str) {
        let _ = writeln!(
            svg,
            r#"<rect class="frame" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            self.x0, self.y0, self.w, self.h
        );
        for (v, label) in self.scale.ticks() {
            let y = self.y(v);
            let _ = writeln!(
                svg,
                r##"<line class="tick" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ccc"/><text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{label}</text>"##,
                self.x0,
                self.x0 + self.w,
                self.x0 - 4.0,
                y + 3.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" transform="rotate(-90 {:.2} {:.2})" text-anchor="middle">{}</text>"#,
            self.x0 - 58.0,
            self.y0 + self.h / 2.0,
            self.x0 - 58.0,
            self.y0 + self.h / 2.0,
            escape(y_label)
        );
    }
}

/// One labelled box.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxGroup {
    pub label: String,
    pub stats: SummaryStats,
}

pub fn boxplot_svg(title: &str, y_label: &str, groups: &[BoxGroup]) -> String {
    let mut values = Vec::new();
    for g in groups {
        let s = &g.stats;
        values.extend([s.whisker_low, s.whisker_high, s.q1, s.q3, s.median, s.mean]);
        values.extend(&s.outliers);
    }
    let slot = 70.0;
    let width = 100.0 + slot * groups.len().max(1) as f64;
    let frame = Frame { x0: 80.0, y0: 40.0, w: width - 100.0, h: 300.0, scale: Scale::for_values(&values) };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="420" data-scale="{}">"#,
        if frame.scale.is_log() { "log" } else { "linear" }
    );
    let _ = writeln!(svg, r#"<text x="{:.2}" y="22" font-size="14" text-anchor="middle">{}</text>"#, width / 2.0, escape(title));
    frame.axes(&mut svg, y_label);
    for (i, g) in groups.iter().enumerate() {
        let s = &g.stats;
        let cx = frame.x0 + slot * (i as f64 + 0.5);
        let half = 0.3 * slot;
        let color = PALETTE[i % PALETTE.len()];
        let (yq1, yq3) = (frame.y(s.q1), frame.y(s.q3));
        let _ = writeln!(svg, r#"<g class="group" data-label="{}">"#, escape(&g.label));
        let _ = writeln!(
            svg,
            r#"<line class="whisker" x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{yq1:.2}" stroke="{color}"/>"#,
            frame.y(s.whisker_low)
        );
        let _ = writeln!(
            svg,
            r#"<line class="whisker" x1="{cx:.2}" y1="{yq3:.2}" x2="{cx:.2}" y2="{:.2}" stroke="{color}"/>"#,
            frame.y(s.whisker_high)
        );
        for w in [s.whisker_low, s.whisker_high] {
            let y = frame.y(w);
            let _ = writeln!(
                svg,
                r#"<line class="whisker-cap" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}"/>"#,
                cx - half / 2.0,
                cx + half / 2.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<rect class="box" x="{:.2}" y="{yq3:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.25" stroke="{color}"/>"#,
            cx - half,
            2.0 * half,
            (yq1 - yq3).max(0.0)
        );
        let ym = frame.y(s.median);
        let _ = writeln!(
            svg,
            r#"<line class="median" x1="{:.2}" y1="{ym:.2}" x2="{:.2}" y2="{ym:.2}" stroke="{color}" stroke-width="2"/>"#,
            cx - half,
            cx + half
        );
        let ymean = frame.y(s.mean);
        let _ = writeln!(
            svg,
            r#"<path class="mean" d="M {:.2} {:.2} L {:.2} {:.2} M {:.2} {:.2} L {:.2} {:.2}" stroke="black"/>"#,
            cx - 4.0,
            ymean - 4.0,
            cx + 4.0,
            ymean + 4.0,
            cx - 4.0,
            ymean + 4.0,
            cx + 4.0,
            ymean - 4.0
        );
        for o in &s.outliers {
            let _ = writeln!(svg, r#"<circle class="outlier" cx="{cx:.2}" cy="{:.2}" r="2.5" fill="none" stroke="{color}"/>"#, frame.y(*o));
        }
        let _ = writeln!(
            svg,
            r#"<text x="{cx:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
            frame.y0 + frame.h + 16.0,
            escape(&g.label)
        );
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub t: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub title: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Vertically stacked panels sharing the time axis; `marker` draws a dashed
/// vertical line (e.g. at a fault onset).
pub fn timeseries_svg(title: &str, panels: &[Panel], marker: Option<f64>) -> String {
    let (width, panel_h, gap) = (720.0, 220.0, 60.0);
    let height = 50.0 + panels.len() as f64 * (panel_h + gap);
    let t_all: Vec<f64> = panels.iter().flat_map(|p| p.series.iter().flat_map(|s| s.t.iter().copied())).collect();
    let t_lo = t_all.iter().copied().fold(f64::INFINITY, f64::min);
    let t_hi = t_all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (t_lo, t_hi) = if t_lo.is_finite() && t_hi > t_lo { (t_lo, t_hi) } else { (0.0, 1.0) };

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}">"#);
    let _ = writeln!(svg, r#"<text x="{:.2}" y="22" font-size="14" text-anchor="middle">{}</text>"#, width / 2.0, escape(title));
    for (k, p) in panels.iter().enumerate() {
        let values: Vec<f64> = p.series.iter().flat_map(|s| s.y.iter().copied()).filter(|v| v.is_finite()).collect();
        let frame = Frame {
            x0: 90.0,
            y0: 40.0 + k as f64 * (panel_h + gap),
            w: width - 130.0,
            h: panel_h,
            scale: Scale::for_values(&values),
        };
        let x = |t: f64| frame.x0 + frame.w * (t - t_lo) / (t_hi - t_lo);
        let _ = writeln!(svg, r#"<g class="panel" data-title="{}">"#, escape(&p.title));
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#, frame.x0, frame.y0 - 6.0, escape(&p.title));
        frame.axes(&mut svg, &p.y_label);
        for (i, s) in p.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut d = String::new();
            for (j, (t, y)) in s.t.iter().zip(&s.y).enumerate() {
                let _ = write!(d, "{}{:.2} {:.2}", if j == 0 { "M " } else { " L " }, x(*t), frame.y(*y));
            }
            let _ = writeln!(svg, r#"<path class="series" data-label="{}" d="{d}" fill="none" stroke="{color}"/>"#, escape(&s.label));
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="10" fill="{color}">{}</text>"#,
                frame.x0 + frame.w - 120.0,
                frame.y0 + 14.0 + 12.0 * i as f64,
                escape(&s.label)
            );
        }
        if let Some(tm) = marker {
            let xm = x(tm);
            let _ = writeln!(
                svg,
                r#"<line class="marker" x1="{xm:.2}" y1="{:.2}" x2="{xm:.2}" y2="{:.2}" stroke="black" stroke-dasharray="4 3"/>"#,
                frame.y0,
                frame.y0 + frame.h
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">t [s]</text>"#,
            frame.x0 + frame.w / 2.0,
            frame.y0 + frame.h + 28.0
        );
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(path: &Path, svg: &str) -> Result<(), Error> {
    std::fs::write(path, svg)?;
    Ok(())
}
