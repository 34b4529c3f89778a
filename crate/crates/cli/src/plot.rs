//! Minimal SVG 1.1 line plots: one polyline with error bars per case and a
//! dashed horizontal line at each case's reference value.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use crossent::estimate::LogBase;
use serde::{Deserialize, Serialize};

use crate::table::{read_aggregate, Row};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotCase {
    pub label: String,
    /// CSV path, relative to the metadata file.
    pub csv: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

/// Everything besides the CSV rows that the plot depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotMeta {
    pub title: String,
    pub x_label: String,
    pub unit: LogBase,
    pub seed: u64,
    pub trials: usize,
    pub cases: Vec<PlotCase>,
    /// SVG path, relative to the metadata file.
    pub svg: PathBuf,
}

impl PlotMeta {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("meta serialises") + "\n"
    }
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
    from: f64,
    to: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        let (v, lo, hi) = if self.log { (v.log10(), self.lo.log10(), self.hi.log10()) } else { (v, self.lo, self.hi) };
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
        self.from + t * (self.to - self.from)
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `rows[i]` for `meta.cases[i]`.
pub fn render(meta: &PlotMeta, rows: &[Vec<Row>]) -> String {
    let xs: Vec<f64> = rows.iter().flatten().map(|r| r.index as f64).collect();
    let (xmin, xmax) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (xmin, xmax) = if xs.is_empty() { (1.0, 10.0) } else { (xmin, xmax) };
    let log_x = xmin > 0.0 && xmax / xmin >= 100.0;

    let mut ys: Vec<f64> = Vec::new();
    for r in rows.iter().flatten() {
        if let Some(m) = r.mean {
            let s = r.sem.unwrap_or(0.0);
            ys.extend([m - s, m + s]);
        }
    }
    ys.extend(meta.cases.iter().filter_map(|c| c.reference));
    let (mut ymin, mut ymax) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    if ys.is_empty() {
        (ymin, ymax) = (0.0, 1.0);
    }
    let pad = ((ymax - ymin) * 0.08).max(1e-3);
    let (ymin, ymax) = (ymin - pad, ymax + pad);

    let sx = Scale { lo: xmin, hi: xmax, log: log_x, from: LEFT, to: WIDTH - RIGHT };
    let sy = Scale { lo: ymin, hi: ymax, log: false, from: HEIGHT - BOTTOM, to: TOP };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, (LEFT + WIDTH - RIGHT) / 2.0, escape(&meta.title));

    // Axes and ticks.
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(s, r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#);
    let x_ticks: Vec<f64> = if log_x {
        let (a, b) = (xmin.log10().ceil() as i32, xmax.log10().floor() as i32);
        (a..=b).map(|e| 10f64.powi(e)).collect()
    } else {
        let step = nice_step(xmax - xmin);
        let first = (xmin / step).ceil() as i64;
        let last = (xmax / step).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    };
    for t in x_ticks {
        let px = sx.map(t);
        let label = if log_x { format!("1e{}", t.log10().round() as i32) } else { format!("{t}") };
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, y0 + 20.0);
    }
    let step = nice_step(ymax - ymin);
    let mut k = (ymin / step).ceil() as i64;
    while (k as f64) * step <= ymax {
        let t = k as f64 * step;
        let py = sy.map(t);
        let decimals = (-step.log10().floor()).max(0.0) as usize;
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t:.decimals$}</text>"#, x0 - 8.0, py + 4.0);
        k += 1;
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 16.0, escape(&meta.x_label));
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">estimate ({})</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        meta.unit.suffix()
    );

    for (i, (case, data)) in meta.cases.iter().zip(rows).enumerate() {
        let color = COLORS[i % COLORS.len()];
        if let Some(r) = case.reference {
            let py = sy.map(r);
            let _ = writeln!(
                s,
                r#"<line x1="{x0:.2}" y1="{py:.2}" x2="{x1:.2}" y2="{py:.2}" stroke="{color}" stroke-dasharray="6,4"/>"#
            );
        }
        let pts: Vec<(f64, f64, f64)> =
            data.iter().filter_map(|r| r.mean.map(|m| (sx.map(r.index as f64), m, r.sem.unwrap_or(0.0)))).collect();
        let line: Vec<String> = pts.iter().map(|(px, m, _)| format!("{px:.2},{:.2}", sy.map(*m))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, line.join(" "));
        for (px, m, e) in &pts {
            let (top, bot) = (sy.map(m + e), sy.map(m - e));
            let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{top:.2}" x2="{px:.2}" y2="{bot:.2}" stroke="{color}"/>"#);
            let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sy.map(*m));
        }
        let ly = TOP + 20.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(s, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.5"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&case.label));
    }
    s.push_str("</svg>\n");
    s
}

/// Reads the CSVs named in the metadata file and renders them.
pub fn render_from_meta(meta_path: &Path) -> Result<(PlotMeta, String)> {
    let meta = PlotMeta::load(meta_path)?;
    let dir = meta_path.parent().unwrap_or(Path::new("."));
    let mut rows = Vec::new();
    for case in &meta.cases {
        let path = dir.join(&case.csv);
        let file = std::fs::File::open(&path).with_context(|| format!("opening {}", path.display()))?;
        rows.push(read_aggregate(file)?.1);
    }
    let svg = render(&meta, &rows);
    Ok((meta, svg))
}
