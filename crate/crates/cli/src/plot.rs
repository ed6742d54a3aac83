//! Minimal deterministic SVG line plots read back from CSV files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 770.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 440.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

/// One curve: columns `x` and `y` of a CSV file with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub label: String,
    pub csv: PathBuf,
    pub x: String,
    pub y: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Plot `log10` of the coordinate; non-positive values are dropped.
    pub log_x: bool,
    pub log_y: bool,
}

/// Reads every series and writes the SVG to `out`.
pub fn emit_plot(series: &[SeriesSpec], out: &Path, opts: &PlotOptions) -> Result<(), CliError> {
    if series.is_empty() {
        return Err(CliError::Plot("no series to plot".into()));
    }
    let mut data = Vec::with_capacity(series.len());
    for s in series {
        data.push((s.label.clone(), read_columns(&s.csv, &s.x, &s.y)?));
    }
    let svg = render_svg(&data, opts)?;
    fs::write(out, svg).map_err(|source| CliError::Output { path: out.to_path_buf(), source })
}

/// Pairs `(x, y)` from two named columns; rows with an empty cell are skipped.
pub fn read_columns(path: &Path, x: &str, y: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Plot(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| CliError::Plot(format!("{}: no column '{name}'", path.display())))
    };
    let (ix, iy) = (col(x)?, col(y)?);
    let mut out = Vec::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let (Some(a), Some(b)) = (cells.get(ix), cells.get(iy)) else { continue };
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let parse = |c: &str| c.parse::<f64>().map_err(|e| CliError::Plot(format!("{}: '{c}': {e}", path.display())));
        out.push((parse(a)?, parse(b)?));
    }
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        return format!("1e{v:.1}");
    }
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * lo.abs().max(1.0) {
        let pad = 0.1 * lo.abs().max(1.0);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

/// The SVG document for labelled point lists.
pub fn render_svg(series: &[(String, Vec<(f64, f64)>)], opts: &PlotOptions) -> Result<String, CliError> {
    if series.is_empty() {
        return Err(CliError::Plot("no series to plot".into()));
    }
    let tx = |v: f64| if opts.log_x { v.log10() } else { v };
    let ty = |v: f64| if opts.log_y { v.log10() } else { v };
    let keep = |&(x, y): &(f64, f64)| (!opts.log_x || x > 0.0) && (!opts.log_y || y > 0.0);
    let pts: Vec<Vec<(f64, f64)>> =
        series.iter().map(|(_, p)| p.iter().filter(|q| keep(q)).map(|&(x, y)| (tx(x), ty(y))).collect()).collect();
    let (x0, x1) = range(pts.iter().flatten().map(|p| p.0));
    let (y0, y1) = range(pts.iter().flatten().map(|p| p.1));
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (RIGHT - LEFT);
    let sy = |y: f64| BOTTOM - (y - y0) / (y1 - y0) * (BOTTOM - TOP);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(&opts.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{BOTTOM}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            BOTTOM + 5.0,
            BOTTOM + 19.0,
            tick_label(xv, opts.log_x)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            tick_label(yv, opts.log_y)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 18.0,
        escape(&opts.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (TOP + BOTTOM) / 2.0,
        escape(&opts.y_label)
    );
    for (i, ((label, _), p)) in series.iter().zip(&pts).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
        let ly = TOP + 16.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<g class="legend"><line x1="{}" y1="{ly:.2}" x2="{}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text></g>"#,
            LEFT + 10.0,
            LEFT + 34.0,
            LEFT + 40.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
