//! Files written by `run` and `sweep`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use dampflow::diagnostics::ROW_COLUMNS;
use dampflow::{BlowupStatus, DiagnosticRow, RunResult, RunStatus};

use crate::config::RawConfig;

/// Bumped whenever a column of `run.csv` or `sweep.csv`, or a field of
/// `summary.json`, changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable that overrides `[output] directory`.
pub const OUT_DIR_ENV: &str = "DAMPFLOW_OUT_DIR";

#[derive(Debug, Clone, Serialize)]
pub struct Summary<'a> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub status: &'a RunStatus,
    pub exit_code: i32,
    /// Blowup time, or -1 for a global run.
    pub blowup_time: f64,
    pub blowup: &'a BlowupStatus,
    pub fps_margin: f64,
    pub sup_ratio: f64,
    pub final_ratio: f64,
    pub initial_energy_sq: Option<f64>,
    pub energy_monotone: bool,
    pub steps: usize,
    pub rows: usize,
    pub wall_time_s: f64,
    pub notices: &'a [String],
    pub config: &'a RawConfig,
}

impl<'a> Summary<'a> {
    pub fn new(res: &'a RunResult, config: &'a RawConfig, notices: &'a [String]) -> Self {
        Summary {
            schema_version: SCHEMA_VERSION,
            status: &res.status,
            exit_code: res.status.exit_code(),
            blowup_time: blowup_time(&res.status),
            blowup: &res.blowup,
            fps_margin: res.fps_margin,
            sup_ratio: res.energy.sup_ratio(),
            final_ratio: res.energy.last().map_or(0.0, |s| s.ratio),
            initial_energy_sq: res.energy.initial_energy_sq(),
            energy_monotone: res.energy.is_monotone(),
            steps: res.steps,
            rows: res.rows.len(),
            wall_time_s: res.wall_time_s,
            notices,
            config,
        }
    }
}

pub fn blowup_time(status: &RunStatus) -> f64 {
    match status {
        RunStatus::BlowupDetected { t } => *t,
        _ => -1.0,
    }
}

pub fn write_rows_csv(path: &Path, rows: &[DiagnosticRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    if rows.is_empty() {
        w.write_record(ROW_COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

/// A single-series polyline chart with labelled axis extents.
pub fn line_chart(title: &str, x_label: &str, xs: &[f64], ys: &[f64]) -> String {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| x.is_finite() && y.is_finite()).map(|(&x, &y)| (x, y)).collect();
    let (x0, x1) = extent(pts.iter().map(|p| p.0));
    let (y0, y1) = extent(pts.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" fill="none" stroke="black"/>"#
    );
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: String| {
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{text}</text>"#
        );
    };
    label(&mut s, left, bottom + 16.0, "start", fmt_tick(x0));
    label(&mut s, right, bottom + 16.0, "end", fmt_tick(x1));
    label(&mut s, WIDTH / 2.0, bottom + 32.0, "middle", escape(x_label));
    label(&mut s, left - 4.0, bottom, "end", fmt_tick(y0));
    label(&mut s, left - 4.0, top + 4.0, "end", fmt_tick(y1));
    if !pts.is_empty() {
        let mut d = String::new();
        for (x, y) in &pts {
            let _ = write!(d, "{:.2},{:.2} ", sx(*x), sy(*y));
        }
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
            d.trim_end()
        );
    }
    s.push_str("</svg>\n");
    s
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Write `E_m.svg`, `L_m.svg` and `ratio.svg` against `t`.
pub fn write_energy_charts(dir: &Path, rows: &[DiagnosticRow]) -> Result<()> {
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    type Column = fn(&DiagnosticRow) -> f64;
    let series: [(&str, Column); 3] = [("E_m", |r| r.e_m), ("L_m", |r| r.l_m), ("ratio", |r| r.ratio)];
    for (name, get) in series {
        let ys: Vec<f64> = rows.iter().map(get).collect();
        let path = dir.join(format!("{name}.svg"));
        fs::write(&path, line_chart(name, "t", &t, &ys))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
