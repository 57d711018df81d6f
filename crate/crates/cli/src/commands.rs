use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use dampflow::dynamics::run;
use dampflow::{LawKind, RunResult, RunStatus};

use crate::config::RunConfig;
use crate::output::{blowup_time, write_energy_charts, write_json, write_rows_csv, Summary, OUT_DIR_ENV};

/// Largest cartesian product a sweep will run.
pub const DEFAULT_MAX_RUNS: usize = 256;

/// Resolve the output directory: `explicit` if given, then the environment
/// override, then the config value.
pub fn resolve_out_dir(config: &RunConfig, explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => config.output_dir().to_path_buf(),
    }
}

/// Execute one run and write `run.csv`, `summary.json` and the charts into
/// `out_dir`. Returns the run and its exit code.
pub fn cmd_run(config: &RunConfig, out_dir: &Path) -> Result<(RunResult, i32)> {
    for n in &config.notices {
        log::warn!("{n}");
    }
    let res = run(&config.problem).context("setting up the run")?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    if config.raw.output.csv {
        write_rows_csv(&out_dir.join("run.csv"), &res.rows)?;
    }
    write_json(&out_dir.join("summary.json"), &Summary::new(&res, &config.raw, &config.notices))?;
    if config.raw.output.svg {
        write_energy_charts(out_dir, &res.rows)?;
    }
    let code = res.status.exit_code();
    Ok((res, code))
}

/// One swept parameter and its values, from `key=v1,v2,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: SweepKey,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKey {
    Mu,
    Lambda,
    Epsilon,
    /// `logarithmic`, or `polytropic:<gamma>` / `chaplygin:<gamma>`.
    Law,
}

impl SweepKey {
    fn name(self) -> &'static str {
        match self {
            SweepKey::Mu => "mu",
            SweepKey::Lambda => "lambda",
            SweepKey::Epsilon => "epsilon",
            SweepKey::Law => "law",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let Some((k, vs)) = s.split_once('=') else {
            bail!("validation error: expected key=v1,v2,... in {s:?}");
        };
        let key = match k.trim() {
            "mu" => SweepKey::Mu,
            "lambda" => SweepKey::Lambda,
            "epsilon" => SweepKey::Epsilon,
            "law" => SweepKey::Law,
            other => bail!("validation error: cannot sweep over {other:?} (mu, lambda, epsilon, law)"),
        };
        let values: Vec<String> =
            vs.split(',').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect();
        if values.is_empty() {
            bail!("validation error: empty value list for {}", key.name());
        }
        Ok(Axis { key, values })
    }
}

fn apply(config: &RunConfig, point: &[(SweepKey, &str)]) -> Result<RunConfig> {
    let mut raw = config.raw.clone();
    for &(key, v) in point {
        let num = || v.parse::<f64>().with_context(|| format!("{} value {v:?}", key.name()));
        match key {
            SweepKey::Mu => raw.damping.mu = num()?,
            SweepKey::Lambda => raw.damping.lambda = num()?,
            SweepKey::Epsilon => raw.initial.epsilon = num()?,
            SweepKey::Law => {
                let (kind, gamma) = match v.split_once(':') {
                    Some((k, g)) => (k, Some(g.parse::<f64>().with_context(|| format!("gamma in {v:?}"))?)),
                    None => (v, None),
                };
                raw.law.kind = match kind {
                    "logarithmic" => LawKind::Logarithmic,
                    "polytropic" => LawKind::Polytropic,
                    "chaplygin" => LawKind::Chaplygin,
                    other => bail!("unknown law {other:?}"),
                };
                raw.law.a = None;
                raw.law.gamma = gamma;
            }
        }
    }
    config.with_raw(raw)
}

/// Cartesian product of the axes; the last axis varies fastest.
pub fn sweep_points(axes: &[Axis]) -> Vec<Vec<(SweepKey, &str)>> {
    let mut points: Vec<Vec<(SweepKey, &str)>> = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((axis.key, v.as_str()));
                    q
                })
            })
            .collect();
    }
    points
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub run: usize,
    pub mu: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub law: String,
    pub status: String,
    pub blowup_time: f64,
    pub final_ratio: f64,
    pub sup_ratio: f64,
    pub fps_margin: f64,
    pub steps: usize,
    pub message: String,
}

fn law_label(config: &RunConfig) -> String {
    let law = &config.problem.law;
    match law.gamma() {
        Some(g) => format!("{}:{g}", law.kind()),
        None => law.kind().to_string(),
    }
}

fn sweep_one(base: &RunConfig, index: usize, point: &[(SweepKey, &str)]) -> SweepRow {
    let mut row = SweepRow {
        run: index,
        mu: base.raw.damping.mu,
        lambda: base.raw.damping.lambda,
        epsilon: base.raw.initial.epsilon,
        law: law_label(base),
        status: String::new(),
        blowup_time: -1.0,
        final_ratio: f64::NAN,
        sup_ratio: f64::NAN,
        fps_margin: f64::NAN,
        steps: 0,
        message: String::new(),
    };
    for &(key, v) in point {
        match key {
            SweepKey::Mu => row.mu = v.parse().unwrap_or(f64::NAN),
            SweepKey::Lambda => row.lambda = v.parse().unwrap_or(f64::NAN),
            SweepKey::Epsilon => row.epsilon = v.parse().unwrap_or(f64::NAN),
            SweepKey::Law => row.law = v.to_string(),
        }
    }
    let outcome = apply(base, point).and_then(|cfg| {
        row.law = law_label(&cfg);
        Ok(run(&cfg.problem)?)
    });
    match outcome {
        Ok(res) => {
            row.status = res.status.label().to_string();
            row.blowup_time = blowup_time(&res.status);
            row.final_ratio = res.energy.last().map_or(0.0, |s| s.ratio);
            row.sup_ratio = res.energy.sup_ratio();
            row.fps_margin = res.fps_margin;
            row.steps = res.steps;
            if let RunStatus::Error { message } = &res.status {
                row.message = message.clone();
            }
        }
        Err(e) => {
            row.status = RunStatus::Error { message: String::new() }.label().to_string();
            row.message = format!("{e:#}");
        }
    }
    row
}

/// Run every point of the sweep and write `sweep.csv`. Rows follow the
/// parameter order regardless of completion order.
pub fn cmd_sweep(
    config: &RunConfig,
    axes: &[Axis],
    out_dir: &Path,
    jobs: Option<usize>,
    max_runs: usize,
) -> Result<(Vec<SweepRow>, i32)> {
    if axes.is_empty() || axes.iter().any(|a| a.values.is_empty()) {
        bail!("validation error: sweep needs at least one non-empty --vary list");
    }
    let points = sweep_points(axes);
    if points.len() > max_runs {
        bail!("validation error: sweep has {} runs, cap is {max_runs}", points.len());
    }
    for n in &config.notices {
        log::warn!("{n}");
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().context("building worker pool")?;
    let rows: Vec<SweepRow> =
        pool.install(|| points.par_iter().enumerate().map(|(i, p)| sweep_one(config, i, p)).collect());

    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let path = out_dir.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;

    let error = RunStatus::Error { message: String::new() }.label();
    let blowup = RunStatus::BlowupDetected { t: 0.0 }.label();
    let code = if rows.iter().any(|r| r.status == error) {
        1
    } else if rows.iter().any(|r| r.status == blowup) {
        2
    } else {
        0
    };
    Ok((rows, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        let a: Axis = "mu=0, 1,3".parse().unwrap();
        assert_eq!(a.key, SweepKey::Mu);
        assert_eq!(a.values, ["0", "1", "3"]);
        assert!("mu=".parse::<Axis>().unwrap_err().to_string().starts_with("validation error"));
        assert!("mu".parse::<Axis>().is_err());
        assert!("cfl=0.1".parse::<Axis>().is_err());
    }

    #[test]
    fn product_order_is_row_major() {
        let axes: Vec<Axis> = vec!["mu=1,2".parse().unwrap(), "epsilon=a,b,c".parse().unwrap()];
        let pts = sweep_points(&axes);
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1], vec![(SweepKey::Mu, "1"), (SweepKey::Epsilon, "b")]);
        assert_eq!(pts[3], vec![(SweepKey::Mu, "2"), (SweepKey::Epsilon, "a")]);
    }
}
