//! Run configuration files.
//!
//! A config is a TOML document with the sections `[law]`, `[damping]`,
//! `[initial]`, `[grid]`, `[solver]`, `[diagnostics]` and `[output]`. Every key
//! is optional; omitted keys take the defaults below.
//!
//! ```toml
//! [law]
//! kind = "logarithmic"     # polytropic | chaplygin | logarithmic
//! k1 = 1.0
//! k = 0.0
//! # a = 1.0  or  gamma = 2.0  (power-law branches)
//!
//! [damping]
//! mu = 3.0
//! lambda = 1.0
//!
//! [initial]
//! epsilon = 0.05
//! radius = 1.0
//! profile = "bump"          # zero | bump | bump_derivative
//! velocity_profile = "zero"
//! # profile_file = "rho0.txt"  two-column table, overrides `profile`
//!
//! [grid]
//! x_min = -60.0
//! x_max = 60.0
//! n = 2000
//!
//! [solver]
//! cfl = 0.4
//! t_end = 50.0
//! snapshot_stride = 10
//! limiter = "minmod"        # minmod | none
//! formulation = "symmetric" # symmetric | conservative
//! filter_strength = 0.5
//!
//! [diagnostics]
//! m = 3
//! gradient_threshold = 1e6
//! vacuum_threshold = 1e-8
//!
//! [output]
//! directory = "out"
//! csv = true
//! svg = true
//! ```

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use dampflow::dynamics::{Filter, DEFAULT_FILTER_STRENGTH};
use dampflow::grid::make_initial;
use dampflow::{
    DampingLaw, DiagnosticsConfig, Formulation, Grid1D, InitialData, LawKind, Limiter, PressureLaw, Problem,
    Profile, ProfileTable, SolverConfig, Thresholds, TransformParams,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LawSection {
    pub kind: LawKind,
    pub a: Option<f64>,
    pub gamma: Option<f64>,
    pub k1: f64,
    pub k: f64,
}

impl Default for LawSection {
    fn default() -> Self {
        Self { kind: LawKind::Logarithmic, a: None, gamma: None, k1: 1.0, k: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DampingSection {
    pub mu: f64,
    pub lambda: f64,
}

impl Default for DampingSection {
    fn default() -> Self {
        Self { mu: 3.0, lambda: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    Zero,
    #[default]
    Bump,
    BumpDerivative,
}

impl From<ProfileName> for Profile {
    fn from(p: ProfileName) -> Self {
        match p {
            ProfileName::Zero => Profile::Zero,
            ProfileName::Bump => Profile::Bump,
            ProfileName::BumpDerivative => Profile::BumpDerivative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    pub epsilon: f64,
    pub radius: f64,
    pub profile: ProfileName,
    pub velocity_profile: ProfileName,
    /// Two-column `x value` table for the density profile; relative paths
    /// resolve against the config file.
    pub profile_file: Option<PathBuf>,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            radius: 1.0,
            profile: ProfileName::Bump,
            velocity_profile: ProfileName::Zero,
            profile_file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { x_min: -60.0, x_max: 60.0, n: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub cfl: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub limiter: Limiter,
    pub formulation: Formulation,
    pub filter_strength: f64,
    /// Restrict the filter to this many nodes at each boundary.
    pub filter_layer: Option<usize>,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverConfig::default();
        Self {
            cfl: s.cfl,
            t_end: s.t_end,
            snapshot_stride: s.snapshot_stride,
            limiter: s.limiter,
            formulation: Formulation::Symmetric,
            filter_strength: DEFAULT_FILTER_STRENGTH,
            filter_layer: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsSection {
    pub m: usize,
    pub gradient_threshold: f64,
    pub vacuum_threshold: f64,
    pub support_tol: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        let d = DiagnosticsConfig::default();
        Self {
            m: d.m,
            gradient_threshold: d.thresholds.gradient,
            vacuum_threshold: d.thresholds.vacuum,
            support_tol: d.support_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub csv: bool,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), csv: true, svg: true }
    }
}

/// The config file as written, with defaults filled in.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawConfig {
    pub law: LawSection,
    pub damping: DampingSection,
    pub initial: InitialSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub diagnostics: DiagnosticsSection,
    pub output: OutputSection,
}

/// A validated configuration, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub problem: Problem,
    /// Non-fatal remarks about the parameter regime.
    pub notices: Vec<String>,
    base_dir: PathBuf,
}

impl RunConfig {
    pub fn output_dir(&self) -> &Path {
        &self.raw.output.directory
    }

    /// Rebuild after editing `raw`, e.g. for a sweep point.
    pub fn with_raw(&self, raw: RawConfig) -> Result<RunConfig> {
        RunConfig::from_raw(raw, &self.base_dir)
    }

    pub fn from_raw(raw: RawConfig, base_dir: &Path) -> Result<RunConfig> {
        let problem = build_problem(&raw, base_dir)?;
        let notices = regime_notices(&raw);
        Ok(RunConfig { raw, problem, notices, base_dir: base_dir.to_path_buf() })
    }
}

pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| anyhow!("parse error: {e}"))?;
    RunConfig::from_raw(raw, base_dir)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base).with_context(|| format!("loading {}", path.display()))
}

pub fn build_law(s: &LawSection) -> Result<PressureLaw> {
    let law = match (s.kind, s.a, s.gamma) {
        (_, Some(_), Some(_)) => bail!("validation error: give either law.a or law.gamma, not both"),
        (LawKind::Logarithmic, a, g) => {
            if g.is_some() || a.is_some_and(|a| a != -1.0) {
                bail!("validation error: the logarithmic law has fixed A = -1");
            }
            PressureLaw::logarithmic(s.k1, s.k)
        }
        (LawKind::Polytropic, Some(a), None) => PressureLaw::polytropic(a, s.k1, s.k),
        (LawKind::Polytropic, None, Some(g)) => PressureLaw::polytropic_gamma(g, s.k1, s.k),
        (LawKind::Chaplygin, Some(a), None) => PressureLaw::chaplygin(a, s.k1, s.k),
        (LawKind::Chaplygin, None, Some(g)) => PressureLaw::chaplygin_gamma(g, s.k1, s.k),
        (kind, None, None) => bail!("validation error: a {kind} law needs law.a or law.gamma"),
    };
    law.map_err(|e| anyhow!("validation error: {e}"))
}

fn build_problem(raw: &RawConfig, base_dir: &Path) -> Result<Problem> {
    let invalid = |e: dampflow::Error| anyhow!("validation error: {e}");
    let law = build_law(&raw.law)?;
    let damping = DampingLaw::new(raw.damping.mu, raw.damping.lambda).map_err(invalid)?;
    let rho_profile = match &raw.initial.profile_file {
        Some(p) => {
            let path = base_dir.join(p);
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading profile table {}", path.display()))?;
            Profile::Custom(ProfileTable::parse(&text).map_err(invalid)?)
        }
        None => raw.initial.profile.into(),
    };
    let initial = InitialData {
        epsilon: raw.initial.epsilon,
        radius: raw.initial.radius,
        rho_profile,
        u_profile: raw.initial.velocity_profile.into(),
    };
    let grid = Grid1D::new(raw.grid.x_min, raw.grid.x_max, raw.grid.n).map_err(invalid)?;
    let s = &raw.solver;
    let solver = SolverConfig {
        cfl: s.cfl,
        t_end: s.t_end,
        snapshot_stride: s.snapshot_stride,
        limiter: s.limiter,
        store_snapshots: false,
        filter: Filter { strength: s.filter_strength, layer: s.filter_layer },
    };
    let d = &raw.diagnostics;
    let diagnostics = DiagnosticsConfig {
        m: d.m,
        thresholds: Thresholds { gradient: d.gradient_threshold, vacuum: d.vacuum_threshold },
        support_tol: d.support_tol,
    };
    let problem = Problem { law, damping, initial, grid, solver, formulation: s.formulation, diagnostics };
    problem.validate().map_err(invalid)?;
    make_initial(&problem.initial, &problem.grid, &TransformParams::new(law)).map_err(invalid)?;
    Ok(problem)
}

fn regime_notices(raw: &RawConfig) -> Vec<String> {
    let mut out = Vec::new();
    if raw.diagnostics.m < 3 {
        out.push(format!(
            "energy order m = {} is below 3; the energy bound assumes m >= 3",
            raw.diagnostics.m
        ));
    }
    if raw.damping.lambda == 1.0 && raw.damping.mu <= 2.0 {
        out.push(format!(
            "mu = {} <= 2 with lambda = 1 is outside the small-data global existence regime (mu > 2)",
            raw.damping.mu
        ));
    }
    out
}
