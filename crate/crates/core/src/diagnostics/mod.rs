//! Diagnostics evaluated along a trajectory of the symmetric system.
//!
//! * [`energy`]: the weighted Sobolev energy `E_m` (running supremum) and the
//!   space-time dissipation integral `L_m`.
//! * [`wave`]: the source `Q = Q1 + Q2 + Q3` of the damped wave equation
//!   satisfied by `v`, and the residual of that equation on a time triple.
//! * [`fps`]: support radius and the propagation-cone margin.
//! * [`blowup`]: detection of gradient blowup, vacuum and loss of
//!   hyperbolicity.

pub mod blowup;
pub mod energy;
pub mod fps;
pub mod wave;

use serde::{Deserialize, Serialize};

pub use blowup::{detect_blowup_cons, detect_blowup_sym, BlowupKind, BlowupStatus, Thresholds};
pub use energy::{energy_instant, energy_instant_with, EnergyReport, EnergySample};
pub use fps::{c_max, fps_margin, fps_margin_with, support_radius, FpsTracker};
pub use wave::{compute_q, linear_wave_residual, wave_residual, QTerms, Triple};

use crate::error::{Error, Result};

/// Tunables for the per-run diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    /// Sobolev order `m` of the energy functionals.
    pub m: usize,
    pub thresholds: Thresholds,
    /// Magnitude below which a node counts as outside the support.
    pub support_tol: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self { m: 3, thresholds: Thresholds::default(), support_tol: 1e-12 }
    }
}

impl DiagnosticsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=energy::MAX_ENERGY_ORDER).contains(&self.m) {
            return Err(Error::invalid(format!(
                "energy order m must lie in 1..={}, got {}",
                energy::MAX_ENERGY_ORDER,
                self.m
            )));
        }
        if !(self.support_tol > 0.0) {
            return Err(Error::invalid("support tolerance must be > 0"));
        }
        self.thresholds.validate()
    }
}

/// One row of the per-run diagnostics table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub t: f64,
    pub e_inst: f64,
    pub ell_inst: f64,
    #[serde(rename = "E_m")]
    pub e_m: f64,
    #[serde(rename = "L_m")]
    pub l_m: f64,
    pub ratio: f64,
    pub max_abs_vx: f64,
    pub max_abs_ux: f64,
    pub support_radius_v: f64,
    pub support_radius_u: f64,
    pub c_max: f64,
    pub dt: f64,
}

/// Column order of [`DiagnosticRow`] as written to CSV.
pub const ROW_COLUMNS: [&str; 12] = [
    "t",
    "e_inst",
    "ell_inst",
    "E_m",
    "L_m",
    "ratio",
    "max_abs_vx",
    "max_abs_ux",
    "support_radius_v",
    "support_radius_u",
    "c_max",
    "dt",
];
