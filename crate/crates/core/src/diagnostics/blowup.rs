//! Breakdown detection.
//!
//! Checks run in a fixed order: non-finite values, vacuum (or `v` leaving the
//! invertible range of the transform), loss of hyperbolicity, and finally
//! gradient blowup.

use serde::{Deserialize, Serialize};

use crate::dynamics::{ConsState, SymState};
use crate::error::{Error, Result};
use crate::grid::derivative;
use crate::transform::{map_cons_to_sym, v_to_rho, TransformParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Trips when `max(|v_x|, |u_x|)` exceeds this.
    pub gradient: f64,
    /// Trips when the density drops below this.
    pub vacuum: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { gradient: 1e6, vacuum: 1e-8 }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.gradient > 0.0 && self.vacuum > 0.0) {
            return Err(Error::invalid("blowup thresholds must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum BlowupKind {
    #[default]
    None,
    GradientBlowup,
    VacuumApproach,
    NonFinite,
    HyperbolicityLoss,
}

impl std::fmt::Display for BlowupKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BlowupKind::None => "none",
            BlowupKind::GradientBlowup => "gradient_blowup",
            BlowupKind::VacuumApproach => "vacuum_approach",
            BlowupKind::NonFinite => "non_finite",
            BlowupKind::HyperbolicityLoss => "hyperbolicity_loss",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlowupStatus {
    pub kind: BlowupKind,
    pub t: Option<f64>,
    pub location: Option<usize>,
}

impl BlowupStatus {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn detected(kind: BlowupKind, t: f64, location: Option<usize>) -> Self {
        Self { kind, t: Some(t), location }
    }

    pub fn is_blowup(&self) -> bool {
        self.kind != BlowupKind::None
    }

    /// Classify a solver error raised at time `t`. Returns `None` for errors
    /// that are not a breakdown of the solution.
    pub fn from_error(err: &Error, t: f64) -> Option<Self> {
        let (kind, location) = match *err {
            Error::NonFiniteValue { index } => (BlowupKind::NonFinite, index),
            Error::NonPositiveDensity { index, .. } | Error::InvalidVRange { index, .. } => {
                (BlowupKind::VacuumApproach, index)
            }
            Error::HyperbolicityLoss { index, .. } => (BlowupKind::HyperbolicityLoss, index),
            _ => return None,
        };
        Some(Self::detected(kind, t, location))
    }
}

fn argmax_abs(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bi, bv), (i, &v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) })
}

pub fn detect_blowup_sym(s: &SymState, tp: &TransformParams, thr: &Thresholds) -> BlowupStatus {
    let t = s.t;
    if let Some(i) = s.v.first_non_finite().or_else(|| s.u.first_non_finite()) {
        return BlowupStatus::detected(BlowupKind::NonFinite, t, Some(i));
    }
    for (i, &v) in s.v.values().iter().enumerate() {
        match v_to_rho(tp, v) {
            Ok(rho) if rho >= thr.vacuum => {}
            _ => return BlowupStatus::detected(BlowupKind::VacuumApproach, t, Some(i)),
        }
    }
    if let Some(i) = s.v.values().iter().position(|&v| !(tp.wave_speed(v) > 0.0)) {
        return BlowupStatus::detected(BlowupKind::HyperbolicityLoss, t, Some(i));
    }
    let (Ok(vx), Ok(ux)) = (derivative(&s.v, 1), derivative(&s.u, 1)) else {
        return BlowupStatus::none();
    };
    let (iv, gv) = argmax_abs(vx.values());
    let (iu, gu) = argmax_abs(ux.values());
    let (i, g) = if gv >= gu { (iv, gv) } else { (iu, gu) };
    if g > thr.gradient {
        return BlowupStatus::detected(BlowupKind::GradientBlowup, t, Some(i));
    }
    BlowupStatus::none()
}

pub fn detect_blowup_cons(s: &ConsState, tp: &TransformParams, thr: &Thresholds) -> BlowupStatus {
    let t = s.t;
    if let Some(i) = s.rho.first_non_finite().or_else(|| s.m.first_non_finite()) {
        return BlowupStatus::detected(BlowupKind::NonFinite, t, Some(i));
    }
    if let Some(i) = s.rho.values().iter().position(|&r| !(r >= thr.vacuum)) {
        return BlowupStatus::detected(BlowupKind::VacuumApproach, t, Some(i));
    }
    match map_cons_to_sym(s, tp) {
        Ok(sym) => detect_blowup_sym(&sym, tp, thr),
        Err(e) => BlowupStatus::from_error(&e, t).unwrap_or_else(BlowupStatus::none),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::PressureLaw;
    use crate::grid::{Field, Grid1D};

    fn log_tp() -> TransformParams {
        TransformParams::new(PressureLaw::logarithmic(1.0, 0.0).unwrap())
    }

    fn grid() -> Grid1D {
        Grid1D::new(-1.0, 1.0, 32).unwrap()
    }

    #[test]
    fn background_is_clean() {
        let s = SymState::background(grid(), 0.0);
        assert_eq!(detect_blowup_sym(&s, &log_tp(), &Thresholds::default()), BlowupStatus::none());
        let c = ConsState::background(grid(), 0.0);
        assert!(!detect_blowup_cons(&c, &log_tp(), &Thresholds::default()).is_blowup());
    }

    #[test]
    fn nan_is_non_finite() {
        let mut u = vec![0.0; 32];
        u[11] = f64::NAN;
        let s = SymState::new_unchecked(Field::zeros(grid()), Field::from_raw(grid(), u), 2.0);
        let st = detect_blowup_sym(&s, &log_tp(), &Thresholds::default());
        assert_eq!(st, BlowupStatus::detected(BlowupKind::NonFinite, 2.0, Some(11)));
    }

    #[test]
    fn transform_range_boundary_is_vacuum() {
        let mut v = vec![0.0; 32];
        v[20] = 2.0; // 1 - v/(2 sigma) = 0
        let s = SymState::new(Field::new(grid(), v).unwrap(), Field::zeros(grid()), 0.0).unwrap();
        let st = detect_blowup_sym(&s, &log_tp(), &Thresholds::default());
        assert_eq!(st.kind, BlowupKind::VacuumApproach);
        assert_eq!(st.location, Some(20));
    }

    #[test]
    fn low_density_is_vacuum() {
        let mut rho = vec![1.0; 32];
        rho[3] = 1e-9;
        let c = ConsState::new(Field::new(grid(), rho).unwrap(), Field::zeros(grid()), 0.0).unwrap();
        let st = detect_blowup_cons(&c, &log_tp(), &Thresholds::default());
        assert_eq!(st.kind, BlowupKind::VacuumApproach);
        assert_eq!(st.location, Some(3));
    }

    #[test]
    fn hyperbolicity_loss_for_polytropic() {
        // A = 2: wave speed 1 + v vanishes at v = -1 while v_to_rho fails at the same point,
        // so vacuum is reported first.
        let tp = TransformParams::new(PressureLaw::polytropic(2.0, 1.0, 0.0).unwrap());
        let mut v = vec![0.0; 32];
        v[5] = -1.0;
        let s = SymState::new(Field::new(grid(), v).unwrap(), Field::zeros(grid()), 0.0).unwrap();
        assert_eq!(detect_blowup_sym(&s, &tp, &Thresholds::default()).kind, BlowupKind::VacuumApproach);
    }

    #[test]
    fn steep_gradient() {
        let g = grid();
        let u = Field::from_fn(g, |x| if x > 0.0 { 0.1 } else { 0.0 }).unwrap();
        let s = SymState::new(Field::zeros(g), u, 0.5).unwrap();
        let thr = Thresholds { gradient: 0.5, ..Default::default() };
        let st = detect_blowup_sym(&s, &log_tp(), &thr);
        assert_eq!(st.kind, BlowupKind::GradientBlowup);
        assert_eq!(st.t, Some(0.5));
        assert!(!detect_blowup_sym(&s, &log_tp(), &Thresholds::default()).is_blowup());
    }

    #[test]
    fn error_classification() {
        let e = Error::HyperbolicityLoss { speed: -1.0, index: Some(4) };
        assert_eq!(
            BlowupStatus::from_error(&e, 1.0),
            Some(BlowupStatus::detected(BlowupKind::HyperbolicityLoss, 1.0, Some(4)))
        );
        assert_eq!(BlowupStatus::from_error(&Error::GridMismatch, 1.0), None);
    }
}
