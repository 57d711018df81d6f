//! Energy functionals of the symmetric system.
//!
//! With `S_k(f) = Σ_{j<=k} ||∂^j f||²`, the instantaneous quantities are
//!
//! ```text
//! e(t)   = (1+t)² [S_{m-1}(v_t) + S_{m-1}(v_x) + S_{m-1}(u_x)] + ||v||² + ||u||²
//! ell(t) = (1+t)  [S_{m-1}(v_t) + S_{m-1}(v_x) + S_{m-1}(u_x)] + ||u||² / (1+t)
//! ```
//!
//! and the functionals are `E_m(T) = sup_{t<T} sqrt(e(t))` and
//! `L_m(t) = ∫_0^t ell`. `v_t` is taken from the right-hand side, not from
//! time differences.

use serde::{Deserialize, Serialize};

use crate::dynamics::{DampingLaw, SymState, SymSystem};
use crate::error::{Error, Result};
use crate::grid::{derivatives_up_to, l2_norm_sq, MAX_SOBOLEV_ORDER};
use crate::transform::TransformParams;

pub const MAX_ENERGY_ORDER: usize = MAX_SOBOLEV_ORDER + 1;

/// `(e_inst, ell_inst)` for the full system.
pub fn energy_instant(s: &SymState, tp: &TransformParams, dl: &DampingLaw, m: usize) -> Result<(f64, f64)> {
    energy_instant_with(&SymSystem::new(*tp, *dl), s, m)
}

/// `(e_inst, ell_inst)` with `v_t` taken from `sys` (full or linearized).
pub fn energy_instant_with(sys: &SymSystem, s: &SymState, m: usize) -> Result<(f64, f64)> {
    if !(1..=MAX_ENERGY_ORDER).contains(&m) {
        return Err(Error::invalid(format!("energy order m must lie in 1..={MAX_ENERGY_ORDER}")));
    }
    let (vt, _) = sys.rhs(s)?;
    let vt_norm: f64 = derivatives_up_to(&vt, m - 1)?.iter().map(l2_norm_sq).sum();
    // derivatives 1..=m of v and u give S_{m-1}(v_x) and S_{m-1}(u_x)
    let dv = derivatives_up_to(&s.v, m)?;
    let du = derivatives_up_to(&s.u, m)?;
    let vx_norm: f64 = dv[1..].iter().map(l2_norm_sq).sum();
    let ux_norm: f64 = du[1..].iter().map(l2_norm_sq).sum();
    let (v0, u0) = (l2_norm_sq(&dv[0]), l2_norm_sq(&du[0]));

    let w = 1.0 + s.t;
    let weighted = vt_norm + vx_norm + ux_norm;
    Ok((w * w * weighted + v0 + u0, w * weighted + u0 / w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub e_inst: f64,
    pub ell_inst: f64,
    /// Running `E_m = sup sqrt(e_inst)`.
    pub e_m: f64,
    /// Running `L_m = ∫ ell_inst` (trapezoid).
    pub l_m: f64,
    /// `(E_m² + L_m) / E_m(0)²`, or 0 while `E_m(0) = 0`.
    pub ratio: f64,
}

/// Time series of the energy functionals.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyReport {
    pub m: usize,
    pub samples: Vec<EnergySample>,
}

impl EnergyReport {
    pub fn new(m: usize) -> Self {
        Self { m, samples: Vec::new() }
    }

    /// `E_m(0)²`, i.e. the first `e_inst`.
    pub fn initial_energy_sq(&self) -> Option<f64> {
        self.samples.first().map(|s| s.e_inst)
    }

    pub fn last(&self) -> Option<&EnergySample> {
        self.samples.last()
    }

    /// Append a sample at time `t`. Times must strictly increase.
    pub fn update_running(&mut self, t: f64, e_inst: f64, ell_inst: f64) -> Result<&EnergySample> {
        if !(e_inst >= 0.0 && e_inst.is_finite() && ell_inst >= 0.0 && ell_inst.is_finite()) {
            return Err(Error::NonFiniteValue { index: None });
        }
        let sample = match self.samples.last() {
            None => EnergySample { t, e_inst, ell_inst, e_m: e_inst.sqrt(), l_m: 0.0, ratio: 0.0 },
            Some(prev) => {
                if !(t > prev.t) {
                    return Err(Error::NonMonotoneTime { prev: prev.t, t });
                }
                EnergySample {
                    t,
                    e_inst,
                    ell_inst,
                    e_m: prev.e_m.max(e_inst.sqrt()),
                    l_m: prev.l_m + 0.5 * (t - prev.t) * (ell_inst + prev.ell_inst),
                    ratio: 0.0,
                }
            }
        };
        let e0 = self.initial_energy_sq().unwrap_or(sample.e_inst);
        let ratio = if e0 > 0.0 { (sample.e_m * sample.e_m + sample.l_m) / e0 } else { 0.0 };
        self.samples.push(EnergySample { ratio, ..sample });
        Ok(self.samples.last().expect("just pushed"))
    }

    pub fn sup_ratio(&self) -> f64 {
        self.samples.iter().map(|s| s.ratio).fold(0.0, f64::max)
    }

    /// Both running functionals are nondecreasing.
    pub fn is_monotone(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].e_m >= w[0].e_m && w[1].l_m >= w[0].l_m)
    }
}
