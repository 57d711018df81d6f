//! Damped wave form of the symmetric system.
//!
//! Eliminating `u` gives
//!
//! ```text
//! v_tt - sigma² v_xx + s(t) v_t = Q1 + Q2 + Q3
//! Q1 = -s(t) N1,  Q2 = -∂_t N1,  Q3 = sigma ∂_x N2
//! N1 = u v_x + (A/2) v u_x,  N2 = u u_x + (A/2) v v_x
//! ```
//!
//! Time derivatives are centred differences over a uniformly spaced triple of
//! states.

use crate::dynamics::{DampingLaw, SymState};
use crate::error::{Error, Result};
use crate::grid::{derivative, l2_norm_sq, Field};
use crate::transform::TransformParams;

/// Relative tolerance on the spacing mismatch of a triple.
const UNIFORM_RTOL: f64 = 1e-9;

/// Three states at `t - dt`, `t`, `t + dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triple {
    prev: SymState,
    mid: SymState,
    next: SymState,
    dt: f64,
}

impl Triple {
    pub fn new(prev: SymState, mid: SymState, next: SymState) -> Result<Self> {
        for s in [&mid, &next] {
            s.v.same_grid(&prev.v)?;
            s.u.same_grid(&prev.v)?;
        }
        prev.u.same_grid(&prev.v)?;
        let (h0, h1) = (mid.t - prev.t, next.t - mid.t);
        if !(h0 > 0.0 && h1 > 0.0) || (h1 - h0).abs() > UNIFORM_RTOL * h0.max(h1) {
            return Err(Error::NonUniformTriple { t0: prev.t, t1: mid.t, t2: next.t });
        }
        let dt = 0.5 * (next.t - prev.t);
        Ok(Self { prev, mid, next, dt })
    }

    pub fn prev(&self) -> &SymState {
        &self.prev
    }

    pub fn mid(&self) -> &SymState {
        &self.mid
    }

    pub fn next(&self) -> &SymState {
        &self.next
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Multiply all six fields by `a`.
    pub fn scaled(&self, a: f64) -> Triple {
        let sc = |s: &SymState| SymState::new_unchecked(s.v.scaled(a), s.u.scaled(a), s.t);
        Triple { prev: sc(&self.prev), mid: sc(&self.mid), next: sc(&self.next), dt: self.dt }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QTerms {
    pub q1: Field,
    pub q2: Field,
    pub q3: Field,
    pub q: Field,
}

/// `u v_x + (A/2) v u_x`.
fn bracket_n1(s: &SymState, half_a: f64) -> Result<Field> {
    let vx = derivative(&s.v, 1)?;
    let ux = derivative(&s.u, 1)?;
    let vals = (0..s.v.len())
        .map(|i| s.u.values()[i] * vx.values()[i] + half_a * s.v.values()[i] * ux.values()[i])
        .collect();
    Field::new(*s.v.grid(), vals)
}

/// `u u_x + (A/2) v v_x`.
fn bracket_n2(s: &SymState, half_a: f64) -> Result<Field> {
    let vx = derivative(&s.v, 1)?;
    let ux = derivative(&s.u, 1)?;
    let vals = (0..s.v.len())
        .map(|i| s.u.values()[i] * ux.values()[i] + half_a * s.v.values()[i] * vx.values()[i])
        .collect();
    Field::new(*s.v.grid(), vals)
}

/// Source terms of the damped wave equation at the middle time of `tr`.
pub fn compute_q(tr: &Triple, tp: &TransformParams, dl: &DampingLaw) -> Result<QTerms> {
    let half_a = 0.5 * tp.exponent();
    let damp = dl.rate(tr.mid.t);
    let n1_mid = bracket_n1(&tr.mid, half_a)?;
    let n1_prev = bracket_n1(&tr.prev, half_a)?;
    let n1_next = bracket_n1(&tr.next, half_a)?;
    let n2_x = derivative(&bracket_n2(&tr.mid, half_a)?, 1)?;

    let q1 = n1_mid.scaled(-damp);
    let q2 = n1_next.zip_map(&n1_prev, |a, b| -(a - b) / (2.0 * tr.dt))?;
    let q3 = n2_x.scaled(tp.sigma());
    let q = q1.zip_map(&q2, |a, b| a + b)?.zip_map(&q3, |a, b| a + b)?;
    Ok(QTerms { q1, q2, q3, q })
}

/// L² norm of `D_tt v - sigma² v_xx + s(t) D_t v - Q` at the middle time.
pub fn wave_residual(tr: &Triple, tp: &TransformParams, dl: &DampingLaw) -> Result<f64> {
    let q = compute_q(tr, tp, dl)?.q;
    residual_against(tr, tp, dl, Some(&q))
}

/// Residual of the linear damped wave equation `v_tt - sigma² v_xx + s(t) v_t = 0`.
pub fn linear_wave_residual(tr: &Triple, tp: &TransformParams, dl: &DampingLaw) -> Result<f64> {
    residual_against(tr, tp, dl, None)
}

fn residual_against(tr: &Triple, tp: &TransformParams, dl: &DampingLaw, q: Option<&Field>) -> Result<f64> {
    let vxx = derivative(&tr.mid.v, 2)?;
    let (vm, v0, vp) = (tr.prev.v.values(), tr.mid.v.values(), tr.next.v.values());
    let (dt, sigma_sq, damp) = (tr.dt, tp.sigma() * tp.sigma(), dl.rate(tr.mid.t));
    let res: Vec<f64> = (0..v0.len())
        .map(|i| {
            let v_tt = (vp[i] - 2.0 * v0[i] + vm[i]) / (dt * dt);
            let v_t = (vp[i] - vm[i]) / (2.0 * dt);
            v_tt - sigma_sq * vxx.values()[i] + damp * v_t - q.map_or(0.0, |q| q.values()[i])
        })
        .collect();
    Ok(l2_norm_sq(&Field::new(*tr.mid.v.grid(), res)?).sqrt())
}
