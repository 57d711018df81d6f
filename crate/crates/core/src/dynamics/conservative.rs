//! Finite-volume discretization of
//!
//! ```text
//! rho_t + m_x = 0
//! m_t + (m^2/rho + p(rho))_x + s(t) m = 0
//! ```
//!
//! Cells are centred on the grid nodes with width `dx`. Interface states come
//! from a piecewise-linear MUSCL reconstruction of `(rho, m)`; the interface
//! flux is Rusanov (local Lax-Friedrichs). Two ghost cells on each side copy
//! the edge cell, so x-uniform states are preserved exactly.

use serde::{Deserialize, Serialize};

use super::{check_positive_density, rk4_step, ConsState, DampingLaw};
use crate::eos::PressureLaw;
use crate::error::{Error, Result};
use crate::grid::Field;

/// Slope used in the MUSCL reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Limiter {
    /// Unlimited centred slope `(W[i+1] - W[i-1]) / 2`. Second order on smooth
    /// data, not TVD.
    None,
    /// `minmod(W[i] - W[i-1], W[i+1] - W[i])`.
    #[default]
    Minmod,
}

impl Limiter {
    #[inline]
    fn slope(self, back: f64, fwd: f64) -> f64 {
        match self {
            Limiter::None => 0.5 * (back + fwd),
            Limiter::Minmod => {
                if back * fwd <= 0.0 {
                    0.0
                } else if back.abs() < fwd.abs() {
                    back
                } else {
                    fwd
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsSystem {
    pub law: PressureLaw,
    pub damping: DampingLaw,
    pub limiter: Limiter,
}

#[derive(Clone, Copy)]
struct Cell {
    rho: f64,
    m: f64,
}

impl ConsSystem {
    pub fn new(law: PressureLaw, damping: DampingLaw, limiter: Limiter) -> Self {
        Self { law, damping, limiter }
    }

    fn flux(&self, w: Cell) -> Result<(f64, f64, f64)> {
        let u = w.m / w.rho;
        let p = self.law.pressure(w.rho)?;
        let c = self.law.sound_speed(w.rho)?;
        Ok((w.m, w.m * u + p, u.abs() + c))
    }

    fn rusanov(&self, l: Cell, r: Cell) -> Result<(f64, f64)> {
        let (fl0, fl1, al) = self.flux(l)?;
        let (fr0, fr1, ar) = self.flux(r)?;
        let a = al.max(ar);
        Ok((0.5 * (fl0 + fr0) - 0.5 * a * (r.rho - l.rho), 0.5 * (fl1 + fr1) - 0.5 * a * (r.m - l.m)))
    }

    pub fn rhs(&self, s: &ConsState) -> Result<(Field, Field)> {
        s.rho.same_grid(&s.m)?;
        check_positive_density(&s.rho)?;
        let (rho, m) = (s.rho.values(), s.m.values());
        let n = rho.len();
        let dx = s.rho.grid().dx();

        // extended cell j corresponds to node j - 2
        let cell = |j: usize| {
            let i = j.saturating_sub(2).min(n - 1);
            Cell { rho: rho[i], m: m[i] }
        };
        let ext: Vec<Cell> = (0..n + 4).map(cell).collect();
        // slopes for extended cells 1..=n+2
        let mut slope = vec![Cell { rho: 0.0, m: 0.0 }; n + 4];
        for j in 1..n + 3 {
            slope[j] = Cell {
                rho: self.limiter.slope(ext[j].rho - ext[j - 1].rho, ext[j + 1].rho - ext[j].rho),
                m: self.limiter.slope(ext[j].m - ext[j - 1].m, ext[j + 1].m - ext[j].m),
            };
        }
        // face k sits between extended cells k+1 and k+2, i.e. left of node k
        let mut flux = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let (a, b) = (k + 1, k + 2);
            let mut l = Cell { rho: ext[a].rho + 0.5 * slope[a].rho, m: ext[a].m + 0.5 * slope[a].m };
            let mut r = Cell { rho: ext[b].rho - 0.5 * slope[b].rho, m: ext[b].m - 0.5 * slope[b].m };
            if !(l.rho > 0.0 && r.rho > 0.0) {
                l = ext[a];
                r = ext[b];
            }
            flux.push(self.rusanov(l, r).map_err(|e| e.at_node(k.min(n - 1)))?);
        }

        let damp = self.damping.rate(s.t);
        let mut drho = Vec::with_capacity(n);
        let mut dm = Vec::with_capacity(n);
        for i in 0..n {
            drho.push(-(flux[i + 1].0 - flux[i].0) / dx);
            dm.push(-(flux[i + 1].1 - flux[i].1) / dx - damp * m[i]);
        }
        let grid = *s.rho.grid();
        let (drho, dm) = (Field::from_raw(grid, drho), Field::from_raw(grid, dm));
        if let Some(i) = drho.first_non_finite().or_else(|| dm.first_non_finite()) {
            return Err(Error::NonFiniteValue { index: Some(i) });
        }
        Ok((drho, dm))
    }

    /// `max_i (|u_i| + c(rho_i))`.
    pub fn max_speed(&self, s: &ConsState) -> Result<f64> {
        let mut c_max: f64 = 0.0;
        for (i, (&rho, &m)) in s.rho.values().iter().zip(s.m.values()).enumerate() {
            let c = self.law.sound_speed(rho).map_err(|e| e.at_node(i))?;
            c_max = c_max.max((m / rho).abs() + c);
        }
        Ok(c_max)
    }

    pub fn cfl_dt(&self, s: &ConsState, cfl: f64) -> Result<f64> {
        Ok(cfl * s.rho.grid().dx() / self.max_speed(s)?)
    }

    pub fn step(&self, s: &ConsState, dt: f64) -> Result<ConsState> {
        let next = rk4_step(s, dt, |st: &ConsState| self.rhs(st))?;
        check_positive_density(&next.rho)?;
        Ok(next)
    }

    pub fn advance_to(&self, s: &ConsState, t_end: f64, cfl: f64) -> Result<ConsState> {
        let mut s = s.clone();
        while s.t < t_end {
            let dt = self.cfl_dt(&s, cfl)?.min(t_end - s.t);
            s = self.step(&s, dt)?;
            if t_end - s.t < 1e-12 * t_end.max(1.0) {
                s.t = t_end;
            }
        }
        Ok(s)
    }
}

/// Right-hand side of the conservative system.
pub fn cons_rhs(
    s: &ConsState,
    law: &PressureLaw,
    dl: &DampingLaw,
    limiter: Limiter,
) -> Result<(Field, Field)> {
    ConsSystem::new(*law, *dl, limiter).rhs(s)
}

pub fn cons_cfl_dt(s: &ConsState, law: &PressureLaw, cfl: f64) -> Result<f64> {
    ConsSystem::new(*law, DampingLaw::undamped(), Limiter::Minmod).cfl_dt(s, cfl)
}
