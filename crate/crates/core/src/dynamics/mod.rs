//! Method-of-lines evolution of the damped Euler system in two formulations.
//!
//! * [`Formulation::Symmetric`] evolves `(v, u)` with fourth-order central
//!   differences and no artificial dissipation. It targets the smooth,
//!   small-data regime.
//! * [`Formulation::Conservative`] evolves `(rho, m = rho u)` with a
//!   finite-volume Rusanov flux and MUSCL reconstruction, so that large data
//!   can steepen into shocks without NaN cascades.
//!
//! Both use classic RK4 in time. The damping `s(t) rho u` is part of the
//! right-hand side, not operator-split.

mod conservative;
mod integrator;
mod run;
mod symmetric;

use serde::{Deserialize, Serialize};

pub use conservative::{cons_cfl_dt, cons_rhs, ConsSystem, Limiter};
pub use integrator::{rk4_step, OdeState};
pub use run::{run, run_with_observer, Observer, Problem, RunResult, RunStatus, StepInfo};
pub use symmetric::{
    sym_cfl_dt, sym_rhs, uniform_triple, Filter, SymSystem, Terms, DEFAULT_FILTER_STRENGTH,
    MAX_FILTER_STRENGTH,
};

use crate::error::{Error, Result};
use crate::grid::Field;

/// Time-dependent friction coefficient `s(t) = mu / (1 + t)^lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingLaw {
    mu: f64,
    lambda: f64,
}

impl DampingLaw {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::invalid(format!("damping strength mu must be >= 0, got {mu}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("decay exponent lambda must be >= 0, got {lambda}")));
        }
        Ok(Self { mu, lambda })
    }

    /// `mu / (1 + t)`.
    pub fn scale_invariant(mu: f64) -> Result<Self> {
        Self::new(mu, 1.0)
    }

    pub fn undamped() -> Self {
        Self { mu: 0.0, lambda: 1.0 }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn rate(&self, t: f64) -> f64 {
        let s = if self.lambda == 1.0 { self.mu / (1.0 + t) } else { self.mu / (1.0 + t).powf(self.lambda) };
        if cfg!(feature = "mutant-damping-sign") {
            -s
        } else {
            s
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    #[default]
    Symmetric,
    Conservative,
}

/// State of the symmetric system: `v`, velocity `u`, time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymState {
    pub v: Field,
    pub u: Field,
    pub t: f64,
}

impl SymState {
    pub fn new(v: Field, u: Field, t: f64) -> Result<Self> {
        v.same_grid(&u)?;
        check_time(t)?;
        Ok(Self { v, u, t })
    }

    pub fn new_unchecked(v: Field, u: Field, t: f64) -> Self {
        Self { v, u, t }
    }

    /// The rest state `v = u = 0`.
    pub fn background(grid: crate::grid::Grid1D, t: f64) -> Self {
        Self { v: Field::zeros(grid), u: Field::zeros(grid), t }
    }
}

/// State of the conservative system: density, momentum `m = rho u`, time.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsState {
    pub rho: Field,
    pub m: Field,
    pub t: f64,
}

impl ConsState {
    pub fn new(rho: Field, m: Field, t: f64) -> Result<Self> {
        rho.same_grid(&m)?;
        check_time(t)?;
        check_positive_density(&rho)?;
        Ok(Self { rho, m, t })
    }

    pub fn background(grid: crate::grid::Grid1D, t: f64) -> Self {
        Self { rho: Field::constant(grid, 1.0), m: Field::zeros(grid), t }
    }

    /// Total mass `Σ rho_i dx` over the finite-volume cells.
    pub fn mass(&self) -> f64 {
        self.rho.values().iter().sum::<f64>() * self.rho.grid().dx()
    }
}

pub(crate) fn check_positive_density(rho: &Field) -> Result<()> {
    match rho.values().iter().position(|&r| !(r > 0.0)) {
        Some(i) => Err(Error::NonPositiveDensity { rho: rho.values()[i], index: Some(i) }),
        None => Ok(()),
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("time must be finite and >= 0, got {t}")))
    }
}

/// Time-stepping controls shared by both formulations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub cfl: f64,
    pub t_end: f64,
    /// Steps between stored snapshots and diagnostic rows. The time step is
    /// re-evaluated only at these block boundaries, so steps inside a block
    /// are uniform.
    pub snapshot_stride: usize,
    pub limiter: Limiter,
    /// Keep full field snapshots in the [`RunResult`]; diagnostics rows are
    /// always recorded.
    pub store_snapshots: bool,
    /// High-wavenumber filter for the symmetric solver.
    pub filter: Filter,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            t_end: 50.0,
            snapshot_stride: 10,
            limiter: Limiter::Minmod,
            store_snapshots: true,
            filter: Filter::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::invalid(format!("cfl must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        self.filter.validate()?;
        if self.snapshot_stride == 0 {
            return Err(Error::invalid("snapshot_stride must be >= 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn damping_rate() {
        let d = DampingLaw::scale_invariant(3.0).unwrap();
        assert_eq!(d.rate(0.0), 3.0);
        assert_eq!(d.rate(2.0), 1.0);
        let d = DampingLaw::new(2.0, 2.0).unwrap();
        assert_eq!(d.rate(1.0), 0.5);
        assert_eq!(DampingLaw::undamped().rate(5.0), 0.0);
        assert!(DampingLaw::new(-1.0, 1.0).is_err());
        assert!(DampingLaw::new(1.0, -0.1).is_err());
    }

    #[test]
    fn solver_config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig { cfl: 1.0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { cfl: 0.0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { snapshot_stride: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn cons_state_rejects_vacuum() {
        let g = crate::grid::Grid1D::new(0.0, 1.0, 16).unwrap();
        let mut rho = vec![1.0; 16];
        rho[3] = 0.0;
        let err = ConsState::new(Field::new(g, rho).unwrap(), Field::zeros(g), 0.0).unwrap_err();
        assert_eq!(err, Error::NonPositiveDensity { rho: 0.0, index: Some(3) });
    }
}
