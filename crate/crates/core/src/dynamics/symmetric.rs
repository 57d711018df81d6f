use serde::{Deserialize, Serialize};

use super::{rk4_step, DampingLaw, SymState};
use crate::diagnostics::Triple;
use crate::error::{Error, Result};
use crate::grid::{derivative, Field};
use crate::transform::TransformParams;

/// Which terms of the symmetric system are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Terms {
    #[default]
    Full,
    /// Drop the quadratic terms: `v_t = -sigma u_x`, `u_t = -sigma v_x - s(t) u`.
    Linear,
}

/// The symmetric `(v, u)` system
///
/// ```text
/// v_t + sigma u_x          = -u v_x - (A/2) v u_x
/// u_t + sigma v_x + s(t) u = -u u_x - (A/2) v v_x
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymSystem {
    pub tp: TransformParams,
    pub damping: DampingLaw,
    pub terms: Terms,
    pub filter: Filter,
}

/// Sixth-difference filter `+strength * sigma / (64 dx) * Δ⁶ f` added to both
/// equations, either on the whole grid or in a layer next to each end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Filter {
    /// 0 disables the filter.
    pub strength: f64,
    /// Width of the boundary layer in nodes; `None` filters every node.
    /// Inside the layer the strength ramps quadratically from 0 to full at
    /// the boundary.
    pub layer: Option<usize>,
}

impl Default for Filter {
    fn default() -> Self {
        Self { strength: DEFAULT_FILTER_STRENGTH, layer: None }
    }
}

pub const DEFAULT_FILTER_STRENGTH: f64 = 0.5;
/// Largest strength that keeps the filtered operator inside the RK4
/// stability region for every `cfl < 1`.
pub const MAX_FILTER_STRENGTH: f64 = 2.5;

impl Filter {
    pub fn off() -> Self {
        Self { strength: 0.0, layer: None }
    }

    pub fn everywhere(strength: f64) -> Self {
        Self { strength, layer: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strength >= 0.0 && self.strength <= MAX_FILTER_STRENGTH) {
            return Err(Error::invalid(format!(
                "filter strength must lie in [0, {MAX_FILTER_STRENGTH}], got {}",
                self.strength
            )));
        }
        if self.layer == Some(0) {
            return Err(Error::invalid("filter layer must be at least one node wide"));
        }
        Ok(())
    }

    fn weight(&self, i: usize, n: usize) -> f64 {
        match self.layer {
            None => 1.0,
            Some(w) => {
                let d = i.min(n - 1 - i);
                if d >= w {
                    0.0
                } else {
                    let r = (w - d) as f64 / w as f64;
                    r * r
                }
            }
        }
    }

    /// `out_i += kappa * w_i * (f_{i-3} - 6 f_{i-2} + 15 f_{i-1} - 20 f_i + 15 f_{i+1} - 6 f_{i+2} + f_{i+3})`
    /// on nodes at least three away from either end.
    fn apply(&self, out: &mut [f64], f: &[f64], kappa: f64) {
        const W: [f64; 7] = [1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0];
        let n = f.len();
        for i in 3..n.saturating_sub(3) {
            let w = self.weight(i, n);
            if w > 0.0 {
                // weights sum to zero; differencing against f_i keeps constants exact
                let d: f64 = W.iter().zip(&f[i - 3..=i + 3]).map(|(c, x)| c * (x - f[i])).sum();
                out[i] += kappa * w * d;
            }
        }
    }
}

impl SymSystem {
    pub fn new(tp: TransformParams, damping: DampingLaw) -> Self {
        Self { tp, damping, terms: Terms::Full, filter: Filter::off() }
    }

    pub fn linearized(tp: TransformParams, damping: DampingLaw) -> Self {
        Self { tp, damping, terms: Terms::Linear, filter: Filter::off() }
    }

    pub fn with_filter(self, filter: Filter) -> Self {
        Self { filter, ..self }
    }

    pub fn rhs(&self, s: &SymState) -> Result<(Field, Field)> {
        s.v.same_grid(&s.u)?;
        if self.terms == Terms::Full {
            check_hyperbolic(&s.v, &self.tp)?;
        }
        let vx = derivative(&s.v, 1)?;
        let ux = derivative(&s.u, 1)?;
        let sigma = self.tp.sigma();
        let half_a = 0.5 * self.tp.exponent();
        let damp = self.damping.rate(s.t);
        let (v, u) = (s.v.values(), s.u.values());
        let (vx, ux) = (vx.values(), ux.values());
        let n = v.len();
        let mut dv = Vec::with_capacity(n);
        let mut du = Vec::with_capacity(n);
        match self.terms {
            Terms::Full => {
                for i in 0..n {
                    dv.push(-sigma * ux[i] - u[i] * vx[i] - half_a * v[i] * ux[i]);
                    du.push(-sigma * vx[i] - damp * u[i] - u[i] * ux[i] - half_a * v[i] * vx[i]);
                }
            }
            Terms::Linear => {
                for i in 0..n {
                    dv.push(-sigma * ux[i]);
                    du.push(-sigma * vx[i] - damp * u[i]);
                }
            }
        }
        if self.filter.strength > 0.0 {
            let kappa = self.filter.strength * sigma / (64.0 * s.v.grid().dx());
            self.filter.apply(&mut dv, v, kappa);
            self.filter.apply(&mut du, u, kappa);
        }
        let grid = *s.v.grid();
        let (dv, du) = (Field::from_raw(grid, dv), Field::from_raw(grid, du));
        if let Some(i) = dv.first_non_finite().or_else(|| du.first_non_finite()) {
            return Err(Error::NonFiniteValue { index: Some(i) });
        }
        Ok((dv, du))
    }

    /// `max_i (|u_i| + sigma + (A/2) v_i)`.
    pub fn max_speed(&self, s: &SymState) -> Result<f64> {
        let mut c_max: f64 = 0.0;
        for (i, (&v, &u)) in s.v.values().iter().zip(s.u.values()).enumerate() {
            let c = self.tp.wave_speed(v);
            if !(c > 0.0) {
                return Err(Error::HyperbolicityLoss { speed: c, index: Some(i) });
            }
            c_max = c_max.max(u.abs() + c);
        }
        Ok(c_max)
    }

    pub fn cfl_dt(&self, s: &SymState, cfl: f64) -> Result<f64> {
        Ok(cfl * s.v.grid().dx() / self.max_speed(s)?)
    }

    pub fn step(&self, s: &SymState, dt: f64) -> Result<SymState> {
        rk4_step(s, dt, |st: &SymState| self.rhs(st))
    }

    /// Advance to exactly `t_end` with CFL-limited steps.
    pub fn advance_to(&self, s: &SymState, t_end: f64, cfl: f64) -> Result<SymState> {
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

fn check_hyperbolic(v: &Field, tp: &TransformParams) -> Result<()> {
    for (i, &vi) in v.values().iter().enumerate() {
        let c = tp.wave_speed(vi);
        if !(c > 0.0) {
            return Err(Error::HyperbolicityLoss { speed: c, index: Some(i) });
        }
    }
    Ok(())
}

/// Right-hand side of the full symmetric system.
pub fn sym_rhs(s: &SymState, tp: &TransformParams, dl: &DampingLaw) -> Result<(Field, Field)> {
    SymSystem::new(*tp, *dl).rhs(s)
}

pub fn sym_cfl_dt(s: &SymState, tp: &TransformParams, cfl: f64) -> Result<f64> {
    SymSystem::new(*tp, DampingLaw::undamped()).cfl_dt(s, cfl)
}

/// Evolve `s` to `t_center - dt` with CFL-limited steps, then take two
/// steps of exactly `dt`, returning the uniformly spaced triple.
pub fn uniform_triple(sys: &SymSystem, s: &SymState, t_center: f64, dt: f64, cfl: f64) -> Result<Triple> {
    if !(dt > 0.0 && t_center - dt >= s.t) {
        return Err(Error::invalid(format!(
            "cannot centre a triple of spacing {dt} at t = {t_center} from t = {}",
            s.t
        )));
    }
    let prev = sys.advance_to(s, t_center - dt, cfl)?;
    let mut mid = sys.step(&prev, dt)?;
    mid.t = t_center;
    let mut next = sys.step(&mid, dt)?;
    next.t = t_center + dt;
    Triple::new(prev, mid, next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::PressureLaw;
    use crate::grid::{bump_profile, Grid1D};
    use approx::assert_relative_eq;

    fn log_tp() -> TransformParams {
        TransformParams::new(PressureLaw::logarithmic(1.0, 0.0).unwrap())
    }

    #[test]
    fn background_is_equilibrium() {
        let g = Grid1D::new(-5.0, 5.0, 64).unwrap();
        let s = SymState::background(g, 0.3);
        let (dv, du) = sym_rhs(&s, &log_tp(), &DampingLaw::scale_invariant(3.0).unwrap()).unwrap();
        assert!(dv.values().iter().chain(du.values()).all(|&x| x == 0.0));
    }

    #[test]
    fn uniform_density_rest_state_is_equilibrium() {
        let g = Grid1D::new(-5.0, 5.0, 64).unwrap();
        let s = SymState::new(Field::constant(g, 0.37), Field::zeros(g), 0.0).unwrap();
        let (dv, du) = sym_rhs(&s, &log_tp(), &DampingLaw::scale_invariant(3.0).unwrap()).unwrap();
        assert!(dv.values().iter().chain(du.values()).all(|&x| x == 0.0));
    }

    #[test]
    fn velocity_pulse_rhs() {
        // v = 0, u = phi: dv = -phi', du = -3 phi - phi phi' (sigma = 1, mu = 3, t = 0)
        let g = Grid1D::new(-3.0, 3.0, 1201).unwrap();
        let phi = |x: f64| 0.1 * (-4.0 * x * x).exp();
        let dphi = |x: f64| -0.8 * x * (-4.0 * x * x).exp();
        let s = SymState::new(Field::zeros(g), Field::from_fn(g, phi).unwrap(), 0.0).unwrap();
        let (dv, du) = sym_rhs(&s, &log_tp(), &DampingLaw::scale_invariant(3.0).unwrap()).unwrap();
        for (i, x) in g.nodes().enumerate().step_by(37) {
            assert!((dv.values()[i] + dphi(x)).abs() < 1e-8, "x = {x}");
            assert!((du.values()[i] + 3.0 * phi(x) + phi(x) * dphi(x)).abs() < 1e-8, "x = {x}");
        }
    }

    #[test]
    fn filter_damps_sawtooth_at_rate_strength_over_dx() {
        let g = Grid1D::new(0.0, 3.1, 32).unwrap();
        let v =
            Field::from_fn(g, |x| if ((x / g.dx()).round() as i64) % 2 == 0 { 1e-3 } else { -1e-3 }).unwrap();
        let s = SymState::new(v.clone(), Field::zeros(g), 0.0).unwrap();
        let sys =
            SymSystem::linearized(log_tp(), DampingLaw::undamped()).with_filter(Filter::everywhere(0.7));
        let (dv, du) = sys.rhs(&s).unwrap();
        for i in 3..29 {
            assert_relative_eq!(dv.values()[i], -0.7 / g.dx() * v.values()[i], max_relative = 1e-12);
        }
        assert_eq!(dv.values()[1], 0.0);
        // u_t = -sigma v_x is untouched by the filter since u = 0
        let (_, du0) = SymSystem::linearized(log_tp(), DampingLaw::undamped()).rhs(&s).unwrap();
        assert_eq!(du, du0);
    }

    #[test]
    fn filter_preserves_quintics_and_equilibria() {
        let g = Grid1D::new(-1.0, 1.0, 40).unwrap();
        let v = Field::from_fn(g, |x| 0.01 * (x.powi(5) - x * x + 0.3)).unwrap();
        let u = Field::from_fn(g, |x| 0.02 * x.powi(3)).unwrap();
        let s = SymState::new(v, u, 0.4).unwrap();
        let dl = DampingLaw::scale_invariant(3.0).unwrap();
        let plain = SymSystem::new(log_tp(), dl).rhs(&s).unwrap();
        let filtered = SymSystem::new(log_tp(), dl).with_filter(Filter::everywhere(2.0)).rhs(&s).unwrap();
        for (a, b) in plain.0.values().iter().zip(filtered.0.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let c = SymState::new(Field::constant(g, 0.37), Field::zeros(g), 0.0).unwrap();
        let (dv, du) = SymSystem::new(log_tp(), dl).with_filter(Filter::default()).rhs(&c).unwrap();
        assert!(dv.values().iter().chain(du.values()).all(|&x| x == 0.0));
    }

    #[test]
    fn filter_layer_weights() {
        let f = Filter { strength: 1.0, layer: Some(4) };
        assert_eq!(f.weight(0, 100), 1.0);
        assert_eq!(f.weight(2, 100), 0.25);
        assert_eq!(f.weight(4, 100), 0.0);
        assert_eq!(f.weight(50, 100), 0.0);
        assert_eq!(f.weight(99, 100), 1.0);
        assert_eq!(Filter::everywhere(1.0).weight(50, 100), 1.0);
        assert!(Filter { strength: -1.0, layer: None }.validate().is_err());
        assert!(Filter { strength: 3.0, layer: None }.validate().is_err());
        assert!(Filter { strength: 1.0, layer: Some(0) }.validate().is_err());
        assert!(Filter::default().validate().is_ok());
    }

    #[test]
    fn hyperbolicity_guard() {
        let g = Grid1D::new(-1.0, 1.0, 32).unwrap();
        let mut v = vec![0.0; 32];
        v[4] = 2.0;
        let s = SymState::new(Field::new(g, v).unwrap(), Field::zeros(g), 0.0).unwrap();
        let dl = DampingLaw::undamped();
        assert!(matches!(sym_rhs(&s, &log_tp(), &dl), Err(Error::HyperbolicityLoss { index: Some(4), .. })));
        assert!(matches!(sym_cfl_dt(&s, &log_tp(), 0.4), Err(Error::HyperbolicityLoss { .. })));
    }

    #[test]
    fn cfl_examples() {
        let g = Grid1D::new(-1.0, 1.0, 41).unwrap();
        let s = SymState::background(g, 0.0);
        assert_relative_eq!(sym_cfl_dt(&s, &log_tp(), 0.4).unwrap(), 0.4 * g.dx(), max_relative = 1e-15);
        // max(|u| + c) = 1 + 1 = 2 with v = 0, u = 1 at one node
        let mut u = vec![0.0; 41];
        u[7] = -1.0;
        let s = SymState::new(Field::zeros(g), Field::new(g, u).unwrap(), 0.0).unwrap();
        assert_relative_eq!(sym_cfl_dt(&s, &log_tp(), 0.4).unwrap(), 0.2 * g.dx(), max_relative = 1e-15);
    }

    #[test]
    fn triple_is_uniform() {
        let g = Grid1D::new(-4.0, 4.0, 81).unwrap();
        let v = Field::from_fn(g, |x| 0.05 * bump_profile(x, 1.0)).unwrap();
        let s = SymState::new(v, Field::zeros(g), 0.0).unwrap();
        let sys = SymSystem::new(log_tp(), DampingLaw::scale_invariant(3.0).unwrap());
        let tr = uniform_triple(&sys, &s, 1.0, 0.01, 0.4).unwrap();
        assert_relative_eq!(tr.prev().t, 0.99, max_relative = 1e-12);
        assert_eq!(tr.mid().t, 1.0);
        assert_relative_eq!(tr.dt(), 0.01, max_relative = 1e-12);
    }
}
