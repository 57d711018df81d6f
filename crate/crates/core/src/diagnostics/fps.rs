//! Finite propagation speed: the perturbation must stay inside the cone
//! `|x| <= R + ∫_0^t c_max`, with `c_max = max_x (|u| + |sigma + (A/2) v|)`.

use crate::dynamics::SymState;
use crate::grid::Field;
use crate::transform::TransformParams;

/// Largest `|x_i|` with `|f_i| > tol`, or 0 if there is none.
pub fn support_radius(f: &Field, tol: f64) -> f64 {
    let g = f.grid();
    f.values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > tol)
        .map(|(i, _)| g.x(i).abs())
        .fold(0.0, f64::max)
}

pub fn c_max(s: &SymState, tp: &TransformParams) -> f64 {
    s.v.values().iter().zip(s.u.values()).map(|(&v, &u)| u.abs() + tp.wave_speed(v).abs()).fold(0.0, f64::max)
}

/// Accumulates the cone radius and the smallest margin seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct FpsTracker {
    radius: f64,
    cone: f64,
    last: Option<(f64, f64)>,
    min_margin: f64,
}

impl FpsTracker {
    pub fn new(radius: f64) -> Self {
        Self { radius, cone: 0.0, last: None, min_margin: f64::INFINITY }
    }

    /// Record `c_max` at time `t`; the cone grows by the trapezoid increment.
    pub fn record_speed(&mut self, t: f64, c: f64) {
        if let Some((t0, c0)) = self.last {
            self.cone += 0.5 * (t - t0) * (c + c0);
        }
        self.last = Some((t, c));
    }

    /// Current cone radius `R + ∫ c_max`.
    pub fn cone_radius(&self) -> f64 {
        self.radius + self.cone
    }

    /// Margin for the given support radius at the latest recorded time.
    pub fn observe(&mut self, support: f64) -> f64 {
        let margin = self.cone_radius() - support;
        self.min_margin = self.min_margin.min(margin);
        margin
    }

    pub fn min_margin(&self) -> f64 {
        self.min_margin
    }
}

/// `min_k [R + ∫_0^{t_k} speed - max(supp v, supp u)]` over the snapshots,
/// with the cone speed supplied by `speed`.
pub fn fps_margin_with(traj: &[SymState], radius: f64, tol: f64, speed: impl Fn(&SymState) -> f64) -> f64 {
    let mut tracker = FpsTracker::new(radius);
    for s in traj {
        tracker.record_speed(s.t, speed(s));
        tracker.observe(support_radius(&s.v, tol).max(support_radius(&s.u, tol)));
    }
    tracker.min_margin()
}

pub fn fps_margin(traj: &[SymState], tp: &TransformParams, radius: f64, tol: f64) -> f64 {
    fps_margin_with(traj, radius, tol, |s| c_max(s, tp))
}
