//! Shared inputs for the benchmarks.

use dampflow::grid::make_initial;
use dampflow::{ConsState, Grid1D, Problem, SymState, TransformParams};

/// The default problem's initial data on `n` nodes of its domain.
pub fn default_states(n: usize) -> (Problem, ConsState, SymState) {
    let mut p = Problem::default();
    p.grid = Grid1D::new(p.grid.x_min(), p.grid.x_max(), n).expect("valid grid");
    let (c, s) = make_initial(&p.initial, &p.grid, &TransformParams::new(p.law)).expect("valid data");
    (p, c, s)
}
