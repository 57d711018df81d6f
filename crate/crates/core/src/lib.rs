//! One-dimensional compressible Euler equations with time-dependent damping
//!
//! ```text
//! rho_t + (rho u)_x = 0
//! (rho u)_t + (rho u² + p(rho))_x + s(t) rho u = 0,   s(t) = mu / (1 + t)^lambda
//! ```
//!
//! for the polytropic, generalized Chaplygin and logarithmic pressure laws.
//!
//! The crate evolves the system in conservative form and in the symmetric
//! hyperbolic variables `(v, u)`, and measures the weighted energy
//! functionals, the propagation cone and breakdown of classical solutions.
//!
//! Modules:
//! * [`eos`]: pressure laws and sound speed.
//! * [`transform`]: the map `rho <-> v` and characteristic speeds.
//! * [`grid`]: mesh, fields, derivatives, norms, initial data.
//! * [`dynamics`]: right-hand sides, RK4, and the run driver.
//! * [`diagnostics`]: energy, wave residual, cone margin, blowup detection.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dynamics;
pub mod eos;
pub mod error;
pub mod grid;
pub mod transform;

pub use diagnostics::{BlowupKind, BlowupStatus, DiagnosticRow, DiagnosticsConfig, EnergyReport, Thresholds};
pub use dynamics::{
    ConsState, DampingLaw, Formulation, Limiter, Problem, RunResult, RunStatus, SolverConfig, SymState,
};
pub use eos::{LawKind, PressureLaw};
pub use error::{Error, Result};
pub use grid::{Field, Grid1D, InitialData, Profile, ProfileTable};
pub use transform::TransformParams;
