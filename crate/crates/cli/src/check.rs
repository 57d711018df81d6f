//! Acceptance suites.
//!
//! Each criterion runs at fixed desk-scale settings and yields an
//! [`Outcome`]. Runs shared between criteria (the default problem at two
//! resolutions, the undamped large-data run, the cross-formulation runs) are
//! computed once per [`Session`].
//!
//! | id | suite       | property                                              |
//! |----|-------------|-------------------------------------------------------|
//! | 1  | transform   | `rho <-> v` round trip and wave speed identity         |
//! | 2  | energy      | bounded, grid-stable energy ratio on the default run  |
//! | 3  | equivalence | symmetric vs conservative solutions converge          |
//! | 4  | residual    | damped-wave residual converges under refinement       |
//! | 5  | fps         | support stays inside the propagation cone             |
//! | 6  | blowup      | undamped large data blows up, damped small data not   |
//! | 7  | kernels     | stencil, quadrature, Sobolev norm, RK4 damping limit  |
//! | 8  | diagnostics | monotone running functionals, quadratic `Q`           |

use std::fmt;
use std::sync::OnceLock;

use dampflow::diagnostics::{compute_q, wave_residual, BlowupKind};
use dampflow::dynamics::{run, uniform_triple, SymSystem};
use dampflow::grid::{derivative, l2_norm_sq, make_initial, sobolev_norm_sq};
use dampflow::transform::{rho_to_v, v_to_rho};
use dampflow::{
    grid::bump_profile, ConsState, DampingLaw, Field, Formulation, Grid1D, InitialData, Limiter, PressureLaw,
    Problem, RunResult, RunStatus, SymState, TransformParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Transform,
    Energy,
    Equivalence,
    Residual,
    Fps,
    Blowup,
    Kernels,
    Diagnostics,
    All,
}

impl Suite {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::Transform => &[1],
            Suite::Energy => &[2],
            Suite::Equivalence => &[3],
            Suite::Residual => &[4],
            Suite::Fps => &[5],
            Suite::Blowup => &[6],
            Suite::Kernels => &[7],
            Suite::Diagnostics => &[8],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Supplementary measurements that do not affect the verdict.
    pub notes: Vec<String>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} [{}] {}: {}", self.id, self.title, self.detail)
    }
}

fn outcome(id: u8, title: &'static str, passed: bool, detail: String) -> Outcome {
    Outcome { id, title, passed, detail, notes: Vec::new() }
}

fn failed(id: u8, title: &'static str, err: impl fmt::Display) -> Outcome {
    outcome(id, title, false, format!("error: {err}"))
}

// Settings.

/// Grid sizes of the default problem for the grid-stability comparison.
pub const ENERGY_GRIDS: [usize; 2] = [1000, 2000];
pub const ENERGY_MAX_RATIO: f64 = 100.0;
pub const ENERGY_MAX_CHANGE: f64 = 0.2;

/// Node counts on `[-4, 4]` for the cross-formulation comparison at `t = 1`.
pub const EQUIVALENCE_GRIDS: [usize; 3] = [1601, 3201, 6401];
pub const EQUIVALENCE_DOMAIN: (f64, f64) = (-4.0, 4.0);
pub const MIN_ORDER: f64 = 1.5;

/// Node counts on the default domain for the residual at `t = 1`; each halves dx.
pub const RESIDUAL_GRIDS: [usize; 3] = [2000, 3999, 7997];
/// Finer triple reported alongside the verdict.
pub const RESIDUAL_FINE_GRIDS: [usize; 3] = [7997, 15993, 31985];
/// Time step of the residual triple in units of dx.
pub const RESIDUAL_DT_PER_DX: f64 = 0.4;

/// Allowed cone overshoot in units of dx.
pub const FPS_SLACK_DX: f64 = 2.0;

pub const TRANSFORM_TOL: f64 = 1e-12;
pub const SOBOLEV_TOL: f64 = 1e-6;
pub const RK4_TOL: f64 = 1e-8;
pub const Q_SCALING_TOL: f64 = 1e-12;

pub fn default_problem(n: usize) -> Problem {
    let mut p = Problem::default();
    p.grid = Grid1D::new(p.grid.x_min(), p.grid.x_max(), n).expect("valid grid");
    p.solver.store_snapshots = false;
    p
}

/// Undamped, order-one perturbation on the default grid.
pub fn undamped_problem() -> Problem {
    let mut p = default_problem(ENERGY_GRIDS[1]);
    p.damping = DampingLaw::new(0.0, 1.0).expect("valid damping");
    p.initial = InitialData { epsilon: 1.0, ..InitialData::default() };
    p
}

fn equivalence_problem(n: usize, formulation: Formulation) -> Problem {
    let mut p = Problem {
        grid: Grid1D::new(EQUIVALENCE_DOMAIN.0, EQUIVALENCE_DOMAIN.1, n).expect("valid grid"),
        formulation,
        ..Problem::default()
    };
    p.solver.t_end = 1.0;
    p.solver.limiter = Limiter::Minmod;
    p.solver.store_snapshots = false;
    p
}

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn fmt_list(xs: &[f64], prec: usize) -> String {
    let items: Vec<String> = xs.iter().map(|x| format!("{x:.prec$}")).collect();
    format!("[{}]", items.join(", "))
}

fn fmt_sci(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", items.join(", "))
}

type Shared<T> = OnceLock<Result<T, String>>;

fn shared<T>(cell: &Shared<T>, f: impl FnOnce() -> dampflow::Result<T>) -> Result<&T, String> {
    cell.get_or_init(|| f().map_err(|e| e.to_string())).as_ref().map_err(Clone::clone)
}

/// Runs shared between criteria, computed on first use.
#[derive(Default)]
pub struct Session {
    default_runs: [Shared<RunResult>; 2],
    undamped: Shared<RunResult>,
    equivalence: Shared<Vec<(RunResult, RunResult)>>,
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    fn default_run(&self, k: usize) -> Result<&RunResult, String> {
        shared(&self.default_runs[k], || run(&default_problem(ENERGY_GRIDS[k])))
    }

    fn undamped_run(&self) -> Result<&RunResult, String> {
        shared(&self.undamped, || run(&undamped_problem()))
    }

    fn equivalence_runs(&self) -> Result<&Vec<(RunResult, RunResult)>, String> {
        shared(&self.equivalence, || {
            EQUIVALENCE_GRIDS
                .iter()
                .map(|&n| {
                    let sym = run(&equivalence_problem(n, Formulation::Symmetric))?;
                    let cons = run(&equivalence_problem(n, Formulation::Conservative))?;
                    Ok((sym, cons))
                })
                .collect()
        })
    }

    pub fn run_suite(&self, suite: Suite) -> Vec<Outcome> {
        suite.criteria().iter().map(|&id| self.criterion(id)).collect()
    }

    pub fn criterion(&self, id: u8) -> Outcome {
        match id {
            1 => transform_correctness(),
            2 => self.energy_bound(),
            3 => self.equivalence(),
            4 => residual_convergence(),
            5 => self.propagation_cone(),
            6 => self.blowup_contrast(),
            7 => numerical_kernels(),
            8 => self.diagnostics_invariants(),
            _ => panic!("no acceptance criterion {id}"),
        }
    }

    fn energy_bound(&self) -> Outcome {
        const T: &str = "Energy bound on the default run";
        let (coarse, fine) = match (self.default_run(0), self.default_run(1)) {
            (Ok(c), Ok(f)) => (c, f),
            (Err(e), _) | (_, Err(e)) => return failed(2, T, e),
        };
        let (s_c, s_f) = (coarse.energy.sup_ratio(), fine.energy.sup_ratio());
        let change = (s_f - s_c).abs() / s_c;
        let global = fine.status == RunStatus::CompletedGlobal;
        let passed = global && s_f <= ENERGY_MAX_RATIO && change < ENERGY_MAX_CHANGE;
        let detail = format!(
            "n={} status {}, sup ratio {s_f:.4} (limit {ENERGY_MAX_RATIO}); n={} sup ratio {s_c:.4}, change {:.1}% (limit {:.0}%)",
            ENERGY_GRIDS[1],
            fine.status.label(),
            ENERGY_GRIDS[0],
            100.0 * change,
            100.0 * ENERGY_MAX_CHANGE
        );
        outcome(2, T, passed, detail)
    }

    fn equivalence(&self) -> Outcome {
        const T: &str = "Cross-formulation equivalence";
        let runs = match self.equivalence_runs() {
            Ok(r) => r,
            Err(e) => return failed(3, T, e),
        };
        let errs: Vec<f64> = runs.iter().map(|(s, c)| sym_distance(&s.final_state, &c.final_state)).collect();
        let ords = orders(&errs);
        let passed = ords.iter().all(|&o| o >= MIN_ORDER);
        let detail = format!(
            "n={EQUIVALENCE_GRIDS:?} on [{}, {}] at t=1: L-inf differences {}, orders {} (min {MIN_ORDER})",
            EQUIVALENCE_DOMAIN.0,
            EQUIVALENCE_DOMAIN.1,
            fmt_sci(&errs),
            fmt_list(&ords, 2)
        );
        outcome(3, T, passed, detail)
    }

    fn propagation_cone(&self) -> Outcome {
        const T: &str = "Finite propagation speed";
        let res = match self.default_run(1) {
            Ok(r) => r,
            Err(e) => return failed(5, T, e),
        };
        let dx = default_problem(ENERGY_GRIDS[1]).grid.dx();
        let margin = res.fps_margin;
        let passed = margin >= -FPS_SLACK_DX * dx;
        let detail = format!(
            "n={} min margin {margin:.4} = {:.1} dx (limit -{FPS_SLACK_DX} dx = {:.4})",
            ENERGY_GRIDS[1],
            margin / dx,
            -FPS_SLACK_DX * dx
        );
        outcome(5, T, passed, detail)
    }

    fn blowup_contrast(&self) -> Outcome {
        const T: &str = "Blowup contrast";
        let (undamped, damped) = match (self.undamped_run(), self.default_run(1)) {
            (Ok(u), Ok(d)) => (u, d),
            (Err(e), _) | (_, Err(e)) => return failed(6, T, e),
        };
        let dx = undamped_problem().grid.dx();
        let grad = undamped.rows.iter().map(|r| r.max_abs_vx.max(r.max_abs_ux)).fold(0.0, f64::max);
        let blew_up = matches!(undamped.status, RunStatus::BlowupDetected { .. })
            && undamped.blowup.kind == BlowupKind::GradientBlowup;
        let passed = blew_up && damped.status == RunStatus::CompletedGlobal;
        let when = match undamped.blowup.t {
            Some(t) => format!(" ({} at t={t:.3})", undamped.blowup.kind),
            None => String::new(),
        };
        let detail = format!(
            "mu=0, eps=1: {}{when}, max gradient {grad:.3} = {:.3}/dx (threshold {:e}); mu=3, eps=0.05: {}",
            undamped.status.label(),
            grad * dx,
            undamped_problem().diagnostics.thresholds.gradient,
            damped.status.label()
        );
        let mut out = outcome(6, T, passed, detail);
        let mut coarse = undamped_problem();
        coarse.grid =
            Grid1D::new(coarse.grid.x_min(), coarse.grid.x_max(), ENERGY_GRIDS[0]).expect("valid grid");
        if let Ok(r) = run(&coarse) {
            let g = r.rows.iter().map(|r| r.max_abs_vx.max(r.max_abs_ux)).fold(0.0, f64::max);
            out.notes.push(format!(
                "mu=0, eps=1 at n={}: {}, max gradient {g:.3} = {:.3}/dx",
                ENERGY_GRIDS[0],
                r.status.label(),
                g * coarse.grid.dx()
            ));
        }
        out
    }

    fn diagnostics_invariants(&self) -> Outcome {
        const T: &str = "Diagnostics invariants";
        let mut runs: Vec<(String, &RunResult)> = Vec::new();
        for (k, n) in ENERGY_GRIDS.iter().enumerate() {
            match self.default_run(k) {
                Ok(r) => runs.push((format!("default n={n}"), r)),
                Err(e) => return failed(8, T, e),
            }
        }
        match self.undamped_run() {
            Ok(r) => runs.push(("undamped".into(), r)),
            Err(e) => return failed(8, T, e),
        }
        match self.equivalence_runs() {
            Ok(rs) => {
                for (n, (s, c)) in EQUIVALENCE_GRIDS.iter().zip(rs) {
                    runs.push((format!("symmetric n={n}"), s));
                    runs.push((format!("conservative n={n}"), c));
                }
            }
            Err(e) => return failed(8, T, e),
        }
        let bad: Vec<&str> =
            runs.iter().filter(|(_, r)| !r.energy.is_monotone()).map(|(n, _)| n.as_str()).collect();

        let dev = match q_scaling_deviation() {
            Ok(d) => d,
            Err(e) => return failed(8, T, e),
        };
        let passed = bad.is_empty() && dev <= Q_SCALING_TOL;
        let mono = if bad.is_empty() {
            format!("E_m, L_m nondecreasing on all {} runs", runs.len())
        } else {
            format!("running functionals decrease on {}", bad.join(", "))
        };
        outcome(8, T, passed, format!("{mono}; Q scaling deviation {dev:.2e} (limit {Q_SCALING_TOL:e})"))
    }
}

fn sym_distance(a: &SymState, b: &SymState) -> f64 {
    let dv = a.v.values().iter().zip(b.v.values());
    let du = a.u.values().iter().zip(b.u.values());
    dv.chain(du).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn laws() -> Vec<PressureLaw> {
    let mut out = vec![PressureLaw::logarithmic(1.0, 0.0), PressureLaw::logarithmic(2.5, -1.0)];
    for g in [1.4, 2.0, 3.0] {
        out.push(PressureLaw::polytropic_gamma(g, 1.0, 0.0));
        out.push(PressureLaw::polytropic_gamma(g, 0.7, 0.0));
    }
    for g in [0.2, 0.5, 1.0] {
        out.push(PressureLaw::chaplygin_gamma(g, 1.0, 0.0));
        out.push(PressureLaw::chaplygin_gamma(g, 3.0, 0.0));
    }
    out.into_iter().map(|l| l.expect("valid law")).collect()
}

fn transform_correctness() -> Outcome {
    const T: &str = "Transform correctness";
    let mut worst_roundtrip = 0.0f64;
    let mut worst_speed = 0.0f64;
    let laws = laws();
    for law in &laws {
        let tp = TransformParams::new(*law);
        for i in 0..100 {
            let rho = 0.1 + 9.9 * i as f64 / 99.0;
            let r = rho_to_v(&tp, rho).and_then(|v| Ok((v, v_to_rho(&tp, v)?, law.sound_speed(rho)?)));
            let (v, back, c) = match r {
                Ok(x) => x,
                Err(e) => return failed(1, T, format!("{:?} at rho={rho}: {e}", law.kind())),
            };
            worst_roundtrip = worst_roundtrip.max((back - rho).abs() / rho);
            worst_speed = worst_speed.max((tp.sigma() + 0.5 * tp.exponent() * v - c).abs());
        }
    }
    let passed = worst_roundtrip <= TRANSFORM_TOL && worst_speed <= TRANSFORM_TOL;
    let detail = format!(
        "{} laws x 100 densities in [0.1, 10]: round trip {worst_roundtrip:.2e}, speed identity {worst_speed:.2e} (limit {TRANSFORM_TOL:e})",
        laws.len()
    );
    outcome(1, T, passed, detail)
}

fn residual_at(n: usize) -> dampflow::Result<f64> {
    let p = default_problem(n);
    let tp = TransformParams::new(p.law);
    let (_, s0) = make_initial(&p.initial, &p.grid, &tp)?;
    let sys = SymSystem::new(tp, p.damping).with_filter(p.solver.filter);
    let tr = uniform_triple(&sys, &s0, 1.0, RESIDUAL_DT_PER_DX * p.grid.dx(), p.solver.cfl)?;
    wave_residual(&tr, &tp, &p.damping)
}

fn background_residual() -> dampflow::Result<f64> {
    let p = default_problem(RESIDUAL_GRIDS[0]);
    let tp = TransformParams::new(p.law);
    let sys = SymSystem::new(tp, p.damping).with_filter(p.solver.filter);
    let s0 = SymState::background(p.grid, 0.0);
    let tr = uniform_triple(&sys, &s0, 1.0, RESIDUAL_DT_PER_DX * p.grid.dx(), p.solver.cfl)?;
    wave_residual(&tr, &tp, &p.damping)
}

fn residual_convergence() -> Outcome {
    const T: &str = "Damped-wave identity";
    let res: dampflow::Result<Vec<f64>> = RESIDUAL_GRIDS.iter().map(|&n| residual_at(n)).collect();
    let (res, bg) = match res.and_then(|r| Ok((r, background_residual()?))) {
        Ok(x) => x,
        Err(e) => return failed(4, T, e),
    };
    let ords = orders(&res);
    let passed = ords.iter().all(|&o| o >= MIN_ORDER) && bg == 0.0;
    let detail = format!(
        "n={RESIDUAL_GRIDS:?}, dt={RESIDUAL_DT_PER_DX}dx, t=1: residuals {}, orders {} (min {MIN_ORDER}); background residual {bg:e}",
        fmt_sci(&res),
        fmt_list(&ords, 2)
    );
    let mut out = outcome(4, T, passed, detail);
    let fine: dampflow::Result<Vec<f64>> = RESIDUAL_FINE_GRIDS.iter().map(|&n| residual_at(n)).collect();
    if let Ok(fine) = fine {
        out.notes.push(format!(
            "finer grids n={RESIDUAL_FINE_GRIDS:?}: residuals {}, orders {}",
            fmt_sci(&fine),
            fmt_list(&orders(&fine), 2)
        ));
    }
    out
}

fn q_scaling_deviation() -> dampflow::Result<f64> {
    let p = default_problem(ENERGY_GRIDS[1]);
    let tp = TransformParams::new(p.law);
    let (_, s0) = make_initial(&p.initial, &p.grid, &tp)?;
    let sys = SymSystem::new(tp, p.damping).with_filter(p.solver.filter);
    let tr = uniform_triple(&sys, &s0, 1.0, RESIDUAL_DT_PER_DX * p.grid.dx(), p.solver.cfl)?;
    let base = compute_q(&tr, &tp, &p.damping)?.q;
    let mut worst = 0.0f64;
    for a in [0.5, 2.0, -3.0, 10.0] {
        let q = compute_q(&tr.scaled(a), &tp, &p.damping)?.q;
        let scale = a * a * base.max_abs();
        let dev =
            q.values().iter().zip(base.values()).map(|(x, y)| (x - a * a * y).abs()).fold(0.0, f64::max);
        worst = worst.max(dev / scale);
    }
    Ok(worst)
}

fn numerical_kernels() -> Outcome {
    const T: &str = "Numerical kernels";
    match kernel_errors() {
        Ok(k) => {
            let passed =
                k.cubic <= 1e-9 && k.trapezoid <= 1e-13 && k.sobolev <= SOBOLEV_TOL && k.rk4 <= RK4_TOL;
            let detail = format!(
                "cubic stencil {:.1e} (limit 1e-9), trapezoid {:.1e} (limit 1e-13), Sobolev vs 16x {:.2e} (limit {SOBOLEV_TOL:e}), RK4 damping limit {:.2e} (limit {RK4_TOL:e})",
                k.cubic, k.trapezoid, k.sobolev, k.rk4
            );
            outcome(7, T, passed, detail)
        }
        Err(e) => failed(7, T, e),
    }
}

struct KernelErrors {
    cubic: f64,
    trapezoid: f64,
    sobolev: f64,
    rk4: f64,
}

/// Grid for the Sobolev comparison: the bump of radius 1 on `[-2, 2]`.
pub const SOBOLEV_GRID: (f64, f64, usize) = (-2.0, 2.0, 6401);

fn kernel_errors() -> dampflow::Result<KernelErrors> {
    // Derivatives of a cubic, all orders up to 3, including the end nodes.
    let g = Grid1D::new(-1.0, 2.0, 61)?;
    let f = Field::from_fn(g, |x| 1.0 + 2.0 * x - 0.5 * x * x + 0.3 * x * x * x)?;
    let exact: [fn(f64) -> f64; 3] = [|x| 2.0 - x + 0.9 * x * x, |x| -1.0 + 1.8 * x, |_| 1.8];
    let mut cubic = 0.0f64;
    for (k, d) in exact.iter().enumerate() {
        let df = derivative(&f, k + 1)?;
        for (i, x) in g.nodes().enumerate() {
            cubic = cubic.max((df.values()[i] - d(x)).abs());
        }
    }

    // f = sqrt(1 + x) makes the integrand of ||f||² linear; exact value 7.5 on [0, 3].
    let g = Grid1D::new(0.0, 3.0, 31)?;
    let trapezoid = (l2_norm_sq(&Field::from_fn(g, |x| (1.0 + x).sqrt())?) - 7.5).abs() / 7.5;

    let (a, b, n) = SOBOLEV_GRID;
    let norm = |n: usize| -> dampflow::Result<f64> {
        let g = Grid1D::new(a, b, n)?;
        sobolev_norm_sq(&Field::from_fn(g, |x| bump_profile(x, 1.0))?, 3)
    };
    let oracle = norm(16 * (n - 1) + 1)?;
    let sobolev = (norm(n)? - oracle).abs() / oracle;

    // Spatially uniform velocity: u' = -mu u / (1 + t), u(1) = u0 2^(-mu).
    let mu = 3.0;
    let dl = DampingLaw::scale_invariant(mu)?;
    let law = PressureLaw::logarithmic(1.0, 0.0)?;
    let g = Grid1D::new(-1.0, 1.0, 32)?;
    let u0 = 0.02;
    let exact = u0 * 2f64.powf(-mu);
    let sys = SymSystem::new(TransformParams::new(law), dl);
    let mut s = SymState::new(Field::zeros(g), Field::constant(g, u0), 0.0)?;
    let cons = dampflow::dynamics::ConsSystem::new(law, dl, Limiter::Minmod);
    let mut c = ConsState::new(Field::constant(g, 1.0), Field::constant(g, u0), 0.0)?;
    for _ in 0..100 {
        s = sys.step(&s, 0.01)?;
        c = cons.step(&c, 0.01)?;
    }
    let rk4 = s.u.values().iter().chain(c.m.values()).map(|u| (u - exact).abs()).fold(0.0, f64::max);

    Ok(KernelErrors { cubic, trapezoid, sobolev, rk4 })
}
