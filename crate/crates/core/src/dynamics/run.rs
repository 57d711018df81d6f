use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{ConsState, ConsSystem, DampingLaw, Formulation, SolverConfig, SymState, SymSystem};
use crate::diagnostics::{
    c_max, detect_blowup_cons, detect_blowup_sym, energy_instant_with, support_radius, BlowupKind,
    BlowupStatus, DiagnosticRow, DiagnosticsConfig, EnergyReport, FpsTracker,
};
use crate::eos::PressureLaw;
use crate::error::{Error, Result};
use crate::grid::{derivative, make_initial, Grid1D, InitialData};
use crate::transform::{map_cons_to_sym, TransformParams};

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub law: PressureLaw,
    pub damping: DampingLaw,
    pub initial: InitialData,
    pub grid: Grid1D,
    pub solver: SolverConfig,
    pub formulation: Formulation,
    pub diagnostics: DiagnosticsConfig,
}

impl Default for Problem {
    /// Logarithmic law with `K1 = 1`, `mu = 3`, `eps = 0.05`, `R = 1`, 2000
    /// nodes on `[-60, 60]`, integrated to `t = 50`.
    fn default() -> Self {
        Self {
            law: PressureLaw::logarithmic(1.0, 0.0).expect("valid law"),
            damping: DampingLaw::scale_invariant(3.0).expect("valid damping"),
            initial: InitialData::default(),
            grid: Grid1D::new(-60.0, 60.0, 2000).expect("valid grid"),
            solver: SolverConfig::default(),
            formulation: Formulation::Symmetric,
            diagnostics: DiagnosticsConfig::default(),
        }
    }
}

impl Problem {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        self.diagnostics.validate()?;
        self.initial.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    CompletedGlobal,
    BlowupDetected { t: f64 },
    Error { message: String },
}

impl RunStatus {
    /// Process exit code: 0 global, 2 blowup, 1 error.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunStatus::CompletedGlobal => 0,
            RunStatus::BlowupDetected { .. } => 2,
            RunStatus::Error { .. } => 1,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::CompletedGlobal => "completed_global",
            RunStatus::BlowupDetected { .. } => "blowup_detected",
            RunStatus::Error { .. } => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub status: RunStatus,
    pub energy: EnergyReport,
    pub rows: Vec<DiagnosticRow>,
    /// Smallest propagation-cone margin over the recorded rows.
    pub fps_margin: f64,
    pub blowup: BlowupStatus,
    /// Symmetric-variable snapshots at the row times (empty unless requested).
    pub snapshots: Vec<SymState>,
    /// Last valid state, in symmetric variables.
    pub final_state: SymState,
    pub steps: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub c_max: f64,
}

/// Called after every accepted time step.
pub trait Observer {
    fn on_step(&mut self, info: &StepInfo);
}

impl<F: FnMut(&StepInfo)> Observer for F {
    fn on_step(&mut self, info: &StepInfo) {
        self(info)
    }
}

enum Current {
    Sym(SymState),
    Cons(ConsState),
}

struct Stepper {
    sym: SymSystem,
    cons: ConsSystem,
    tp: TransformParams,
}

impl Stepper {
    fn cfl_dt(&self, cur: &Current, cfl: f64) -> Result<f64> {
        match cur {
            Current::Sym(s) => self.sym.cfl_dt(s, cfl),
            Current::Cons(c) => self.cons.cfl_dt(c, cfl),
        }
    }

    fn step(&self, cur: &Current, dt: f64) -> Result<Current> {
        Ok(match cur {
            Current::Sym(s) => Current::Sym(self.sym.step(s, dt)?),
            Current::Cons(c) => Current::Cons(self.cons.step(c, dt)?),
        })
    }

    fn time(cur: &Current) -> f64 {
        match cur {
            Current::Sym(s) => s.t,
            Current::Cons(c) => c.t,
        }
    }

    fn set_time(cur: &mut Current, t: f64) {
        match cur {
            Current::Sym(s) => s.t = t,
            Current::Cons(c) => c.t = t,
        }
    }

    fn detect(&self, cur: &Current, cfg: &DiagnosticsConfig) -> BlowupStatus {
        match cur {
            Current::Sym(s) => detect_blowup_sym(s, &self.tp, &cfg.thresholds),
            Current::Cons(c) => detect_blowup_cons(c, &self.tp, &cfg.thresholds),
        }
    }

    fn sym_view(&self, cur: &Current) -> Result<SymState> {
        match cur {
            Current::Sym(s) => Ok(s.clone()),
            Current::Cons(c) => map_cons_to_sym(c, &self.tp),
        }
    }
}

struct Recorder<'a> {
    problem: &'a Problem,
    sys: SymSystem,
    energy: EnergyReport,
    rows: Vec<DiagnosticRow>,
    fps: FpsTracker,
    snapshots: Vec<SymState>,
}

impl Recorder<'_> {
    fn record(&mut self, s: &SymState, dt: f64) -> Result<()> {
        let cfg = &self.problem.diagnostics;
        let (e_inst, ell_inst) = energy_instant_with(&self.sys, s, cfg.m)?;
        let sample = *self.energy.update_running(s.t, e_inst, ell_inst)?;
        let supp_v = support_radius(&s.v, cfg.support_tol);
        let supp_u = support_radius(&s.u, cfg.support_tol);
        self.fps.observe(supp_v.max(supp_u));
        self.rows.push(DiagnosticRow {
            t: s.t,
            e_inst,
            ell_inst,
            e_m: sample.e_m,
            l_m: sample.l_m,
            ratio: sample.ratio,
            max_abs_vx: derivative(&s.v, 1)?.max_abs(),
            max_abs_ux: derivative(&s.u, 1)?.max_abs(),
            support_radius_v: supp_v,
            support_radius_u: supp_u,
            c_max: c_max(s, &self.sys.tp),
            dt,
        });
        if self.problem.solver.store_snapshots {
            self.snapshots.push(s.clone());
        }
        Ok(())
    }
}

pub fn run(problem: &Problem) -> Result<RunResult> {
    run_with_observer(problem, &mut |_: &StepInfo| {})
}

/// Integrate `problem` to `t_end` or until breakdown.
///
/// Setup errors (invalid parameters or initial data) are returned as `Err`;
/// breakdowns during the evolution end the run with
/// [`RunStatus::BlowupDetected`].
pub fn run_with_observer(problem: &Problem, observer: &mut dyn Observer) -> Result<RunResult> {
    let clock = Instant::now();
    problem.validate()?;
    let tp = TransformParams::new(problem.law);
    let (cons0, sym0) = make_initial(&problem.initial, &problem.grid, &tp)?;
    let stepper = Stepper {
        sym: SymSystem::new(tp, problem.damping).with_filter(problem.solver.filter),
        cons: ConsSystem::new(problem.law, problem.damping, problem.solver.limiter),
        tp,
    };
    let mut cur = match problem.formulation {
        Formulation::Symmetric => Current::Sym(sym0.clone()),
        Formulation::Conservative => Current::Cons(cons0),
    };
    let mut rec = Recorder {
        problem,
        sys: SymSystem::new(tp, problem.damping),
        energy: EnergyReport::new(problem.diagnostics.m),
        rows: Vec::new(),
        fps: FpsTracker::new(problem.initial.radius),
        snapshots: Vec::new(),
    };

    let cfg = &problem.solver;
    let t_end = cfg.t_end;
    let mut last_valid = sym0.clone();
    let mut blowup = stepper.detect(&cur, &problem.diagnostics);
    let mut error: Option<Error> = None;
    let mut dt = 0.0;
    let mut steps = 0usize;

    if !blowup.is_blowup() {
        rec.fps.record_speed(0.0, c_max(&sym0, &tp));
        match stepper.cfl_dt(&cur, cfg.cfl).and_then(|h| {
            dt = h;
            rec.record(&sym0, h)
        }) {
            Ok(()) => {}
            Err(e) => match BlowupStatus::from_error(&e, 0.0) {
                Some(b) => blowup = b,
                None => error = Some(e),
            },
        }
    }

    while !blowup.is_blowup() && error.is_none() && Stepper::time(&cur) < t_end {
        let t = Stepper::time(&cur);
        let outcome = (|| -> Result<Option<BlowupStatus>> {
            if steps.is_multiple_of(cfg.snapshot_stride) {
                dt = stepper.cfl_dt(&cur, cfg.cfl)?;
            }
            let h = dt.min(t_end - t);
            let mut next = stepper.step(&cur, h)?;
            if t_end - Stepper::time(&next) < 1e-12 * t_end.max(1.0) {
                Stepper::set_time(&mut next, t_end);
            }
            cur = next;
            steps += 1;
            let status = stepper.detect(&cur, &problem.diagnostics);
            if status.is_blowup() && status.kind != BlowupKind::GradientBlowup {
                return Ok(Some(status));
            }
            // A steep but finite state is still recorded.
            let view = stepper.sym_view(&cur)?;
            let speed = c_max(&view, &tp);
            rec.fps.record_speed(view.t, speed);
            if status.is_blowup() {
                rec.record(&view, h)?;
                last_valid = view;
                return Ok(Some(status));
            }
            if steps.is_multiple_of(cfg.snapshot_stride) || view.t >= t_end {
                rec.record(&view, h)?;
            }
            observer.on_step(&StepInfo { step: steps, t: view.t, dt: h, c_max: speed });
            last_valid = view;
            Ok(None)
        })();
        match outcome {
            Ok(None) => {}
            Ok(Some(b)) => blowup = b,
            Err(e) => match BlowupStatus::from_error(&e, t) {
                Some(b) => blowup = b,
                None => error = Some(e),
            },
        }
    }

    let status = if let Some(e) = error {
        RunStatus::Error { message: e.to_string() }
    } else if let (true, Some(t)) = (blowup.is_blowup(), blowup.t) {
        RunStatus::BlowupDetected { t }
    } else {
        RunStatus::CompletedGlobal
    };
    Ok(RunResult {
        status,
        fps_margin: rec.fps.min_margin(),
        energy: rec.energy,
        rows: rec.rows,
        blowup,
        snapshots: rec.snapshots,
        final_state: last_valid,
        steps,
        wall_time_s: clock.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(eps: f64, t_end: f64, formulation: Formulation) -> Problem {
        Problem {
            initial: InitialData { epsilon: eps, ..Default::default() },
            grid: Grid1D::new(-8.0, 8.0, 161).unwrap(),
            solver: SolverConfig { t_end, snapshot_stride: 5, ..Default::default() },
            formulation,
            ..Default::default()
        }
    }

    #[test]
    fn background_run_is_trivial() {
        for f in [Formulation::Symmetric, Formulation::Conservative] {
            let res = run(&small(0.0, 3.0, f)).unwrap();
            assert_eq!(res.status, RunStatus::CompletedGlobal);
            assert!(res.rows.iter().all(|r| r.e_inst == 0.0 && r.l_m == 0.0 && r.ratio == 0.0));
            assert!(res.snapshots.iter().all(|s| s.v.max_abs() == 0.0 && s.u.max_abs() == 0.0));
            assert!(res.fps_margin >= 1.0);
            assert_eq!(res.final_state.t, 3.0);
        }
    }

    #[test]
    fn rows_are_strided_and_end_at_t_end() {
        let res = run(&small(0.05, 2.0, Formulation::Symmetric)).unwrap();
        assert_eq!(res.status, RunStatus::CompletedGlobal);
        assert_eq!(res.rows.first().unwrap().t, 0.0);
        assert_eq!(res.rows.last().unwrap().t, 2.0);
        assert_eq!(res.rows.len(), res.snapshots.len());
        assert_eq!(res.rows.len(), res.energy.samples.len());
        assert!(res.energy.is_monotone());
        assert!(res.fps_margin.is_finite());
    }

    #[test]
    fn observer_sees_every_step() {
        let mut count = 0usize;
        let mut last_t = 0.0;
        let res = run_with_observer(&small(0.05, 1.0, Formulation::Conservative), &mut |i: &StepInfo| {
            count += 1;
            assert!(i.t > last_t);
            last_t = i.t;
        })
        .unwrap();
        assert_eq!(count, res.steps);
        assert_eq!(last_t, 1.0);
    }

    #[test]
    fn setup_errors_are_returned() {
        let mut p = small(0.05, 1.0, Formulation::Symmetric);
        p.grid = Grid1D::new(-1.0, 1.0, 32).unwrap();
        assert!(matches!(run(&p), Err(Error::SupportExceedsDomain { .. })));
        p.solver.cfl = 1.5;
        assert!(run(&p).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(RunStatus::CompletedGlobal.exit_code(), 0);
        assert_eq!(RunStatus::BlowupDetected { t: 1.0 }.exit_code(), 2);
        assert_eq!(RunStatus::Error { message: String::new() }.exit_code(), 1);
    }

    #[test]
    fn gradient_blowup_ends_with_a_row_at_the_blowup_time() {
        // max |v_x| starts near 1.65 and steepens towards ~0.18/dx
        let mut p = small(1.0, 10.0, Formulation::Symmetric);
        p.grid = Grid1D::new(-8.0, 8.0, 641).unwrap();
        p.damping = DampingLaw::undamped();
        p.diagnostics.thresholds.gradient = 3.0;
        let res = run(&p).unwrap();
        let RunStatus::BlowupDetected { t } = res.status else { panic!("{:?}", res.status) };
        assert_eq!(res.blowup.kind, BlowupKind::GradientBlowup);
        let last = res.rows.last().unwrap();
        assert_eq!(last.t, t);
        assert!(last.max_abs_vx.max(last.max_abs_ux) > 3.0);
        assert_eq!(res.final_state.t, t);
    }
}
