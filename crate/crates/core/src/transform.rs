//! Change of variables between density and the symmetrizing variable
//!
//! ```text
//! v = (2/A) (sqrt(p'(rho)) - sigma),   sigma = sqrt(K1)
//! ```
//!
//! With this choice `v` vanishes at the background density `rho = 1`, and the
//! quasilinear matrix of the `(v, u)` system is symmetric with eigenvalues
//! `u ± (sigma + (A/2) v)`. Since `sigma + (A/2) v = sqrt(p'(rho))`, those are
//! exactly the acoustic characteristic speeds of the Euler system.

use crate::dynamics::{ConsState, SymState};
use crate::eos::PressureLaw;
use crate::error::{Error, Result};
use crate::grid::Field;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformParams {
    law: PressureLaw,
    sigma: f64,
}

impl TransformParams {
    pub fn new(law: PressureLaw) -> Self {
        Self { law, sigma: law.k1().sqrt() }
    }

    pub fn law(&self) -> &PressureLaw {
        &self.law
    }

    /// Background sound speed `sqrt(K1)`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Exponent `A` of the pressure law.
    pub fn exponent(&self) -> f64 {
        self.law.exponent()
    }

    /// `sigma + (A/2) v`, the local sound speed written in terms of `v`.
    #[inline]
    pub fn wave_speed(&self, v: f64) -> f64 {
        self.sigma + 0.5 * self.exponent() * v
    }
}

pub fn rho_to_v(tp: &TransformParams, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::NonPositiveDensity { rho, index: None });
    }
    let a = tp.exponent();
    // sigma (rho^(A/2) - 1) computed without cancellation near rho = 1
    Ok(2.0 / a * tp.sigma * (0.5 * a * rho.ln()).exp_m1())
}

pub fn v_to_rho(tp: &TransformParams, v: f64) -> Result<f64> {
    let a = tp.exponent();
    let arg = a * v / (2.0 * tp.sigma);
    if !(arg > -1.0 && v.is_finite()) {
        return Err(Error::InvalidVRange { v, index: None });
    }
    let rho = (2.0 / a * arg.ln_1p()).exp();
    if rho > 0.0 && rho.is_finite() {
        Ok(rho)
    } else {
        Err(Error::InvalidVRange { v, index: None })
    }
}

pub fn map_cons_to_sym(cs: &ConsState, tp: &TransformParams) -> Result<SymState> {
    let grid = *cs.rho.grid();
    let n = grid.len();
    let (mut v, mut u) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for (i, (&rho, &m)) in cs.rho.values().iter().zip(cs.m.values()).enumerate() {
        v.push(rho_to_v(tp, rho).map_err(|e| e.at_node(i))?);
        u.push(m / rho);
    }
    SymState::new(Field::new(grid, v)?, Field::new(grid, u)?, cs.t)
}

pub fn map_sym_to_cons(ss: &SymState, tp: &TransformParams) -> Result<ConsState> {
    let grid = *ss.v.grid();
    let n = grid.len();
    let (mut rho, mut m) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for (i, (&v, &u)) in ss.v.values().iter().zip(ss.u.values()).enumerate() {
        let r = v_to_rho(tp, v).map_err(|e| e.at_node(i))?;
        rho.push(r);
        m.push(r * u);
    }
    ConsState::new(Field::new(grid, rho)?, Field::new(grid, m)?, ss.t)
}

/// Characteristic speeds `(u - c, u + c)` with `c = sigma + (A/2) v`.
pub fn char_speeds(v: f64, u: f64, tp: &TransformParams) -> Result<(f64, f64)> {
    let c = tp.wave_speed(v);
    if !(c > 0.0) {
        return Err(Error::HyperbolicityLoss { speed: c, index: None });
    }
    Ok((u - c, u + c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{bump_profile, Grid1D};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn log1() -> TransformParams {
        TransformParams::new(PressureLaw::logarithmic(1.0, 0.0).unwrap())
    }

    fn all_laws() -> Vec<TransformParams> {
        [
            PressureLaw::logarithmic(1.0, 0.0),
            PressureLaw::logarithmic(2.5, 0.0),
            PressureLaw::polytropic(2.0, 1.0, 0.0),
            PressureLaw::polytropic(0.4, 3.0, 0.0),
            PressureLaw::chaplygin(-2.0, 1.0, 0.0),
            PressureLaw::chaplygin(-1.3, 0.5, 0.0),
        ]
        .into_iter()
        .map(|l| TransformParams::new(l.unwrap()))
        .collect()
    }

    #[test]
    fn sigma_is_root_k1() {
        let tp = TransformParams::new(PressureLaw::logarithmic(4.0, 0.0).unwrap());
        assert_eq!(tp.sigma(), 2.0);
        assert_eq!(tp.sigma() * tp.sigma(), tp.law().k1());
    }

    #[test]
    fn rho_to_v_examples() {
        assert_eq!(rho_to_v(&log1(), 1.0).unwrap(), 0.0);
        assert_relative_eq!(rho_to_v(&log1(), 4.0).unwrap(), 1.0, max_relative = 1e-15);
        let poly = TransformParams::new(PressureLaw::polytropic(2.0, 1.0, 0.0).unwrap());
        assert_relative_eq!(rho_to_v(&poly, 2.0).unwrap(), 1.0, max_relative = 1e-15);
        assert!(matches!(rho_to_v(&log1(), 0.0), Err(Error::NonPositiveDensity { .. })));
    }

    #[test]
    fn log_branch_closed_form() {
        for rho in [0.1, 0.5, 1.3, 7.0] {
            assert_relative_eq!(
                rho_to_v(&log1(), rho).unwrap(),
                2.0 * (1.0 - rho.powf(-0.5)),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn v_to_rho_examples() {
        assert_eq!(v_to_rho(&log1(), 0.0).unwrap(), 1.0);
        assert_relative_eq!(v_to_rho(&log1(), 1.0).unwrap(), 4.0, max_relative = 1e-15);
        assert!(matches!(v_to_rho(&log1(), 2.0), Err(Error::InvalidVRange { .. })));
        assert!(matches!(v_to_rho(&log1(), 3.0), Err(Error::InvalidVRange { .. })));
        assert!(matches!(v_to_rho(&log1(), f64::NAN), Err(Error::InvalidVRange { .. })));
    }

    #[test]
    fn char_speed_examples() {
        assert_eq!(char_speeds(0.0, 0.0, &log1()).unwrap(), (-1.0, 1.0));
        let (lm, lp) = char_speeds(1.0, 0.5, &log1()).unwrap();
        assert_relative_eq!(lm, 0.0);
        assert_relative_eq!(lp, 1.0);
        assert!(matches!(char_speeds(2.0, 0.0, &log1()), Err(Error::HyperbolicityLoss { .. })));
        for v in [-0.5, 0.0, 0.5] {
            let c = char_speeds(v, 0.0, &log1()).unwrap().1;
            let rho = v_to_rho(&log1(), v).unwrap();
            assert!((c - log1().law().sound_speed(rho).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn map_background_and_bump() {
        let g = Grid1D::new(-2.0, 2.0, 41).unwrap(); // node 20 is x = 0
        let cs = ConsState::new(Field::constant(g, 1.0), Field::zeros(g), 0.0).unwrap();
        let ss = map_cons_to_sym(&cs, &log1()).unwrap();
        assert!(ss.v.values().iter().chain(ss.u.values()).all(|&x| x == 0.0));

        let rho = Field::from_fn(g, |x| 1.0 + 0.1 * bump_profile(x, 1.0)).unwrap();
        let cs = ConsState::new(rho, Field::zeros(g), 0.0).unwrap();
        let ss = map_cons_to_sym(&cs, &log1()).unwrap();
        assert_relative_eq!(ss.v.values()[20], 0.093_074_821_508_815_52, max_relative = 1e-13);
    }

    #[test]
    fn map_errors_carry_node_index() {
        let g = Grid1D::new(0.0, 1.0, 16).unwrap();
        let mut v = vec![0.0; 16];
        v[5] = 2.5;
        let ss = SymState::new_unchecked(Field::new(g, v).unwrap(), Field::zeros(g), 0.0);
        assert_eq!(
            map_sym_to_cons(&ss, &log1()).unwrap_err(),
            Error::InvalidVRange { v: 2.5, index: Some(5) }
        );
    }

    #[test]
    fn map_roundtrip_on_state() {
        let g = Grid1D::new(-3.0, 3.0, 101).unwrap();
        for tp in all_laws() {
            let rho = Field::from_fn(g, |x| 1.0 + 0.8 * (2.0 * x).sin()).unwrap();
            let m = Field::from_fn(g, |x| 0.3 * x.cos()).unwrap();
            let cs = ConsState::new(rho, m, 0.7).unwrap();
            let back = map_sym_to_cons(&map_cons_to_sym(&cs, &tp).unwrap(), &tp).unwrap();
            assert_eq!(back.t, 0.7);
            for i in 0..g.len() {
                let (r0, r1) = (cs.rho.values()[i], back.rho.values()[i]);
                assert!((r1 - r0).abs() <= 1e-12 * r0);
                let (m0, m1) = (cs.m.values()[i], back.m.values()[i]);
                assert!((m1 - m0).abs() <= 1e-12 * m0.abs().max(1e-300));
            }
        }
    }

    proptest! {
        #[test]
        fn roundtrip_identity(rho in 0.1f64..10.0, idx in 0usize..6) {
            let tp = all_laws()[idx];
            let back = v_to_rho(&tp, rho_to_v(&tp, rho).unwrap()).unwrap();
            prop_assert!((back - rho).abs() <= 1e-12 * rho);
        }

        #[test]
        fn wave_speed_equals_sound_speed(rho in 0.1f64..10.0, idx in 0usize..6) {
            let tp = all_laws()[idx];
            let c = tp.wave_speed(rho_to_v(&tp, rho).unwrap());
            let cs = tp.law().sound_speed(rho).unwrap();
            prop_assert!((c - cs).abs() <= 1e-12 * cs.max(1.0));
        }

        #[test]
        fn rho_to_v_increasing(rho in 0.1f64..10.0, idx in 0usize..6) {
            let tp = all_laws()[idx];
            let h = 1e-6 * rho;
            prop_assert!(rho_to_v(&tp, rho + h).unwrap() > rho_to_v(&tp, rho).unwrap());
        }
    }
}
