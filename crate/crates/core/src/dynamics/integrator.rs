use super::{ConsState, SymState};
use crate::error::{Error, Result};
use crate::grid::Field;

/// A two-field state advanced by [`rk4_step`].
pub trait OdeState: Sized {
    fn time(&self) -> f64;
    fn fields(&self) -> (&Field, &Field);
    /// Rebuild from raw fields without re-validating invariants.
    fn from_fields(a: Field, b: Field, t: f64) -> Self;
}

impl OdeState for SymState {
    fn time(&self) -> f64 {
        self.t
    }
    fn fields(&self) -> (&Field, &Field) {
        (&self.v, &self.u)
    }
    fn from_fields(v: Field, u: Field, t: f64) -> Self {
        SymState { v, u, t }
    }
}

impl OdeState for ConsState {
    fn time(&self) -> f64 {
        self.t
    }
    fn fields(&self) -> (&Field, &Field) {
        (&self.rho, &self.m)
    }
    fn from_fields(rho: Field, m: Field, t: f64) -> Self {
        ConsState { rho, m, t }
    }
}

fn axpy<S: OdeState>(s: &S, h: f64, k: &(Field, Field), t: f64) -> S {
    let (a, b) = s.fields();
    let add = |x: &Field, dx: &Field| {
        Field::from_raw(*x.grid(), x.values().iter().zip(dx.values()).map(|(p, q)| p + h * q).collect())
    };
    S::from_fields(add(a, &k.0), add(b, &k.1), t)
}

/// One classic four-stage Runge-Kutta step. `rhs` sees the stage state,
/// whose time is `t`, `t + dt/2` or `t + dt`.
pub fn rk4_step<S, F>(s: &S, dt: f64, mut rhs: F) -> Result<S>
where
    S: OdeState,
    F: FnMut(&S) -> Result<(Field, Field)>,
{
    let t = s.time();
    let k1 = rhs(s)?;
    let k2 = rhs(&axpy(s, 0.5 * dt, &k1, t + 0.5 * dt))?;
    let k3 = rhs(&axpy(s, 0.5 * dt, &k2, t + 0.5 * dt))?;
    let k4 = rhs(&axpy(s, dt, &k3, t + dt))?;

    let (a, b) = s.fields();
    let combine = |x: &Field, j: usize| {
        fn pick(k: &(Field, Field), j: usize) -> &[f64] {
            if j == 0 {
                k.0.values()
            } else {
                k.1.values()
            }
        }
        let (d1, d2, d3, d4) = (pick(&k1, j), pick(&k2, j), pick(&k3, j), pick(&k4, j));
        let h = dt / 6.0;
        let vals: Vec<f64> = x
            .values()
            .iter()
            .enumerate()
            .map(|(i, &xi)| xi + h * (d1[i] + 2.0 * (d2[i] + d3[i]) + d4[i]))
            .collect();
        Field::from_raw(*x.grid(), vals)
    };
    let (na, nb) = (combine(a, 0), combine(b, 1));
    if let Some(i) = na.first_non_finite().or_else(|| nb.first_non_finite()) {
        return Err(Error::NonFiniteValue { index: Some(i) });
    }
    Ok(S::from_fields(na, nb, t + dt))
}
