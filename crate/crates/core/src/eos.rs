//! Barotropic pressure laws.
//!
//! Every law shares the sound-speed square `p'(rho) = K1 * rho^A`, and the
//! pressure is its antiderivative:
//!
//! | kind        | exponent `A`     | `p(rho)`                           |
//! |-------------|------------------|------------------------------------|
//! | polytropic  | `A > 0`          | `K1/(A+1) rho^(A+1) + K`, `gamma = A+1` |
//! | Chaplygin   | `-2 <= A < -1`   | `K1/(A+1) rho^(A+1) + K`, `gamma = -A-1` |
//! | logarithmic | `A = -1`         | `K1 ln(rho) + K`                   |
//!
//! The logarithmic branch is the marginal exponent between the two power-law
//! families. It is the only exponent for which `K1 rho^A` integrates to a
//! logarithm, so it is keyed to `A = -1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawKind {
    Polytropic,
    Chaplygin,
    Logarithmic,
}

impl std::fmt::Display for LawKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LawKind::Polytropic => "polytropic",
            LawKind::Chaplygin => "chaplygin",
            LawKind::Logarithmic => "logarithmic",
        })
    }
}

/// A validated barotropic pressure law `p = p(rho)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureLaw {
    kind: LawKind,
    a: f64,
    k1: f64,
    k: f64,
}

impl PressureLaw {
    pub fn new(kind: LawKind, a: f64, k1: f64, k: f64) -> Result<Self> {
        if !(k1 > 0.0 && k1.is_finite()) {
            return Err(Error::invalid(format!("K1 must be positive and finite, got {k1}")));
        }
        if !k.is_finite() {
            return Err(Error::invalid(format!("K must be finite, got {k}")));
        }
        let ok = match kind {
            LawKind::Polytropic => a > 0.0 && a.is_finite(),
            LawKind::Chaplygin => (-2.0..-1.0).contains(&a),
            LawKind::Logarithmic => a == -1.0,
        };
        if !ok {
            return Err(Error::invalid(format!("exponent A = {a} is not admissible for a {kind} law")));
        }
        Ok(Self { kind, a, k1, k })
    }

    /// `p = K1 ln(rho) + K`.
    pub fn logarithmic(k1: f64, k: f64) -> Result<Self> {
        Self::new(LawKind::Logarithmic, -1.0, k1, k)
    }

    /// Polytropic law from its exponent `A > 0`.
    pub fn polytropic(a: f64, k1: f64, k: f64) -> Result<Self> {
        Self::new(LawKind::Polytropic, a, k1, k)
    }

    /// Polytropic law from the adiabatic index, `A = gamma - 1`.
    pub fn polytropic_gamma(gamma: f64, k1: f64, k: f64) -> Result<Self> {
        Self::polytropic(gamma - 1.0, k1, k)
    }

    /// Generalized Chaplygin law from its exponent `-2 <= A < -1`.
    pub fn chaplygin(a: f64, k1: f64, k: f64) -> Result<Self> {
        Self::new(LawKind::Chaplygin, a, k1, k)
    }

    /// Generalized Chaplygin law from `gamma in (0, 1]`, `A = -gamma - 1`.
    pub fn chaplygin_gamma(gamma: f64, k1: f64, k: f64) -> Result<Self> {
        Self::chaplygin(-gamma - 1.0, k1, k)
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    /// The exponent `A` of `p'(rho) = K1 rho^A`.
    pub fn exponent(&self) -> f64 {
        self.a
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn offset(&self) -> f64 {
        self.k
    }

    /// Adiabatic index for the power-law branches; `None` for the logarithmic law.
    pub fn gamma(&self) -> Option<f64> {
        match self.kind {
            LawKind::Polytropic => Some(self.a + 1.0),
            LawKind::Chaplygin => Some(-self.a - 1.0),
            LawKind::Logarithmic => None,
        }
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(match self.kind {
            LawKind::Logarithmic => self.k1 * rho.ln() + self.k,
            _ => self.k1 / (self.a + 1.0) * rho.powf(self.a + 1.0) + self.k,
        })
    }

    /// `p'(rho) = K1 rho^A`, the squared sound speed.
    pub fn dpressure(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(self.k1 * rho.powf(self.a))
    }

    pub fn sound_speed(&self, rho: f64) -> Result<f64> {
        self.dpressure(rho).map(f64::sqrt)
    }
}

fn check_density(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveDensity { rho, index: None })
    }
}
