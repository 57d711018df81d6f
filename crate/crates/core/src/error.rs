use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Node indices are attached wherever a violation can be localized on the grid.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-positive density {rho:e}{}", at(*.index))]
    NonPositiveDensity { rho: f64, index: Option<usize> },

    #[error("v = {v:e} lies outside the invertible range of the transform{}", at(*.index))]
    InvalidVRange { v: f64, index: Option<usize> },

    #[error("hyperbolicity lost: characteristic speed {speed:e} <= 0{}", at(*.index))]
    HyperbolicityLoss { speed: f64, index: Option<usize> },

    #[error("non-finite value{}", at(*.index))]
    NonFiniteValue { index: Option<usize> },

    #[error("grid has {n} nodes, need at least {need}")]
    GridTooSmall { n: usize, need: usize },

    #[error("initial support [-{radius}, {radius}] is not strictly inside [{x_min}, {x_max}]")]
    SupportExceedsDomain { radius: f64, x_min: f64, x_max: f64 },

    #[error("time must increase: got {t} after {prev}")]
    NonMonotoneTime { prev: f64, t: f64 },

    #[error("time triple is not uniformly spaced: {t0}, {t1}, {t2}")]
    NonUniformTriple { t0: f64, t1: f64, t2: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn at(index: Option<usize>) -> String {
    match index {
        Some(i) => format!(" at node {i}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Attach a node index to a pointwise error that does not carry one yet.
    pub fn at_node(self, i: usize) -> Self {
        match self {
            Error::NonPositiveDensity { rho, index: None } => {
                Error::NonPositiveDensity { rho, index: Some(i) }
            }
            Error::InvalidVRange { v, index: None } => Error::InvalidVRange { v, index: Some(i) },
            Error::HyperbolicityLoss { speed, index: None } => {
                Error::HyperbolicityLoss { speed, index: Some(i) }
            }
            Error::NonFiniteValue { index: None } => Error::NonFiniteValue { index: Some(i) },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
