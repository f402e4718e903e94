use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("point is not in the sliding region: {0}")]
    NotSliding(String),

    #[error(
        "step size underflow at t = {t:.6e} (h = {h:.3e}); the problem is stiff here, \
         use the implicit method"
    )]
    StepUnderflow { t: f64, h: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    MaxSteps(usize),

    #[error("implicit stage solve failed at t = {t:.6e}")]
    NewtonStage { t: f64 },

    #[error("orbit left the chart box at ({x:.6}, {y:.6})")]
    Escape { x: f64, y: f64 },

    #[error("no return to the section within t_max = {t_max}")]
    NoReturn { t_max: f64 },

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("derivative undefined: {0}")]
    DerivativeUndefined(String),

    #[error(
        "Newton iteration diverged after {iterations} iterations (last residual {residual:.3e})"
    )]
    Divergence { iterations: usize, residual: f64 },

    #[error("degenerate fold: {0}")]
    DegenerateFold(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("point outside the chart: {0}")]
    OutOfChart(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
