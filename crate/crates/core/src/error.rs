use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("determinant {0} is not positive")]
    NonPositiveDeterminant(f64),
    #[error("non-finite value: {0}")]
    NonFinite(&'static str),
    #[error("image of half-plane point degenerated (|cz+d|^2 = {0})")]
    DegenerateImage(f64),
    #[error("point {0} is a pole of the transformation")]
    PoleAtPoint(f64),
    #[error("derivative requested at breakpoint {0}")]
    BreakpointDerivative(f64),
    #[error("piecewise element is not continuous at breakpoint {0}")]
    Discontinuous(String),
    #[error("invalid window [{0}, {1}]")]
    InvalidWindow(f64, f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quadrature did not converge (error estimate {estimate:e} exceeds {limit:e})")]
    QuadratureNotConverged { estimate: f64, limit: f64 },
    #[error("empty t schedule")]
    EmptySchedule,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
