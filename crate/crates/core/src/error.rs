use thiserror::Error;

/// Errors raised by the library.
///
/// Numeric payloads are reported as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("invalid metric profile: {0}")]
    Profile(String),

    #[error("unsupported dimension n = {0} (only n = 3 is available)")]
    UnsupportedDimension(usize),

    #[error("geodesic integration failed at s = {s:e} (r = {r:e}, step = {step:e}): {reason}")]
    Integration { s: f64, r: f64, step: f64, reason: String },

    #[error("quadrature on [{a:e}, {b:e}] did not converge: estimate {value:e} with error {error:e}")]
    Quadrature { a: f64, b: f64, value: f64, error: f64 },

    #[error("root finding failed: {0}")]
    Root(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("profile table, line {line}: {message}")]
    Table { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
