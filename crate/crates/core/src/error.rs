use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },

    #[error("quadrature did not converge on [{a}, {b}] (estimated error {estimate:e})")]
    NonConvergence { a: f64, b: f64, estimate: f64 },

    #[error("degenerate matrix: largest singular value is zero")]
    DegenerateMatrix,

    #[error("singular linear system")]
    SingularSystem,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate covector: {0}")]
    DegenerateCovector(&'static str),

    #[error("covector is not conjugate (residual {residual:e})")]
    NotConjugate { residual: f64 },

    #[error("no fold witness found: {0}")]
    WitnessNotFound(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
