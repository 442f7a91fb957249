use thiserror::Error;

/// Failure modes shared by every stage of the pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("potential is not integrable: {0}")]
    IntegrabilityError(String),

    #[error("moment index {needed} exceeds the precomputed table (size {available})")]
    MomentRangeExceeded { needed: usize, available: usize },

    #[error("degenerate skew inner product: {0}")]
    DegenerateInnerProduct(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("root iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("roots are not real: max |Im| = {max_imag:e} exceeds {tol:e}")]
    NotReal { max_imag: f64, tol: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
