use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} is below the minimum of {min}")]
    DimensionTooSmall { dim: usize, min: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("input is not Hermitian: ||A - A^H||_F = {asymmetry:.3e} exceeds {bound:.3e}")]
    NonHermitianInput { asymmetry: f64, bound: f64 },

    #[error("{routine} failed to converge after {iterations} iterations")]
    ConvergenceFailure {
        routine: &'static str,
        iterations: usize,
    },

    #[error("matrix is singular to working precision at pivot {pivot}")]
    SingularMatrix { pivot: usize },

    #[error("||tA||_1 = {norm:.3e} exceeds the exponential safety bound {bound:.3e}")]
    OverflowRisk { norm: f64, bound: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("step size underflow at tau = {tau}: step {step:.3e} cannot meet tolerance")]
    StepSizeUnderflow { tau: f64, step: f64 },

    #[error("state invariant violated: {what} = {value:.3e}")]
    InvariantViolation { what: &'static str, value: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("truncation insufficient: <N-1|rho|N-1> = {tail:.3e} at N = {dim}; raise the Fock dimension")]
    TruncationInsufficient { tail: f64, dim: usize },

    #[error("steady state is not unique: {count} eigenvalues within {threshold:e} of zero")]
    DegenerateSteadyState { count: usize, threshold: f64 },

    #[error("no relaxation: gamma = 0 has no unique steady state")]
    NoRelaxation,

    #[error("time grid must be strictly increasing and start at tau >= 0")]
    InvalidTimeGrid,

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
