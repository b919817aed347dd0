use thiserror::Error;

use crate::seqdesign::EiState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A Cholesky pivot was not strictly positive. The caller is expected to
    /// apply the nugget policy rather than perturb the matrix silently.
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("iterative decomposition did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("all singular values are at or below the cut-off eta = {eta:e}")]
    AllSingularValuesTruncated { eta: f64 },

    #[error("kappa_max must exceed 1, got {0}")]
    InvalidKappaMax(f64),

    #[error("Matérn smoothness nu = {0} is not supported (use 0.5, 1.5 or 2.5)")]
    UnsupportedNu(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("degenerate bounds for coordinate {coord}: lo = {lo}, hi = {hi}")]
    DegenerateBounds { coord: usize, lo: f64, hi: f64 },

    #[error("value {value} in coordinate {coord} lies outside [{lo}, {hi}]")]
    OutOfBounds {
        coord: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("series length must be at least 2, got {0}")]
    InvalidLength(usize),

    #[error("need at least {required} training points, got {found}")]
    TooFewPoints { required: usize, found: usize },

    #[error("mean basis matrix is not of full column rank")]
    RankDeficientBasis,

    #[error("model schema version {found} is not supported (expected {expected})")]
    SchemaVersionMismatch { found: u64, expected: u64 },

    #[error("corrupt model file: {0}")]
    CorruptFile(String),

    #[error("design has {design_rows} rows but the response matrix has {response_runs} runs")]
    Alignment {
        design_rows: usize,
        response_runs: usize,
    },

    #[error("all singular values are zero")]
    AllZeroSpectrum,

    #[error("neighbourhood size {n} exceeds dataset size {available}")]
    NTooLarge { n: usize, available: usize },

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("simulator failed at step {step}: {message}")]
    SimulatorFailure {
        step: usize,
        message: String,
        partial: Box<EiState>,
    },

    #[error("numerical integrity violated: {0}")]
    NumericalIntegrity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
