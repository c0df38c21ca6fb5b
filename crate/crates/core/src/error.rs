use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gradient is zero; the L2-ball oracle has no defined direction")]
    DegenerateGradient,

    #[error("operation not supported for domain kind {0}")]
    UnsupportedKind(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("duality gap {gap:e} is negative beyond tolerance; the oracle did not minimize")]
    BrokenOracle { gap: f64 },

    #[error("alpha(t) is undefined for p = 1; use the p = 1 closed form")]
    WrongBranch,

    #[error("non-finite objective or gradient at iteration {k}")]
    NumericalBlowup { k: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("step dt = {dt} too large (feasibility lost at t = {t}); try dt <= {suggested}")]
    StepTooLarge { dt: f64, t: f64, suggested: f64 },

    #[error("rate fit needs at least 10 positive points, found {found}")]
    InsufficientData { found: usize },

    #[error("every coordinate of x* is nonzero; degeneracy is undefined")]
    NoZeroSet,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: label {label:?} is not one of -1, +1, 0, 1")]
    Label { line: usize, label: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
