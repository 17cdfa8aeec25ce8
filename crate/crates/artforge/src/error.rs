use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max asymmetry {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("free set is empty")]
    EmptyFreeSet,

    #[error("generator set is not affine: {0}")]
    NotAffine(String),

    #[error("state is not in the dual set (membership residual {0:.3e})")]
    NotInDualSet(f64),

    #[error("t = {t} outside the dual-set range [{lo}, {hi}]")]
    TOutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid witness components: {0:?}")]
    InvalidWitnessComponents(Vec<String>),

    #[error("feasibility verdict numerically ambiguous (t* = {t_star:.3e}, certificate margin {margin:.3e})")]
    BoundaryAmbiguous { t_star: f64, margin: f64 },

    #[error("solver failed: {0}")]
    NumericalFailure(String),

    #[error("theory admits no resource-destroying map")]
    NoRdm,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
