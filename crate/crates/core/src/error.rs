use thiserror::Error;

/// Errors raised by state algebra, optics and protocol routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("unknown level `{level}` on subsystem `{label}`")]
    UnknownLevel { label: String, level: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subsystem `{label}` has kind {found}, expected {expected}")]
    KindMismatch {
        label: String,
        expected: String,
        found: String,
    },

    #[error("invalid subsystem `{0}`")]
    InvalidSubsystem(String),

    #[error("target list is empty")]
    EmptyTargets,

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("registers are incompatible: {0}")]
    IncompatibleRegisters(String),

    #[error("map is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("map amplifies amplitude (largest singular value {0})")]
    NormGrowth(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
