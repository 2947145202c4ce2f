use alloc::string::String;

/// Errors raised by the computational core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("label {0} is not binary")]
    NonBinaryLabel(u8),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least {required} samples, found {found}")]
    TooFewSamples { required: usize, found: usize },
    #[error("distance matrix is not doubly centered")]
    NotCentered,
    #[error("requested {k} features but {p} are available")]
    InvalidK { k: usize, p: usize },
    #[error("dataset has no features")]
    NoFeatures,
    #[error("leave-one-subject-out needs at least two subjects, found {0}")]
    TooFewSubjects(usize),
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("need at least two folds, found {0}")]
    TooFewFolds(usize),
    #[error("fold count mismatch: {0} vs {1}")]
    FoldCountMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid classifier spec `{spec}`: {reason}")]
    InvalidSpec { spec: String, reason: String },
    #[error("classifier `{0}` is already registered")]
    DuplicateClassifier(String),
    #[error("unknown classifier `{0}`")]
    UnknownClassifier(String),
}

pub type Result<T> = core::result::Result<T, Error>;
