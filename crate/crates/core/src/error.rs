use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Shapes, identifiers or spaces do not line up.
    Structural,
    /// An argument is outside the domain of the operation.
    Domain,
    /// A configured size cap or precondition on work size was hit.
    Resource,
    /// The attainment hypothesis is not satisfied.
    Hypothesis,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("random variables live on different probability spaces")]
    SpaceMismatch,
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("essential supremum/infimum of an empty family is not representable")]
    EmptyFamily,
    #[error("invalid probability space: {0}")]
    InvalidSpace(String),
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("{what} must be strictly positive at every atom")]
    NotStrictlyPositive { what: &'static str },
    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),
    #[error("function identifiers do not match: {0}")]
    IdMismatch(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("unknown base point index {0}")]
    UnknownBasePoint(usize),
    #[error("invalid selection: {0}")]
    InvalidSelection(String),
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("selection count {count} exceeds the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },
    #[error("{what}: size {size} exceeds the cap of {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("truncation N = {given} is too small; the tail bound needs N >= {required}")]
    StepsTooSmall { required: usize, given: usize },
    #[error("invalid instance: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidInstance(Vec<crate::instance::Diagnostic>),
    #[error("attainment hypothesis fails: {0}")]
    HypothesisFails(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::SpaceMismatch
            | Error::LengthMismatch { .. }
            | Error::IdMismatch(_)
            | Error::InvalidSequence(_)
            | Error::UnknownBasePoint(_)
            | Error::InvalidSelection(_) => ErrorKind::Structural,
            Error::EmptyFamily
            | Error::InvalidSpace(_)
            | Error::InvalidEvent(_)
            | Error::InvalidPartition(_)
            | Error::NotStrictlyPositive { .. }
            | Error::InvalidWeights(_)
            | Error::Domain(_)
            | Error::InvalidInstance(_) => ErrorKind::Domain,
            Error::CapExceeded { .. } | Error::SizeCap { .. } | Error::StepsTooSmall { .. } => {
                ErrorKind::Resource
            }
            Error::HypothesisFails(_) => ErrorKind::Hypothesis,
        }
    }
}
