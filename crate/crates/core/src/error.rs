use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty ket expression")]
    EmptyExpression,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("unknown party `{0}`")]
    UnknownParty(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("states live on different spaces")]
    SpaceMismatch,
    #[error("duplicate state label `{0}`")]
    DuplicateLabel(String),
    #[error("state `{0}` has a zero local factor")]
    ZeroFactor(String),
    #[error("state `{label}` has weight outside the subset on party `{party}`")]
    WeightOutsideSubset { label: String, party: String },
    #[error("invalid subsystem list: {0}")]
    InvalidSubsystems(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("invalid family parameters: {0}")]
    FamilyParams(String),
    #[error("unknown family id `{0}`")]
    UnknownFamily(String),
    #[error("no valid filler state for d = {0}")]
    NoFiller(usize),
    #[error("malformed measurement: {0}")]
    MalformedMeasurement(String),
    #[error("unsupported measurement: {0}")]
    UnsupportedMeasurement(String),
    #[error("states `{0}` and `{1}` are not orthogonal")]
    NonOrthogonal(String, String),
    #[error("certification needs at least two states")]
    SingletonSet,
    #[error("label `{0}` not found in set")]
    UnknownLabel(String),
    #[error("Kraus operators are not complete (deviation {0:.3e})")]
    IncompleteKraus(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed protocol: {0}")]
    MalformedProtocol(String),
    #[error("no builtin protocol for family `{0}`")]
    UnsupportedFamily(String),
    #[error("solver invariant violated: {0}")]
    SolverInvariant(String),
    #[error("unknown example id `{0}`")]
    UnknownExample(String),
    #[error("unsupported file: {0}")]
    UnsupportedFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
