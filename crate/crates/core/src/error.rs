use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { pos: usize, name: String },
    #[error("variable x{index} out of range for {num_vars} variables")]
    VariableOutOfRange { index: usize, num_vars: usize },
    #[error("variable count mismatch: {0} vs {1}")]
    VariableCountMismatch(usize, usize),
    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("polynomial has degree {0}, which is too low for this operation")]
    DegreeTooLow(u32),
    #[error("expected a cubic form, got degree {0}")]
    NotCubic(u32),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("the cubic is a cone")]
    ConeInput,
    #[error("linear form must be nonzero")]
    ZeroLinearForm,
    #[error("empty basis")]
    EmptyBasis,
    #[error("basis points are linearly dependent")]
    DependentBasis,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("no closed dimension formula for {0}")]
    NoClosedForm(String),
    #[error("sampler exhausted {0} seeds without a generic member")]
    SamplingExhausted(u32),
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("sheaves live on different towers")]
    TowerMismatch,
    #[error("tower ring anomaly: {0}")]
    TowerAnomaly(String),
    #[error("integral is not an integer: {0}")]
    NonIntegral(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
