use thiserror::Error;

/// Errors raised across the crate.
///
/// Encoder and decoder outcomes that are part of normal operation at finite
/// blocklength (covering failures, ambiguous decodes, ...) are not errors;
/// they are reported through [`crate::sim::EncodeOutcome`] and
/// [`crate::sim::DecodeOutcome`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("row {index:?} is not a distribution (sums to {sum})")]
    NonStochasticRow { index: Vec<usize>, sum: f64 },

    #[error("negative or non-finite entry {value} at {index:?}")]
    NegativeEntry { index: Vec<usize>, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of range: {0}")]
    IndexError(String),

    #[error("input {0} has zero probability; its conditional law is undefined")]
    ZeroMassInput(String),

    #[error("sequence lengths differ: {0}")]
    LengthMismatch(String),

    #[error("symbol {symbol} at position {position} of sequence {sequence} exceeds alphabet size {alphabet}")]
    SymbolOutOfRange {
        sequence: usize,
        position: usize,
        symbol: usize,
        alphabet: usize,
    },

    #[error("channel shape does not fit variant {0}")]
    ShapeMismatch(String),

    #[error("enumeration needs {required} steps, budget is {budget}")]
    ExplosionGuard { required: f64, budget: f64 },

    #[error("no feasible point: {0}")]
    NoFeasiblePoint(String),

    #[error("output alphabet has {0} symbols, expected 2")]
    NotBinaryOutput(usize),

    #[error("insufficient rate headroom: {0}")]
    InsufficientHeadroom(String),

    #[error("type is not integral at blocklength {n}: {detail}")]
    NonIntegralType { n: usize, detail: String },

    #[error("conditional type cell is not integral: {0}")]
    NonIntegralCell(String),

    #[error("codebook needs {required} words, budget is {budget}")]
    SizeOverflow { required: f64, budget: usize },

    #[error("joint type arity {got} does not match {expected}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
