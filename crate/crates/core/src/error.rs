use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("transition matrix is not square ({rows} rows, row {row} has {cols} entries)")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("row {row} is not stochastic (sum {sum}, or an entry outside [0, 1])")]
    NonStochastic { row: usize, sum: f64 },
    #[error("stationary distribution is not unique (reducible chain)")]
    NonUniqueStationary,
    #[error("state {state} has zero stationary mass")]
    TransientState { state: usize },
    #[error("supplied stationary vector is not invariant (residual {residual})")]
    NotInvariant { residual: f64 },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("symbol {symbol} out of range for alphabet of size {size}")]
    SymbolOutOfRange { symbol: u32, size: usize },
    #[error("empty word")]
    EmptyWord,
    #[error("alphabet sizes differ ({0} vs {1})")]
    AlphabetMismatch(usize, usize),
    #[error("enumeration of {words} words exceeds budget {budget}")]
    BudgetExceeded { words: u128, budget: u128 },
    #[error("observation map is not surjective: symbol {0} has no preimage")]
    NotSurjective(u32),
    #[error("observation map has {got} entries, hidden chain has {expected} states")]
    MapLength { expected: usize, got: usize },
    #[error("invalid ladder parameters: {0}")]
    InvalidLadder(String),
    #[error("ladder truncation too small: tail mass {tail_mass:e} exceeds tolerance {tolerance:e}")]
    TruncationTooSmall { tail_mass: f64, tolerance: f64 },
    #[error("ladder walk left the truncated range at position {position}")]
    TruncationBreach { position: usize },
    #[error("pattern length {requested} exceeds path length {available}")]
    PatternTooLong { requested: usize, available: usize },
    #[error("window length {m} exceeds reference length {y_length}")]
    GridExceedsWindow { m: usize, y_length: usize },
    #[error("grid must be non-empty, strictly increasing and positive")]
    InvalidGrid,
    #[error("x-prefix of length {n} has zero probability under the reference model")]
    AbsoluteContinuityViolation { n: usize },
    #[error("no positive-probability gap up to {budget}")]
    NoGapFound { budget: usize },
    #[error("word has zero probability")]
    ZeroProbabilityWord,
    #[error("pattern of length {n_max} fully matched at window {m}; sample a longer x")]
    PatternExhausted { m: usize, n_max: usize },
    #[error("operation not supported for this model: {0}")]
    Unsupported(&'static str),
    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
