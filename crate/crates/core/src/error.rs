use thiserror::Error;

/// Malformed text input, with the 1-based line where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ParseError {
    pub line: Option<usize>,
    pub message: String,
}

impl ParseError {
    pub fn msg(message: impl Into<String>) -> Self {
        ParseError {
            line: None,
            message: message.into(),
        }
    }

    pub fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line: Some(line),
            message: message.into(),
        }
    }

    pub(crate) fn with_line(mut self, line: usize) -> Self {
        self.line.get_or_insert(line);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chart dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("vector field kind mismatch: expected {expected}")]
    KindMismatch { expected: &'static str },
    #[error("invalid model `{name}`: {reason}")]
    InvalidModel { name: String, reason: String },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("bidegree {got:?} where {expected} was required")]
    Bidegree { got: (usize, usize), expected: String },
    #[error("class obstruction: form is not ddbar-exact (residual {residual:.3e})")]
    ClassObstruction { residual: f64 },
    #[error("target form is not balanced: {0}")]
    NotBalanced(String),
    #[error("tuple arity {got} does not match n - 2 = {expected}")]
    TupleArity { got: usize, expected: usize },
    #[error("tuple is not in the pairing domain (residual norm {residual:.3e})")]
    NotInPairingDomain { residual: f64 },
    #[error("grid: {0}")]
    Grid(String),
    #[error("Monge-Ampere solve failed after {iterations} iterations: {reason}")]
    MaFailure { iterations: usize, reason: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
