use thiserror::Error;

/// Errors raised by the operator calculus.
///
/// Every variant maps onto one of the machine-readable codes reported by the
/// command-line driver and the C interface (see [`Error::code`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("axis {axis} is out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("weight {weight} is singular for this construction (excluded weights: {excluded})")]
    SingularWeight { weight: String, excluded: &'static str },

    #[error("excluded parameter: {0}")]
    ExcludedParameter(String),

    #[error("row {row} of the lifting matrix is singular: P_{row}(lambda) = 0")]
    RowSingular { row: usize },

    #[error("operator order {found} exceeds the admissible order {max}")]
    Order { found: usize, max: usize },

    #[error("expected an operator free of the weight operator w")]
    WeightOperatorPresent,

    #[error("normalisation condition violated: D(1) = {0}")]
    Normalization(String),

    #[error("connection is not curl-free: d{i}(G{j}) != d{j}(G{i})")]
    NotCurlFree { i: usize, j: usize },

    #[error("duplicate interpolation node {0}")]
    DuplicateNode(String),

    #[error("not enough interpolation samples: need {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("samples are inconsistent with a polynomial of degree <= {max_degree}")]
    DegreeOverflow { max_degree: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("coefficient table: {0}")]
    Table(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } | Error::AxisOutOfRange { .. } | Error::ShapeMismatch(_) => "E_DIM",
            Error::SingularWeight { .. } => "E_SINGULAR_WEIGHT",
            Error::ExcludedParameter(_) | Error::RowSingular { .. } => "E_EXCLUDED_PARAM",
            Error::Order { .. } => "E_ORDER",
            Error::Parse { .. } => "E_PARSE",
            Error::DuplicateNode(_)
            | Error::InsufficientSamples { .. }
            | Error::DegreeOverflow { .. }
            | Error::Table(_) => "E_TABLE",
            Error::WeightOperatorPresent | Error::Normalization(_) | Error::NotCurlFree { .. } => "E_DOMAIN",
            Error::Io(_) => "E_IO",
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, column, message: message.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.to_string())
        } else {
            Error::parse(e.line(), e.column(), format!("json: {e}"))
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
