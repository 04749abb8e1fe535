use thiserror::Error;

/// Errors raised by the library. Diagnostic operations (such as
/// [`crate::complex::validate`]) report problems through their return value
/// instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),

    #[error("simplex {simplex} has {got} critical values, filtration has m = {expected}")]
    ValueArity {
        simplex: String,
        expected: usize,
        got: usize,
    },

    #[error("non-finite critical value on simplex {0}")]
    NonFiniteValue(String),

    #[error("complex is not closed under faces: {0}")]
    NotClosed(String),

    #[error("invalid filtration:\n{0}")]
    InvalidFiltration(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("unsupported ambient dimension {0} (only 2 and 3 are supported)")]
    UnsupportedDimension(usize),

    #[error("missing value for vertex {0}")]
    MissingVertexValue(u32),

    #[error("negative critical value {value} cannot be fed to built-in kernel `{kernel}`")]
    NegativeArgument { kernel: String, value: f64 },

    #[error("unknown kernel `{0}` (built-ins: exp_neg, exp_pow:<p>, pow_exp_pow:<p>, cosine)")]
    UnknownKernel(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("too large: {0}")]
    TooLarge(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
