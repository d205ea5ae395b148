use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit code
/// through [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("coordinate {coord:?} is out of bounds on axis {axis} (dimension {dim})")]
    OutOfBounds {
        coord: Vec<usize>,
        axis: usize,
        dim: usize,
    },

    #[error("coordinate {coord:?} has {got} indices, expected {expected}")]
    CoordArity {
        coord: Vec<usize>,
        got: usize,
        expected: usize,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("operation requires t >= {min}, got t = {got}")]
    UnsupportedDimension { min: usize, got: usize },

    #[error("not a t-pattern: ones {first:?} and {second:?} differ in fewer than two positions")]
    NotAPattern {
        first: Vec<usize>,
        second: Vec<usize>,
    },

    #[error("resource cap `{cap}` exceeded: {needed} > {limit} (raise it with {hint})")]
    Resource {
        cap: &'static str,
        needed: u128,
        limit: u128,
        hint: &'static str,
    },

    #[error("search budget of {budget} nodes exhausted before a verdict was reached")]
    Unknown { budget: u64 },

    #[error("no {shape_desc} tensor avoids the pattern, the extremal number is undefined")]
    NoAvoider { shape_desc: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource { .. } | Error::Unknown { .. } => 3,
            Error::Invariant(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
