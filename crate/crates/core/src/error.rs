use thiserror::Error;

/// Which correlation submatrix failed to factor in a dichotomy test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Submatrix {
    Full,
    Block,
    Complement,
}

impl std::fmt::Display for Submatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Submatrix::Full => write!(f, "R"),
            Submatrix::Block => write!(f, "R_aa"),
            Submatrix::Complement => write!(f, "R_āā"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{what} = {value} is out of range ({range})")]
    OutOfRange {
        what: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("cannot parse partition {text:?}: {reason}")]
    Parse { text: String, reason: String },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("submatrix {submatrix} is not positive definite for bipartition {bipartition} (pivot {pivot} = {value:e})")]
    SingularSubmatrix {
        bipartition: String,
        submatrix: Submatrix,
        pivot: usize,
        value: f64,
    },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("invalid correlation matrix: {0}")]
    InvalidCorrelation(String),

    #[error("internal numerical error: {0}")]
    Numerical(String),
}

impl Error {
    /// True for failures caused by the caller's input, false for internal
    /// numerical breakdowns.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Numerical(_) | Error::Overflow(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
