use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("realization window does not cover {missing} required site(s), e.g. {examples}")]
    Coverage { missing: usize, examples: String },

    #[error("LDL^H factorization broke down at pivot {index} (|d| = {pivot:e}) after {attempts} attempt(s)")]
    Breakdown {
        index: usize,
        pivot: f64,
        attempts: usize,
    },

    #[error(
        "eigensolver did not converge after {iterations} iterations (best residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("realization {index}: {source}")]
    Realization {
        index: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_realization(self, index: u64) -> Error {
        Error::Realization {
            index,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
