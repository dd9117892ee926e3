use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Cholesky factorization failed even after the jitter ladder.
    #[error("matrix is singular or indefinite (smallest pivot {smallest_pivot:e})")]
    Singular { smallest_pivot: f64 },

    #[error("not a lattice: elements {left} and {right} have no unique {bound}")]
    NotALattice {
        left: String,
        right: String,
        bound: &'static str,
    },

    #[error("invalid order relation: {0}")]
    InvalidOrder(String),

    #[error("argument outside the domain of {function}: {value}")]
    Domain { function: &'static str, value: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("probabilities do not lie on the simplex (sum {sum}, min {min})")]
    NotOnSimplex { sum: f64, min: f64 },

    #[error("non-positive perceptron coefficient {name} = {value:e} at w = {w}")]
    NonPositiveCoefficient { name: &'static str, value: f64, w: f64 },

    #[error("{rejected} of {samples} draws rejected (limit 1%)")]
    RejectionRate { rejected: usize, samples: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerical kind (as opposed to I/O or input
    /// validation).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::NotALattice { .. }
                | Error::NonPositiveCoefficient { .. }
                | Error::RejectionRate { .. }
        )
    }
}
