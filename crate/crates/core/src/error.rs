use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {value} outside domain ({requirement})")]
    Domain {
        function: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid Laguerre parameters: {0}")]
    InvalidLaguerre(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero search for degree {degree} found only {found} sign changes")]
    ZeroSearch { degree: usize, found: usize },

    #[error("{quantity} did not converge: value {value}, error estimate {error_estimate}")]
    NotConverged {
        quantity: String,
        value: f64,
        error_estimate: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, value: f64, requirement: &'static str) -> Error {
    Error::Domain {
        function,
        value,
        requirement,
    }
}
