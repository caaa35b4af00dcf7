use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} is singular to working precision")]
    Singular { what: &'static str },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("boundary subspace is not dissipative")]
    NotDissipative,

    #[error("{what}: expected rank {expected}, found {found}")]
    RankDeficient {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("system failed validation: {0}")]
    InvalidSystem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
