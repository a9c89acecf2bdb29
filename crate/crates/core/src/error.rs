use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cap exceeded: {what} needs {requested}, limit is {limit}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        limit: u128,
    },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("scope violation: {0}")]
    ScopeViolation(String),
    #[error("class equality is not transitive for {label}: {i} ~ {j} ~ {k} but {i} !~ {k}")]
    NonTransitive {
        label: String,
        i: usize,
        j: usize,
        k: usize,
    },
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("unknown vertex: {0}")]
    UnknownVertex(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

impl Error {
    pub(crate) fn cap(what: &'static str, requested: u128, limit: u128) -> Self {
        Error::CapExceeded {
            what,
            requested,
            limit,
        }
    }
}
