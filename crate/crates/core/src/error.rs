use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: usize, msg: String) -> ParseError {
        ParseError { pos, msg }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("no match: {0}")]
    NoMatch(String),
    #[error("ill-sorted position: {0}")]
    IllSorted(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("step budget exhausted after {0} steps")]
    OutOfFuel(usize),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a proof certificate was rejected by the checker.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("step {step}: {reason}")]
    InvalidStep { step: usize, reason: String },
    #[error("step {step}: {name} is not an axiom of {system}")]
    ForeignAxiom { step: usize, name: String, system: String },
    #[error("the last step proves `{proved}`, not the claimed `{claimed}`")]
    ConclusionMismatch { proved: String, claimed: String },
}

/// A certificate file that cannot be read at all.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("certificate line {line}: {msg}")]
pub struct CertError {
    pub line: usize,
    pub msg: String,
}
