use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported knot: {0}")]
    UnsupportedKnot(String),
    #[error("no qualifying prime window with start below {bound}")]
    SearchExhausted { bound: u64 },
    #[error("invalid Kirby move: {0}")]
    Move(String),
    #[error("inconsistent dimension ledger: {0}")]
    InconsistentLedger(String),
    #[error("hypotheses not satisfied: {0}")]
    NotApplicable(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("certificate part {part} failed: {reason}")]
    CertificateFailure { part: String, reason: String },
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
