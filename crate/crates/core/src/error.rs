use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("not exact: {0}")]
    NotExact(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("omega is not skew at ({0}, {1})")]
    NonSkew(usize, usize),
    #[error("omega entry ({0}, {1}) must depend only on undifferentiated fiber coordinates")]
    EntryNotOrderZero(usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("matrix is not orthogonal")]
    NotOrthogonal,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
