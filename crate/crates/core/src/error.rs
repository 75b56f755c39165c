use thiserror::Error;

use crate::cli::parse::SyntaxError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("cyclic point definition through `{0}`")]
    CyclicDefinition(String),
    #[error("invalid curve context: {0}")]
    InvalidContext(String),
    #[error("context does not declare any {0}-torsion")]
    InsufficientTorsionDeclared(i64),
    #[error("context too small: {0}")]
    ContextTooSmall(String),

    #[error("bundle has rank 0")]
    EmptyBundle,
    #[error("invalid atom: {0}")]
    InvalidAtom(String),
    #[error("unsupported decomposition: {0}")]
    UnsupportedDecomposition(String),
    #[error("unsupported Hom pair: {0}")]
    UnsupportedHomPair(String),

    #[error("expected a rank-{expected} bundle, got rank {found}")]
    RankMismatch { expected: i64, found: i64 },
    #[error("exact sequence does not force {target}; blocking segment {segment}")]
    AmbiguousLes { target: String, segment: String },
    #[error("exact sequence is inconsistent: {0}")]
    InconsistentLes(String),

    #[error("genus {0} is too small (need g >= 4)")]
    GenusTooSmall(i64),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("not a direct summand: {0}")]
    NotASummand(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent context: {0}")]
    InconsistentContext(String),

    #[error("oracle cannot pull back atom: {0}")]
    UnsupportedAtom(String),
    #[error("singular locus check inconclusive: {0}")]
    Inconclusive(String),

    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("i/o error: {0}")]
    Io(String),
}
