use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("operation `{op}` expects {expected} arguments, found {found}")]
    ArityMismatch { op: String, expected: usize, found: usize },
    #[error("duplicate operation name `{0}`")]
    DuplicateOp(String),
    #[error("invalid operation name `{0}`")]
    InvalidName(String),
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("variable x{var} out of range for context {context}")]
    VarOutOfRange { var: usize, context: usize },
    #[error("rewrite budget of {0} steps exhausted")]
    BudgetExhausted(usize),
    #[error("cannot orient equation {0}")]
    Unorientable(String),
    #[error("completion bound exceeded: {0}")]
    CompletionBound(String),
    #[error("morphism arity mismatch: {0}")]
    MorphismMismatch(String),
    #[error("result cap of {0} exceeded")]
    CapExceeded(usize),
    #[error("theory `{0}` has no decision procedure for equality")]
    Undecidable(String),
    #[error("hom-set is infinite; a term-size bound is required")]
    InfiniteHomSet,
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
