use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input has no header; expected `id,p`")]
    MissingHeader,
    #[error("bad header {found:?}; expected `id,p`")]
    BadHeader { found: String },
    #[error("input has a header but no hypotheses")]
    EmptyBody,
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error("row {row}: p-value {value:?} is not a number")]
    NonNumericP { row: usize, value: String },
    #[error("row {row}: p-value {value} out of range [0, 1]")]
    POutOfRange { row: usize, value: f64 },
    #[error("row {row}: duplicate id {id:?}")]
    DuplicateId { row: usize, id: String },
    #[error("unknown hypothesis label {0:?}")]
    UnknownLabel(String),
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error(
        "family has {n} hypotheses, exact enumeration is capped at {cap}; use the shortcut engine"
    )]
    Capacity { n: usize, cap: usize },
    #[error("index set width {found} does not match family width {expected}")]
    FamilyMismatch { expected: usize, found: usize },
    #[error("local test {test} lacks the {missing} capability required by the shortcut")]
    MissingCapability {
        test: &'static str,
        missing: &'static str,
    },
    #[error("restricted combinations are only supported by the exact engine")]
    CongruenceInShortcut,
    #[error("congruence oracle: {0}")]
    Congruence(String),
    #[error("{0}")]
    InvalidArgument(String),
}
