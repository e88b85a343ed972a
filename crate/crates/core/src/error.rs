use alloc::string::String;
use thiserror::Error;

/// Errors raised while reading, typing or validating source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("type error: {0}")]
    Type(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("label error: {0}")]
    Label(String),
    #[error("{0}")]
    Annotation(String),
}

/// Errors raised by rule application.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule `{rule}` is not applicable: {reason}")]
    NotApplicable { rule: &'static str, reason: String },
    #[error("ill-formed program: {0}")]
    IllFormed(String),
}

impl RuleError {
    pub(crate) fn not_applicable(rule: &'static str, reason: impl Into<String>) -> Self {
        RuleError::NotApplicable { rule, reason: reason.into() }
    }
}

/// Runtime errors of the reference interpreter.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("undeclared variable `{0}`")]
    Undeclared(String),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("invalid label: {0}")]
    InvalidLabel(String),
}
