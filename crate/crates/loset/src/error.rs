//! The single error type shared by every kernel layer.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("unknown ground type `{0}`")]
    UnknownGround(String),

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("arity error: {0}")]
    ArityError(String),

    #[error("`{replacement}` is not free for `{var}` in `{term}`")]
    NotFreeFor {
        replacement: String,
        var: String,
        term: String,
    },

    #[error("side condition violated in {rule}: {proviso}")]
    SideConditionViolated { rule: String, proviso: String },

    #[error("premise shape mismatch in {rule}: {detail}")]
    ShapeMismatch { rule: String, detail: String },

    #[error("no closed term of type {0}")]
    NoClosedTerm(String),

    #[error("variable clash: {0}")]
    VariableClash(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("not monic: {0}")]
    NotMonic(String),

    #[error("graph is not a subset of the domain-codomain product: {0}")]
    NotSubgraph(String),

    #[error("graph is not total on its domain: {0}")]
    NotTotal(String),

    #[error("graph is not single-valued: {0}")]
    NotSingleValued(String),

    #[error("term does not land in the codomain: {0}")]
    NotInCodomain(String),

    #[error("domain is not a universal set: {0}")]
    NotFromUniversal(String),

    #[error("ill-typed table for `{symbol}`: {detail}")]
    IllTypedTable { symbol: String, detail: String },

    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("missing component: {0}")]
    MissingComponent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn side_condition(rule: impl Into<String>, proviso: impl Into<String>) -> Self {
        Error::SideConditionViolated {
            rule: rule.into(),
            proviso: proviso.into(),
        }
    }

    pub fn shape(rule: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            rule: rule.into(),
            detail: detail.into(),
        }
    }
}
