use thiserror::Error;

use crate::data::Violation;

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("duplicate attribute name '{0}'")]
    DuplicateAttribute(String),
    #[error("attribute '{0}' declares no values")]
    EmptyDomain(String),
    #[error("attribute '{attribute}' declares value '{value}' twice")]
    DuplicateValue { attribute: String, value: String },
    #[error("class index {0} is out of range")]
    ClassIndexOutOfRange(usize),
    #[error("class attribute '{0}' must be nominal")]
    NumericClass(String),
    #[error("schema needs at least one non-class attribute")]
    NoPredictors,
    #[error("unknown attribute '{0}'")]
    UnknownAttribute(String),
    #[error("percent {0} is outside [0, 100]")]
    PercentOutOfRange(f64),
    #[error("grade bins must have strictly increasing cut-points inside (0, 100)")]
    MalformedBins,
    #[error("dataset violates its schema ({} violation(s), first: {})", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
}

/// Errors raised by the split measures and the learners.
#[derive(Debug, Error, PartialEq)]
pub enum LearnError {
    #[error("unknown attribute '{0}'")]
    UnknownAttribute(String),
    #[error("attribute '{0}' is the class")]
    ClassAttribute(String),
    #[error("attribute '{0}' is numeric; this learner accepts nominal attributes only")]
    UnsupportedAttribute(String),
    #[error("missing value at row {row}, attribute '{attribute}'")]
    UnsupportedMissing { row: usize, attribute: String },
    #[error("missing value for attribute {0} at a split node")]
    MissingAtSplit(usize),
    #[error("cannot learn from an empty dataset")]
    EmptyDataset,
    #[error("no rule matches the instance")]
    NoMatchingRule,
    #[error("{0}")]
    Domain(String),
}

/// Errors raised during evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("fold count {k} must lie in [2, {n}]")]
    FoldCount { k: usize, n: usize },
    #[error("nothing to evaluate: no instances")]
    Empty,
    #[error("class '{0}' is not among the matrix labels")]
    UnknownLabel(String),
    #[error(transparent)]
    Learn(#[from] LearnError),
}
