//! Decision-tree learners (ID3, C4.5, CART) for small categorical datasets,
//! with ARFF input, stratified cross-validation and IF-THEN rule extraction.

pub mod arff;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod metrics;
pub mod rules;
pub mod tree;

pub use data::{load_embedded_students, Dataset, Instance, Schema, Value};
pub use error::{DataError, EvalError, LearnError};
pub use tree::{classify, Algorithm, LearnerParams, Prediction, TreeNode};
