//! Decision-tree structure, the three learners, pruning, and prediction.

mod c45;
mod cart;
mod cost_complexity;
mod doc;
mod id3;
mod numeric;
mod pessimistic;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Instance, Schema, Value};
use crate::error::LearnError;
use crate::metrics::ClassCounts;

pub use c45::build_c45;
pub use cart::build_cart;
pub use cost_complexity::{alpha_sequence, prune_cost_complexity, prune_to_alpha, PruningStep};
pub use doc::{tree_document, Model, ModelError, MODEL_FORMAT};
pub use id3::build_id3;
pub use pessimistic::{pessimistic_error_bound, prune_pessimistic};

/// A decision-tree node. Split nodes keep the class tally of the training
/// instances that reached them.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    /// One child per declared value of a nominal attribute, in declared order.
    Multiway {
        attribute: usize,
        counts: ClassCounts,
        children: Vec<TreeNode>,
    },
    /// Instances whose value is in `left_values` go left, the rest go right.
    Subset {
        attribute: usize,
        left_values: Vec<usize>,
        counts: ClassCounts,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    /// Instances with value `<= threshold` go to `le`, the rest to `gt`.
    Threshold {
        attribute: usize,
        threshold: f64,
        counts: ClassCounts,
        le: Box<TreeNode>,
        gt: Box<TreeNode>,
    },
    Leaf {
        label: usize,
        counts: ClassCounts,
    },
    /// A branch that received no training instances.
    Empty,
}

impl TreeNode {
    pub(crate) fn leaf(counts: ClassCounts) -> Self {
        TreeNode::Leaf {
            label: counts.majority(),
            counts,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. } | TreeNode::Empty)
    }

    /// Children in declaration order; empty for leaves.
    pub fn children(&self) -> Vec<&TreeNode> {
        match self {
            TreeNode::Multiway { children, .. } => children.iter().collect(),
            TreeNode::Subset { left, right, .. } => vec![left, right],
            TreeNode::Threshold { le, gt, .. } => vec![le, gt],
            TreeNode::Leaf { .. } | TreeNode::Empty => Vec::new(),
        }
    }

    pub(crate) fn children_mut(&mut self) -> Vec<&mut TreeNode> {
        match self {
            TreeNode::Multiway { children, .. } => children.iter_mut().collect(),
            TreeNode::Subset { left, right, .. } => vec![left.as_mut(), right.as_mut()],
            TreeNode::Threshold { le, gt, .. } => vec![le.as_mut(), gt.as_mut()],
            TreeNode::Leaf { .. } | TreeNode::Empty => Vec::new(),
        }
    }

    /// Tested attribute of a split node.
    pub fn attribute(&self) -> Option<usize> {
        match self {
            TreeNode::Multiway { attribute, .. }
            | TreeNode::Subset { attribute, .. }
            | TreeNode::Threshold { attribute, .. } => Some(*attribute),
            _ => None,
        }
    }

    /// Training class tally at this node; `None` for empty leaves.
    pub fn counts(&self) -> Option<&ClassCounts> {
        match self {
            TreeNode::Multiway { counts, .. }
            | TreeNode::Subset { counts, .. }
            | TreeNode::Threshold { counts, .. }
            | TreeNode::Leaf { counts, .. } => Some(counts),
            TreeNode::Empty => None,
        }
    }

    pub(crate) fn set_counts(&mut self, new: ClassCounts) {
        match self {
            TreeNode::Multiway { counts, .. }
            | TreeNode::Subset { counts, .. }
            | TreeNode::Threshold { counts, .. }
            | TreeNode::Leaf { counts, .. } => *counts = new,
            TreeNode::Empty => {}
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children().iter().map(|c| c.leaf_count()).sum()
        }
    }

    pub fn depth(&self) -> usize {
        self.children().iter().map(|c| 1 + c.depth()).max().unwrap_or(0)
    }

    /// Index of the child an instance is routed to.
    pub fn route(&self, instance: &Instance) -> Result<Option<usize>, LearnError> {
        let Some(attr) = self.attribute() else {
            return Ok(None);
        };
        let value = instance.get(attr);
        let child = match (self, value) {
            (_, Value::Missing) => return Err(LearnError::MissingAtSplit(attr)),
            (TreeNode::Multiway { children, .. }, Value::Nominal(v)) if v < children.len() => v,
            (TreeNode::Subset { left_values, .. }, Value::Nominal(v)) => usize::from(!left_values.contains(&v)),
            (TreeNode::Threshold { threshold, .. }, Value::Numeric(x)) => usize::from(x > *threshold),
            _ => {
                return Err(LearnError::Domain(format!(
                    "value {value:?} cannot be routed by the split on attribute {attr}"
                )))
            }
        };
        Ok(Some(child))
    }
}

/// Outcome of classifying one instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Prediction {
    Class { label: usize, distribution: Vec<f64> },
    /// The instance reached a branch with no training data.
    Unclassified,
}

impl Prediction {
    pub fn label(&self) -> Option<usize> {
        match self {
            Prediction::Class { label, .. } => Some(*label),
            Prediction::Unclassified => None,
        }
    }
}

/// Routes an instance to a leaf and reports its label and class distribution.
pub fn classify(tree: &TreeNode, instance: &Instance) -> Result<Prediction, LearnError> {
    let mut node = tree;
    while let Some(i) = node.route(instance)? {
        node = node.children()[i];
    }
    Ok(match node {
        TreeNode::Leaf { label, counts } => {
            let distribution = counts.distribution().unwrap_or_else(|| {
                let mut one_hot = vec![0.0; counts.counts().len()];
                one_hot[*label] = 1.0;
                one_hot
            });
            Prediction::Class {
                label: *label,
                distribution,
            }
        }
        TreeNode::Empty => Prediction::Unclassified,
        _ => unreachable!("routing stops at leaves"),
    })
}

/// Learner hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerParams {
    /// Minimum instances per branch (C4.5, CART).
    pub min_leaf: usize,
    /// Confidence factor of C4.5's pessimistic error bound.
    pub confidence_factor: f64,
    /// Internal folds used to select CART's pruned subtree.
    pub cc_folds: usize,
    pub seed: u64,
    pub pruning: bool,
}

impl Default for LearnerParams {
    fn default() -> Self {
        LearnerParams {
            min_leaf: 2,
            confidence_factor: 0.25,
            cc_folds: 5,
            seed: 1,
            pruning: true,
        }
    }
}

impl LearnerParams {
    pub fn unpruned() -> Self {
        LearnerParams {
            pruning: false,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), LearnError> {
        if self.min_leaf < 1 {
            return Err(LearnError::Domain("min_leaf must be at least 1".into()));
        }
        if !(self.confidence_factor > 0.0 && self.confidence_factor < 1.0) {
            return Err(LearnError::Domain("confidence_factor must lie in (0, 1)".into()));
        }
        if self.cc_folds < 2 {
            return Err(LearnError::Domain("cc_folds must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Id3,
    C45,
    Cart,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Id3, Algorithm::C45, Algorithm::Cart];

    pub fn build(self, dataset: &Dataset, params: &LearnerParams) -> Result<TreeNode, LearnError> {
        match self {
            Algorithm::Id3 => build_id3(dataset, params),
            Algorithm::C45 => build_c45(dataset, params),
            Algorithm::Cart => build_cart(dataset, params),
        }
    }

    /// Command-line identifier.
    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Id3 => "id3",
            Algorithm::C45 => "c45",
            Algorithm::Cart => "cart",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Id3 => "ID3",
            Algorithm::C45 => "C4.5",
            Algorithm::Cart => "CART",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "id3" => Ok(Algorithm::Id3),
            "c45" | "c4.5" | "j48" => Ok(Algorithm::C45),
            "cart" => Ok(Algorithm::Cart),
            _ => Err(format!("unknown algorithm '{s}' (expected id3, c45 or cart)")),
        }
    }
}

/// Rejects empty datasets and datasets with missing cells; numeric
/// predictors are rejected unless `allow_numeric`.
pub(crate) fn check_trainable(dataset: &Dataset, allow_numeric: bool) -> Result<(), LearnError> {
    if dataset.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let schema = &dataset.schema;
    if !allow_numeric {
        if let Some(a) = schema.predictors().find(|&a| !schema.attribute(a).is_nominal()) {
            return Err(LearnError::UnsupportedAttribute(schema.attribute(a).name.clone()));
        }
    }
    for (row, inst) in dataset.instances.iter().enumerate() {
        if let Some(col) = inst.values.iter().position(|v| v.is_missing()) {
            return Err(LearnError::UnsupportedMissing {
                row,
                attribute: schema.attribute(col).name.clone(),
            });
        }
    }
    Ok(())
}

/// Recomputes every node's class tally by routing `rows` through the tree.
pub(crate) fn annotate(node: &mut TreeNode, dataset: &Dataset, rows: &[usize]) {
    node.set_counts(crate::metrics::class_counts(dataset, rows));
    if node.is_leaf() {
        return;
    }
    let mut per_child: Vec<Vec<usize>> = vec![Vec::new(); node.children().len()];
    for &r in rows {
        if let Ok(Some(c)) = node.route(&dataset.instances[r]) {
            per_child[c].push(r);
        }
    }
    for (child, sub) in node.children_mut().into_iter().zip(per_child) {
        annotate(child, dataset, &sub);
    }
}

/// Indented text rendering, one line per branch.
pub fn render_tree(tree: &TreeNode, schema: &Schema) -> String {
    let mut out = String::new();
    if tree.is_leaf() {
        out.push_str(&leaf_text(tree, schema));
        out.push('\n');
    } else {
        render_into(tree, schema, 0, &mut out);
    }
    out
}

fn leaf_text(node: &TreeNode, schema: &Schema) -> String {
    match node {
        TreeNode::Leaf { label, counts } => {
            let n = counts.total();
            let errors = n - counts.counts()[*label];
            let name = &schema.class_labels()[*label];
            if errors > 0 {
                format!("{name} ({n}/{errors})")
            } else {
                format!("{name} ({n})")
            }
        }
        _ => "UNCLASSIFIED (0)".to_string(),
    }
}

fn branch_labels(node: &TreeNode, schema: &Schema) -> Vec<String> {
    let Some(attr) = node.attribute() else {
        return Vec::new();
    };
    let spec = schema.attribute(attr);
    let name = &spec.name;
    match node {
        TreeNode::Multiway { children, .. } => (0..children.len())
            .map(|v| format!("{name} = {}", spec.value_name(v).unwrap_or("?")))
            .collect(),
        TreeNode::Subset { left_values, .. } => {
            let k = spec.values().map_or(0, |v| v.len());
            let set = |pred: &dyn Fn(usize) -> bool| {
                (0..k)
                    .filter(|&v| pred(v))
                    .map(|v| spec.value_name(v).unwrap_or("?").to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            vec![
                format!("{name} IN {{{}}}", set(&|v| left_values.contains(&v))),
                format!("{name} IN {{{}}}", set(&|v| !left_values.contains(&v))),
            ]
        }
        TreeNode::Threshold { threshold, .. } => {
            vec![format!("{name} <= {threshold}"), format!("{name} > {threshold}")]
        }
        _ => Vec::new(),
    }
}

fn render_into(node: &TreeNode, schema: &Schema, depth: usize, out: &mut String) {
    let indent = "|   ".repeat(depth);
    for (label, child) in branch_labels(node, schema).into_iter().zip(node.children()) {
        if child.is_leaf() {
            let _ = writeln!(out, "{indent}{label}: {}", leaf_text(child, schema));
        } else {
            let _ = writeln!(out, "{indent}{label}");
            render_into(child, schema, depth + 1, out);
        }
    }
}
