use crate::data::Dataset;
use crate::error::LearnError;
use crate::metrics::{canonical_subsets, class_counts, gini_of, impurity_decrease, merge_sides, nominal_partition, TOLERANCE};

use super::cost_complexity::prune_rows;
use super::numeric::{boundary_cuts, split_rows};
use super::{check_trainable, LearnerParams, TreeNode};

enum Choice {
    Subset(usize, Vec<usize>),
    Threshold(usize, f64),
}

/// Grows a binary CART tree by Gini decrease and, when `params.pruning` is
/// on, prunes it by cost complexity.
///
/// Nominal splits partition the values observed at the node; a declared
/// value not observed there follows the branch with more training instances
/// (left on ties). Every candidate must leave `min_leaf` instances on both
/// sides, so nodes with fewer than `2 * min_leaf` instances stay leaves.
pub fn build_cart(dataset: &Dataset, params: &LearnerParams) -> Result<TreeNode, LearnError> {
    params.validate()?;
    check_trainable(dataset, true)?;
    let rows: Vec<usize> = (0..dataset.len()).collect();
    let tree = grow_rows(dataset, &rows, params.min_leaf);
    Ok(if params.pruning {
        prune_rows(&tree, dataset, &rows, params)
    } else {
        tree
    })
}

pub(crate) fn grow_rows(dataset: &Dataset, rows: &[usize], min_leaf: usize) -> TreeNode {
    let counts = class_counts(dataset, rows);
    if counts.is_pure() || rows.len() < 2 * min_leaf {
        return TreeNode::leaf(counts);
    }
    let Some(choice) = best_split(dataset, rows, min_leaf) else {
        return TreeNode::leaf(counts);
    };
    match choice {
        Choice::Subset(attr, observed_left) => {
            let k = dataset.schema.attribute(attr).values().expect("nominal").len();
            let value = |r: usize| dataset.instances[r].get(attr).as_nominal().expect("nominal");
            let (left, right): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| observed_left.contains(&value(r)));
            let observed: Vec<bool> = {
                let mut seen = vec![false; k];
                rows.iter().for_each(|&r| seen[value(r)] = true);
                seen
            };
            let unseen_left = left.len() >= right.len();
            let left_values: Vec<usize> = (0..k)
                .filter(|&v| observed_left.contains(&v) || (!observed[v] && unseen_left))
                .collect();
            TreeNode::Subset {
                attribute: attr,
                left_values,
                counts,
                left: Box::new(grow_rows(dataset, &left, min_leaf)),
                right: Box::new(grow_rows(dataset, &right, min_leaf)),
            }
        }
        Choice::Threshold(attr, threshold) => {
            let (le, gt) = split_rows(dataset, rows, attr, threshold);
            TreeNode::Threshold {
                attribute: attr,
                threshold,
                counts,
                le: Box::new(grow_rows(dataset, &le, min_leaf)),
                gt: Box::new(grow_rows(dataset, &gt, min_leaf)),
            }
        }
    }
}

fn best_split(dataset: &Dataset, rows: &[usize], min_leaf: usize) -> Option<Choice> {
    let schema = &dataset.schema;
    let num_classes = schema.num_classes();
    let parent = class_counts(dataset, rows);
    let mut best: Option<(Choice, f64)> = None;
    let mut offer = |choice: Choice, decrease: f64| {
        if best.as_ref().is_none_or(|(_, d)| decrease > d + TOLERANCE) {
            best = Some((choice, decrease));
        }
    };
    for attr in schema.predictors() {
        if schema.attribute(attr).is_nominal() {
            let parts = nominal_partition(dataset, rows, attr);
            let observed: Vec<usize> = (0..parts.len()).filter(|&v| parts[v].total() > 0).collect();
            for subset in canonical_subsets(&observed) {
                let in_left: Vec<bool> = (0..parts.len()).map(|v| subset.contains(&v)).collect();
                let (left, right) = merge_sides(&parts, &in_left, num_classes);
                if left.total() < min_leaf || right.total() < min_leaf {
                    continue;
                }
                let d = impurity_decrease(&parent, &[left, right], gini_of);
                offer(Choice::Subset(attr, subset), d);
            }
        } else {
            for cut in boundary_cuts(dataset, rows, attr, min_leaf) {
                let d = impurity_decrease(&parent, &[cut.le, cut.gt], gini_of);
                offer(Choice::Threshold(attr, cut.threshold), d);
            }
        }
    }
    best.filter(|(_, d)| *d > TOLERANCE).map(|(c, _)| c)
}
