use crate::data::Dataset;
use crate::error::LearnError;
use crate::metrics::{class_counts, entropy_of, impurity_decrease, nominal_partition, TOLERANCE};

use super::{check_trainable, LearnerParams, TreeNode};

/// Grows an unpruned ID3 tree: multiway splits on the nominal attribute with
/// the highest information gain. Branches that receive no training instances
/// become [`TreeNode::Empty`].
pub fn build_id3(dataset: &Dataset, params: &LearnerParams) -> Result<TreeNode, LearnError> {
    params.validate()?;
    check_trainable(dataset, false)?;
    let rows: Vec<usize> = (0..dataset.len()).collect();
    let available: Vec<usize> = dataset.schema.predictors().collect();
    Ok(grow(dataset, &rows, &available))
}

fn grow(dataset: &Dataset, rows: &[usize], available: &[usize]) -> TreeNode {
    let counts = class_counts(dataset, rows);
    if counts.is_pure() || available.is_empty() {
        return TreeNode::leaf(counts);
    }

    let mut best: Option<(usize, f64)> = None;
    for &attr in available {
        let gain = impurity_decrease(&counts, &nominal_partition(dataset, rows, attr), entropy_of);
        if best.is_none_or(|(_, g)| gain > g + TOLERANCE) {
            best = Some((attr, gain));
        }
    }
    let (attr, gain) = best.expect("at least one attribute");
    if gain <= TOLERANCE {
        return TreeNode::leaf(counts);
    }

    let k = dataset.schema.attribute(attr).values().expect("nominal").len();
    let mut branches = vec![Vec::new(); k];
    for &r in rows {
        let v = dataset.instances[r].get(attr).as_nominal().expect("checked nominal");
        branches[v].push(r);
    }
    let remaining: Vec<usize> = available.iter().copied().filter(|&a| a != attr).collect();
    let children = branches
        .iter()
        .map(|sub| {
            if sub.is_empty() {
                TreeNode::Empty
            } else {
                grow(dataset, sub, &remaining)
            }
        })
        .collect();
    TreeNode::Multiway {
        attribute: attr,
        counts,
        children,
    }
}
