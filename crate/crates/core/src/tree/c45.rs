use crate::data::Dataset;
use crate::error::LearnError;
use crate::metrics::{
    class_counts, entropy_of, impurity_decrease, nominal_partition, ClassCounts, TOLERANCE,
};

use super::numeric::{boundary_cuts, split_rows};
use super::pessimistic::prune_rows;
use super::{check_trainable, LearnerParams, TreeNode};

enum Choice {
    Nominal(usize),
    Threshold(usize, f64),
}

/// Grows a C4.5 tree by gain ratio and, when `params.pruning` is on, prunes
/// it with the pessimistic error bound.
///
/// Nominal attributes split multiway and are used once per path; numeric
/// attributes split at a class-boundary threshold and may be reused. A split
/// is admissible only when at least two branches hold `min_leaf` instances;
/// a threshold needs `min_leaf` on each side. Branches that receive no
/// training instances become leaves labelled with the parent's majority.
pub fn build_c45(dataset: &Dataset, params: &LearnerParams) -> Result<TreeNode, LearnError> {
    params.validate()?;
    check_trainable(dataset, true)?;
    let rows: Vec<usize> = (0..dataset.len()).collect();
    let nominal: Vec<usize> = dataset
        .schema
        .predictors()
        .filter(|&a| dataset.schema.attribute(a).is_nominal())
        .collect();
    let tree = grow(dataset, &rows, &nominal, params);
    Ok(if params.pruning {
        prune_rows(&tree, dataset, &rows, params.confidence_factor)
    } else {
        tree
    })
}

fn grow(dataset: &Dataset, rows: &[usize], nominal: &[usize], params: &LearnerParams) -> TreeNode {
    let counts = class_counts(dataset, rows);
    if counts.is_pure() || rows.len() < params.min_leaf {
        return TreeNode::leaf(counts);
    }
    let Some(choice) = best_split(dataset, rows, &counts, nominal, params) else {
        return TreeNode::leaf(counts);
    };
    let parent_label = counts.majority();
    let child = |sub: &[usize], nominal: &[usize]| {
        if sub.is_empty() {
            TreeNode::Leaf {
                label: parent_label,
                counts: ClassCounts::zeros(dataset.schema.num_classes()),
            }
        } else {
            grow(dataset, sub, nominal, params)
        }
    };
    match choice {
        Choice::Nominal(attr) => {
            let k = dataset.schema.attribute(attr).values().expect("nominal").len();
            let mut branches = vec![Vec::new(); k];
            for &r in rows {
                branches[dataset.instances[r].get(attr).as_nominal().expect("nominal")].push(r);
            }
            let remaining: Vec<usize> = nominal.iter().copied().filter(|&a| a != attr).collect();
            TreeNode::Multiway {
                attribute: attr,
                counts,
                children: branches.iter().map(|b| child(b, &remaining)).collect(),
            }
        }
        Choice::Threshold(attr, threshold) => {
            let (le, gt) = split_rows(dataset, rows, attr, threshold);
            TreeNode::Threshold {
                attribute: attr,
                threshold,
                counts,
                le: Box::new(child(&le, nominal)),
                gt: Box::new(child(&gt, nominal)),
            }
        }
    }
}

fn best_split(
    dataset: &Dataset,
    rows: &[usize],
    counts: &ClassCounts,
    nominal: &[usize],
    params: &LearnerParams,
) -> Option<Choice> {
    let schema = &dataset.schema;
    let mut best: Option<(Choice, f64)> = None;
    for attr in schema.predictors() {
        let scored = if schema.attribute(attr).is_nominal() {
            if !nominal.contains(&attr) {
                continue;
            }
            let parts = nominal_partition(dataset, rows, attr);
            if parts.iter().filter(|p| p.total() >= params.min_leaf).count() < 2 {
                continue;
            }
            let gain = impurity_decrease(counts, &parts, entropy_of);
            let sizes: Vec<usize> = parts.iter().map(ClassCounts::total).collect();
            ratio(gain, entropy_of(&sizes)).map(|r| (Choice::Nominal(attr), r))
        } else {
            // Threshold by gain, then the attribute competes on gain ratio.
            let mut best_cut: Option<(f64, f64, [usize; 2])> = None;
            for cut in boundary_cuts(dataset, rows, attr, params.min_leaf) {
                let gain = impurity_decrease(counts, &[cut.le.clone(), cut.gt.clone()], entropy_of);
                if best_cut.is_none_or(|(_, g, _)| gain > g + TOLERANCE) {
                    best_cut = Some((cut.threshold, gain, [cut.le.total(), cut.gt.total()]));
                }
            }
            best_cut.and_then(|(t, gain, sizes)| ratio(gain, entropy_of(&sizes)).map(|r| (Choice::Threshold(attr, t), r)))
        };
        if let Some((choice, r)) = scored {
            if best.as_ref().is_none_or(|(_, b)| r > b + TOLERANCE) {
                best = Some((choice, r));
            }
        }
    }
    best.map(|(c, _)| c)
}

/// Gain ratio of a candidate with positive gain and split information.
fn ratio(gain: f64, split_info: f64) -> Option<f64> {
    (gain > TOLERANCE && split_info > TOLERANCE).then(|| gain / split_info)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{AttributeSpec, Instance, Schema, Value};
    use crate::tree::classify;

    fn numeric_ds(points: &[(f64, usize)]) -> Dataset {
        let schema = Schema::new(vec![AttributeSpec::numeric("x"), AttributeSpec::nominal("c", &["p", "q"])], 1).unwrap();
        let inst = points
            .iter()
            .map(|&(x, c)| Instance::new(vec![Value::Numeric(x), Value::Nominal(c)]))
            .collect();
        Dataset::new(schema, inst).unwrap()
    }

    #[test]
    fn pure_dataset_is_a_leaf() {
        let d = numeric_ds(&[(1.0, 1), (2.0, 1), (3.0, 1)]);
        let tree = build_c45(&d, &LearnerParams::default()).unwrap();
        assert!(matches!(tree, TreeNode::Leaf { label: 1, .. }));
    }

    #[test]
    fn threshold_at_class_boundary() {
        let pts: Vec<(f64, usize)> = (1..=10).map(|v| (v as f64, usize::from(v > 5))).collect();
        let d = numeric_ds(&pts);
        let tree = build_c45(&d, &LearnerParams::default()).unwrap();
        match &tree {
            TreeNode::Threshold { threshold, le, gt, .. } => {
                assert_eq!(*threshold, 5.0);
                assert!(matches!(**le, TreeNode::Leaf { label: 0, .. }));
                assert!(matches!(**gt, TreeNode::Leaf { label: 1, .. }));
            }
            other => panic!("expected a threshold split, got {other:?}"),
        }
        // Instance order does not matter.
        let mut rev = pts.clone();
        rev.reverse();
        assert_eq!(build_c45(&numeric_ds(&rev), &LearnerParams::default()).unwrap(), tree);
        let probe = Instance::new(vec![Value::Numeric(5.5), Value::Missing]);
        assert_eq!(classify(&tree, &probe).unwrap().label(), Some(1));
    }

    #[test]
    fn numeric_attribute_reused_on_a_path() {
        // p q q p over 1..8 in pairs: needs two cuts on x.
        let pts = [(1.0, 0), (2.0, 0), (3.0, 1), (4.0, 1), (5.0, 1), (6.0, 1), (7.0, 0), (8.0, 0)];
        let tree = build_c45(&numeric_ds(&pts), &LearnerParams::unpruned()).unwrap();
        let d = numeric_ds(&pts);
        for inst in &d.instances {
            let want = inst.values[1].as_nominal();
            assert_eq!(classify(&tree, inst).unwrap().label(), want);
        }
        assert!(tree.depth() >= 2);
    }

    #[test]
    fn empty_branch_takes_parent_majority() {
        let schema = Schema::new(
            vec![
                AttributeSpec::nominal("a", &["x", "y", "z"]),
                AttributeSpec::nominal("c", &["p", "q"]),
            ],
            1,
        )
        .unwrap();
        let rows = [(0, 0), (0, 0), (1, 1), (1, 1), (1, 1)];
        let inst = rows
            .iter()
            .map(|&(a, c)| Instance::new(vec![Value::Nominal(a), Value::Nominal(c)]))
            .collect();
        let d = Dataset::new(schema, inst).unwrap();
        let tree = build_c45(&d, &LearnerParams::unpruned()).unwrap();
        let TreeNode::Multiway { children, .. } = &tree else {
            panic!("expected multiway split")
        };
        assert_eq!(
            children[2],
            TreeNode::Leaf {
                label: 1,
                counts: ClassCounts::zeros(2)
            }
        );
    }
}
