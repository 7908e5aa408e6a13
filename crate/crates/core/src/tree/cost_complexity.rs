use std::cmp::Ordering;

use crate::data::{Dataset, Instance, Value};
use crate::evaluation::assign_folds;
use crate::metrics::TOLERANCE;

use super::cart::grow_rows;
use super::{annotate, classify, LearnerParams, Prediction, TreeNode};

/// One tree of the weakest-link sequence and the complexity parameter at
/// which it becomes optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct PruningStep {
    pub alpha: f64,
    pub tree: TreeNode,
}

/// Weakest-link pruning sequence of `tree` on `training`.
///
/// Risk is the resubstitution error rate, errors over the root's instance
/// count. The first step has `alpha = 0` and holds the tree with every
/// zero-cost split removed; each later step collapses all nodes sharing the
/// smallest link strength `g = (R(t) - R(T_t)) / (|leaves(T_t)| - 1)`. The
/// last step is the root leaf. Alphas are strictly increasing.
pub fn alpha_sequence(tree: &TreeNode, training: &Dataset) -> Vec<PruningStep> {
    let rows: Vec<usize> = (0..training.len()).collect();
    sequence_rows(tree, training, &rows)
}

/// The sequence member selected by `alpha`: the last step whose alpha does
/// not exceed it. `alpha <= 0` returns the tree unchanged.
pub fn prune_to_alpha(tree: &TreeNode, training: &Dataset, alpha: f64) -> TreeNode {
    if alpha <= 0.0 {
        return tree.clone();
    }
    let steps = alpha_sequence(tree, training);
    pick(&steps, alpha).clone()
}

/// Cost-complexity pruning with the subtree chosen by internal stratified
/// cross-validation and the one-standard-error rule.
pub fn prune_cost_complexity(tree: &TreeNode, training: &Dataset, params: &LearnerParams) -> TreeNode {
    let rows: Vec<usize> = (0..training.len()).collect();
    prune_rows(tree, training, &rows, params)
}

pub(crate) fn prune_rows(tree: &TreeNode, training: &Dataset, rows: &[usize], params: &LearnerParams) -> TreeNode {
    let steps = sequence_rows(tree, training, rows);
    let n = rows.len();
    let k = params.cc_folds.min(n);
    if steps.len() == 1 || k < 2 {
        return steps[0].tree.clone();
    }

    // Fold membership must not depend on the order of the training rows.
    let mut sorted = rows.to_vec();
    sorted.sort_by(|&a, &b| compare_instances(&training.instances[a], &training.instances[b]));
    let classes: Vec<usize> = sorted.iter().filter_map(|&r| training.class_of(r)).collect();
    let fold_of = assign_folds(&classes, training.schema.num_classes(), k, params.seed);

    let betas: Vec<f64> = (0..steps.len())
        .map(|i| match steps.get(i + 1) {
            Some(next) => (steps[i].alpha * next.alpha).sqrt(),
            None => f64::INFINITY,
        })
        .collect();
    let mut errors = vec![0usize; steps.len()];
    for fold in 0..k {
        let (mut train, mut test) = (Vec::new(), Vec::new());
        for (&r, &f) in sorted.iter().zip(&fold_of) {
            if f == fold {
                test.push(r);
            } else {
                train.push(r);
            }
        }
        if train.is_empty() || test.is_empty() {
            continue;
        }
        let grown = grow_rows(training, &train, params.min_leaf);
        let fold_steps = sequence_rows(&grown, training, &train);
        for (i, &beta) in betas.iter().enumerate() {
            let candidate = pick(&fold_steps, beta);
            errors[i] += test
                .iter()
                .filter(|&&r| match classify(candidate, &training.instances[r]) {
                    Ok(Prediction::Class { label, .. }) => Some(label) != training.class_of(r),
                    _ => true,
                })
                .count();
        }
    }

    let cv: Vec<f64> = errors.iter().map(|&e| e as f64 / n as f64).collect();
    let best = cv.iter().copied().fold(f64::INFINITY, f64::min);
    let se = (best * (1.0 - best) / n as f64).sqrt();
    let chosen = (0..cv.len()).rev().find(|&i| cv[i] <= best + se + TOLERANCE).unwrap_or(0);
    steps[chosen].tree.clone()
}

fn pick(steps: &[PruningStep], alpha: f64) -> &TreeNode {
    let i = steps.iter().rposition(|s| s.alpha <= alpha + TOLERANCE).unwrap_or(0);
    &steps[i].tree
}

pub(crate) fn sequence_rows(tree: &TreeNode, training: &Dataset, rows: &[usize]) -> Vec<PruningStep> {
    let mut current = tree.clone();
    annotate(&mut current, training, rows);
    let n_root = rows.len().max(1) as f64;
    while collapse(&mut current, 0.0, n_root) {}
    let mut steps = vec![PruningStep {
        alpha: 0.0,
        tree: current.clone(),
    }];
    while !current.is_leaf() {
        let g_min = weakest_link(&current, n_root);
        collapse(&mut current, g_min, n_root);
        let last = steps.last_mut().expect("sequence starts non-empty");
        if g_min > last.alpha + TOLERANCE {
            steps.push(PruningStep {
                alpha: g_min,
                tree: current.clone(),
            });
        } else {
            last.tree = current.clone();
        }
    }
    steps
}

/// Training errors and leaf count of the subtree below `node`.
fn subtree_stats(node: &TreeNode) -> (usize, usize) {
    match node {
        TreeNode::Empty => (0, 1),
        TreeNode::Leaf { label, counts } => (counts.total() - counts.counts()[*label], 1),
        split => split.children().iter().fold((0, 0), |(e, l), c| {
            let (ce, cl) = subtree_stats(c);
            (e + ce, l + cl)
        }),
    }
}

fn link_strength(node: &TreeNode, n_root: f64) -> f64 {
    let (sub_errors, leaves) = subtree_stats(node);
    let own = node.counts().map_or(0, |c| c.errors());
    (own as f64 - sub_errors as f64) / n_root / (leaves - 1) as f64
}

fn weakest_link(node: &TreeNode, n_root: f64) -> f64 {
    if node.is_leaf() {
        return f64::INFINITY;
    }
    node.children()
        .iter()
        .map(|c| weakest_link(c, n_root))
        .fold(link_strength(node, n_root), f64::min)
}

/// Collapses, top-down, every split whose link strength is within
/// tolerance of `limit`. Reports whether anything changed.
fn collapse(node: &mut TreeNode, limit: f64, n_root: f64) -> bool {
    if node.is_leaf() {
        return false;
    }
    if link_strength(node, n_root) <= limit + TOLERANCE {
        *node = TreeNode::leaf(node.counts().expect("split nodes carry counts").clone());
        return true;
    }
    let mut changed = false;
    for child in node.children_mut() {
        changed |= collapse(child, limit, n_root);
    }
    changed
}

fn compare_values(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Nominal(x), Value::Nominal(y)) => x.cmp(y),
        (Value::Numeric(x), Value::Numeric(y)) => x.total_cmp(y),
        _ => rank(a).cmp(&rank(b)),
    }
}

fn rank(v: &Value) -> u8 {
    match v {
        Value::Nominal(_) => 0,
        Value::Numeric(_) => 1,
        Value::Missing => 2,
    }
}

fn compare_instances(a: &Instance, b: &Instance) -> Ordering {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| compare_values(x, y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.values.len().cmp(&b.values.len()))
}
