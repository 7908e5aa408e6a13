use crate::data::Dataset;
use crate::metrics::TOLERANCE;

use super::{annotate, TreeNode};

/// Upper confidence bound on the error rate of a leaf that misclassifies
/// `errors` of `n` training instances: the rate `p` at which observing at
/// most `errors` errors has probability `confidence`, i.e. the one-sided
/// binomial bound with `P(X <= errors; n, p) = confidence`.
pub fn pessimistic_error_bound(errors: usize, n: usize, confidence: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if errors >= n {
        return 1.0;
    }
    if errors == 0 {
        return 1.0 - confidence.powf(1.0 / n as f64);
    }
    // The CDF is decreasing in p; bisect.
    let (mut lo, mut hi) = (errors as f64 / n as f64, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binomial_cdf(errors, n, mid) > confidence {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// P(X <= k) for X ~ Binomial(n, p), summed in log space.
fn binomial_cdf(k: usize, n: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if k >= n { 1.0 } else { 0.0 };
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut log_choose = 0.0;
    let mut sum = 0.0;
    for i in 0..=k {
        if i > 0 {
            log_choose += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        sum += (log_choose + i as f64 * lp + (n - i) as f64 * lq).exp();
    }
    sum.min(1.0)
}

fn estimated_errors(n: usize, errors: usize, confidence: f64) -> f64 {
    n as f64 * pessimistic_error_bound(errors, n, confidence)
}

/// Bottom-up subtree replacement: a subtree becomes its majority leaf when
/// the leaf's estimated error (training count times the upper bound) does
/// not exceed the summed estimates of the subtree's leaves.
pub fn prune_pessimistic(tree: &TreeNode, training: &Dataset, confidence_factor: f64) -> TreeNode {
    let rows: Vec<usize> = (0..training.len()).collect();
    prune_rows(tree, training, &rows, confidence_factor)
}

pub(crate) fn prune_rows(tree: &TreeNode, training: &Dataset, rows: &[usize], confidence: f64) -> TreeNode {
    let mut tree = tree.clone();
    annotate(&mut tree, training, rows);
    prune_node(tree, confidence).0
}

fn prune_node(node: TreeNode, confidence: f64) -> (TreeNode, f64) {
    match node {
        TreeNode::Empty => (TreeNode::Empty, 0.0),
        TreeNode::Leaf { label, counts } => {
            let n = counts.total();
            let est = estimated_errors(n, n - counts.counts()[label], confidence);
            (TreeNode::Leaf { label, counts }, est)
        }
        mut split => {
            let counts = split.counts().expect("split nodes carry counts").clone();
            let mut subtree_est = 0.0;
            for child in split.children_mut() {
                let (pruned, est) = prune_node(std::mem::replace(child, TreeNode::Empty), confidence);
                *child = pruned;
                subtree_est += est;
            }
            let leaf_est = estimated_errors(counts.total(), counts.errors(), confidence);
            if leaf_est <= subtree_est + TOLERANCE {
                (TreeNode::leaf(counts), leaf_est)
            } else {
                (split, subtree_est)
            }
        }
    }
}
