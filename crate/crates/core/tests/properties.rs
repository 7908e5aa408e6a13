mod common;

use common::{any_dataset, complete_dataset, nominal_dataset, permuted, with_permutation};
use edutree::arff::{parse_arff, write_arff};
use edutree::evaluation::stratified_folds;
use edutree::metrics::{binary_gini_decrease, gain_ratio, information_gain, split_info, TOLERANCE};
use edutree::rules::{extract_rules, extract_rules_merged, rules_classify};
use edutree::tree::{alpha_sequence, prune_to_alpha};
use edutree::{classify, Algorithm, Dataset, Instance, LearnerParams, TreeNode, Value};
use proptest::prelude::*;

fn training_errors(tree: &TreeNode, ds: &Dataset) -> usize {
    (0..ds.len())
        .filter(|&r| classify(tree, &ds.instances[r]).unwrap().label() != ds.class_of(r))
        .count()
}

fn algorithms_for(ds: &Dataset) -> Vec<Algorithm> {
    let all_nominal = ds.schema.attributes().iter().all(|a| a.is_nominal());
    Algorithm::ALL
        .into_iter()
        .filter(|&a| all_nominal || a != Algorithm::Id3)
        .collect()
}

fn shifted(inst: &Instance, ds: &Dataset) -> Instance {
    let values = inst
        .values
        .iter()
        .zip(ds.schema.attributes())
        .map(|(v, spec)| match (v, spec.values()) {
            (Value::Nominal(x), Some(domain)) => Value::Nominal((x + 1) % domain.len()),
            (Value::Numeric(x), _) => Value::Numeric(x + 0.5),
            (other, _) => *other,
        })
        .collect();
    Instance::new(values)
}

/// Training rows reaching each leaf, with the attributes tested above it.
fn leaf_rows(tree: &TreeNode, ds: &Dataset) -> Vec<(Vec<usize>, Vec<usize>)> {
    fn walk(node: &TreeNode, ds: &Dataset, rows: Vec<usize>, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Vec<usize>)>) {
        let Some(attr) = node.attribute() else {
            out.push((rows, path.clone()));
            return;
        };
        let children = node.children();
        let mut split = vec![Vec::new(); children.len()];
        for r in rows {
            split[node.route(&ds.instances[r]).unwrap().unwrap()].push(r);
        }
        path.push(attr);
        for (child, sub) in children.into_iter().zip(split) {
            walk(child, ds, sub, path, out);
        }
        path.pop();
    }
    let mut out = Vec::new();
    walk(tree, ds, (0..ds.len()).collect(), &mut Vec::new(), &mut out);
    out
}

fn is_strictly_binary(tree: &TreeNode) -> bool {
    match tree {
        TreeNode::Multiway { .. } => false,
        TreeNode::Leaf { .. } | TreeNode::Empty => true,
        split => split.children().len() == 2 && split.children().into_iter().all(is_strictly_binary),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn arff_write_then_parse_is_identity(ds in any_dataset()) {
        let text = write_arff(&ds, "generated relation");
        let back = parse_arff(&text).unwrap_or_else(|e| panic!("{e:?}\n{text}"));
        prop_assert_eq!(&back, &ds);
        prop_assert_eq!(write_arff(&back, "generated relation"), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn information_gain_is_bounded(ds in nominal_dataset()) {
        for a in ds.schema.predictors() {
            let name = &ds.schema.attribute(a).name;
            let ig = information_gain(&ds, name).unwrap();
            prop_assert!(ig >= -TOLERANCE, "{name}: {ig}");
            prop_assert!(ig <= split_info(&ds, name).unwrap() + 1e-9);
            if let Some(gr) = gain_ratio(&ds, name).unwrap() {
                prop_assert!((-TOLERANCE..=1.0 + 1e-9).contains(&gr));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn gini_decrease_symmetric_under_complement(ds in nominal_dataset(), mask in any::<u8>()) {
        for a in ds.schema.predictors() {
            let spec = ds.schema.attribute(a);
            let tally = ds.value_tally(a).unwrap();
            let observed: Vec<&str> = spec.values().unwrap().iter().enumerate()
                .filter(|(i, _)| tally[*i] > 0).map(|(_, v)| v.as_str()).collect();
            let side = |bit: u8| -> Vec<&str> {
                observed.iter().enumerate().filter(|(i, _)| mask >> i & 1 == bit).map(|(_, v)| *v).collect()
            };
            let (left, right) = (side(1), side(0));
            if left.is_empty() || right.is_empty() {
                continue;
            }
            let d1 = binary_gini_decrease(&ds, &spec.name, &left).unwrap();
            let d2 = binary_gini_decrease(&ds, &spec.name, &right).unwrap();
            prop_assert!((d1 - d2).abs() < 1e-12);
            prop_assert!(d1 >= -TOLERANCE);
        }
    }

    #[test]
    fn metrics_ignore_row_order((ds, order) in with_permutation(nominal_dataset())) {
        let shuffled = permuted(&ds, &order);
        for a in ds.schema.predictors() {
            let name = &ds.schema.attribute(a).name;
            let x = information_gain(&ds, name).unwrap();
            let y = information_gain(&shuffled, name).unwrap();
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn folds_partition_and_stratify(ds in nominal_dataset(), k in 2usize..=10, seed in any::<u64>()) {
        prop_assume!(k <= ds.len());
        let folds = stratified_folds(&ds, k, seed).unwrap();
        prop_assert_eq!(&folds, &stratified_folds(&ds, k, seed).unwrap());
        prop_assert!(folds.fold_of.iter().all(|&f| f < k));
        let sizes: Vec<usize> = (0..k).map(|f| folds.rows(f).len()).collect();
        prop_assert_eq!(sizes.iter().sum::<usize>(), ds.len());
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for c in 0..ds.schema.num_classes() {
            let per: Vec<usize> = (0..k)
                .map(|f| folds.rows(f).into_iter().filter(|&r| ds.class_of(r) == Some(c)).count())
                .collect();
            prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn trees_ignore_row_order((ds, order) in with_permutation(complete_dataset())) {
        let shuffled = permuted(&ds, &order);
        for a in algorithms_for(&ds) {
            for params in [LearnerParams::default(), LearnerParams::unpruned()] {
                prop_assert_eq!(a.build(&ds, &params).unwrap(), a.build(&shuffled, &params).unwrap(), "{}", a);
            }
        }
    }

    #[test]
    fn pruning_only_shrinks(ds in complete_dataset()) {
        for a in [Algorithm::C45, Algorithm::Cart] {
            let full = a.build(&ds, &LearnerParams::unpruned()).unwrap();
            let pruned = a.build(&ds, &LearnerParams::default()).unwrap();
            prop_assert!(pruned.node_count() <= full.node_count());
            prop_assert!(training_errors(&pruned, &ds) >= training_errors(&full, &ds));
        }
    }

    #[test]
    fn cart_is_binary_and_sequence_increases(ds in complete_dataset()) {
        let tree = Algorithm::Cart.build(&ds, &LearnerParams::unpruned()).unwrap();
        prop_assert!(is_strictly_binary(&tree));
        let steps = alpha_sequence(&tree, &ds);
        prop_assert_eq!(steps[0].alpha, 0.0);
        prop_assert!(steps.windows(2).all(|w| w[0].alpha < w[1].alpha));
        prop_assert!(steps.last().unwrap().tree.is_leaf());
        prop_assert!(steps.windows(2).all(|w| w[1].tree.node_count() < w[0].tree.node_count()));
        prop_assert_eq!(prune_to_alpha(&tree, &ds, 0.0), tree.clone());
        prop_assert!(prune_to_alpha(&tree, &ds, 2.0).is_leaf());
    }

    #[test]
    fn multiway_splits_cover_declared_values(ds in nominal_dataset()) {
        for a in [Algorithm::Id3, Algorithm::C45] {
            let tree = a.build(&ds, &LearnerParams::unpruned()).unwrap();
            let mut stack = vec![&tree];
            while let Some(node) = stack.pop() {
                if let TreeNode::Multiway { attribute, children, .. } = node {
                    prop_assert_eq!(children.len(), ds.schema.attribute(*attribute).values().unwrap().len());
                }
                stack.extend(node.children());
            }
        }
    }

    #[test]
    fn rules_agree_with_tree(ds in complete_dataset()) {
        for a in algorithms_for(&ds) {
            let tree = a.build(&ds, &LearnerParams::unpruned()).unwrap();
            let rules = extract_rules(&tree, &ds.schema);
            prop_assert_eq!(rules.rules.len(), tree.leaf_count());
            let merged = extract_rules_merged(&tree, &ds.schema);
            for inst in &ds.instances {
                prop_assert_eq!(rules_classify(&rules, inst).unwrap(), classify(&tree, inst).unwrap());
                prop_assert_eq!(
                    rules_classify(&merged, inst).unwrap().label(),
                    classify(&tree, inst).unwrap().label()
                );
            }
            // Shifted copies of the rows reach combinations absent from training.
            for inst in ds.instances.iter().map(|i| shifted(i, &ds)) {
                prop_assert_eq!(rules_classify(&rules, &inst).unwrap(), classify(&tree, &inst).unwrap());
            }
        }
    }

    #[test]
    fn unpruned_trees_stop_only_without_gain(ds in nominal_dataset()) {
        let params = LearnerParams { min_leaf: 1, ..LearnerParams::unpruned() };
        let id3 = Algorithm::Id3.build(&ds, &params).unwrap();
        for (rows, path) in leaf_rows(&id3, &ds) {
            let node = ds.subset(&rows);
            if node.class_tally().iter().filter(|&&c| c > 0).count() < 2 {
                continue;
            }
            for a in ds.schema.predictors().filter(|a| !path.contains(a)) {
                let ig = information_gain(&node, &ds.schema.attribute(a).name).unwrap();
                prop_assert!(ig <= TOLERANCE, "impure ID3 leaf with gain {ig}");
            }
        }
        let cart = Algorithm::Cart.build(&ds, &params).unwrap();
        for (rows, _) in leaf_rows(&cart, &ds) {
            let node = ds.subset(&rows);
            if node.class_tally().iter().filter(|&&c| c > 0).count() < 2 {
                continue;
            }
            for a in ds.schema.predictors() {
                let spec = ds.schema.attribute(a);
                let tally = node.value_tally(a).unwrap();
                let observed: Vec<&str> = spec.values().unwrap().iter().enumerate()
                    .filter(|(i, _)| tally[*i] > 0).map(|(_, v)| v.as_str()).collect();
                for mask in 1..(1u32 << observed.len()) - 1 {
                    let left: Vec<&str> = observed.iter().enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| *v).collect();
                    let d = binary_gini_decrease(&node, &spec.name, &left).unwrap();
                    prop_assert!(d <= TOLERANCE, "impure CART leaf with decrease {d}");
                }
            }
        }
    }
}
