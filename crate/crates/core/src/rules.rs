//! IF-THEN rules read off a tree, one per leaf.

use std::fmt::Write as _;

use serde::Serialize;

use crate::data::{Instance, Schema, Value};
use crate::error::LearnError;
use crate::metrics::ClassCounts;
use crate::tree::{Prediction, TreeNode};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "test", content = "value", rename_all = "snake_case")]
pub enum Test {
    Equals(usize),
    In(Vec<usize>),
    LessEq(f64),
    Greater(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub attribute: usize,
    pub test: Test,
}

impl Condition {
    fn matches(&self, instance: &Instance) -> Result<bool, LearnError> {
        let value = instance.get(self.attribute);
        Ok(match (&self.test, value) {
            (_, Value::Missing) => return Err(LearnError::MissingAtSplit(self.attribute)),
            (Test::Equals(v), Value::Nominal(x)) => x == *v,
            (Test::In(vs), Value::Nominal(x)) => vs.contains(&x),
            (Test::LessEq(t), Value::Numeric(x)) => x <= *t,
            (Test::Greater(t), Value::Numeric(x)) => x > *t,
            _ => {
                return Err(LearnError::Domain(format!(
                    "value {value:?} does not fit the test on attribute {}",
                    self.attribute
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Consequent {
    Class(usize),
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub consequent: Consequent,
    /// Training tally of the source leaf.
    pub counts: Option<ClassCounts>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
}

/// One rule per leaf, depth-first in child order, conditions from root to
/// leaf. The schema supplies the declared domain for the right-hand side of
/// subset splits.
pub fn extract_rules(tree: &TreeNode, schema: &Schema) -> RuleSet {
    let mut rules = Vec::new();
    walk(tree, schema, false, &mut Vec::new(), &mut rules);
    RuleSet { rules }
}

/// Like [`extract_rules`], but runs of adjacent sibling leaves under a
/// multiway split that predict the same class become a single rule with an
/// `In` condition. The merged set still partitions the instance space.
pub fn extract_rules_merged(tree: &TreeNode, schema: &Schema) -> RuleSet {
    let mut rules = Vec::new();
    walk(tree, schema, true, &mut Vec::new(), &mut rules);
    RuleSet { rules }
}

fn leaf_rule(node: &TreeNode, conditions: &[Condition]) -> Rule {
    match node {
        TreeNode::Leaf { label, counts } => Rule {
            conditions: conditions.to_vec(),
            consequent: Consequent::Class(*label),
            counts: Some(counts.clone()),
        },
        _ => Rule {
            conditions: conditions.to_vec(),
            consequent: Consequent::Unclassified,
            counts: None,
        },
    }
}

fn walk(node: &TreeNode, schema: &Schema, merge: bool, path: &mut Vec<Condition>, out: &mut Vec<Rule>) {
    let mut descend = |child: &TreeNode, attribute: usize, test: Test, out: &mut Vec<Rule>| {
        path.push(Condition { attribute, test });
        walk(child, schema, merge, path, out);
        path.pop();
    };
    match node {
        TreeNode::Leaf { .. } | TreeNode::Empty => out.push(leaf_rule(node, path)),
        TreeNode::Multiway {
            attribute, children, ..
        } => {
            let mut v = 0;
            while v < children.len() {
                let run = match &children[v] {
                    TreeNode::Leaf { label: l, .. } if merge => children[v..]
                        .iter()
                        .take_while(|c| matches!(c, TreeNode::Leaf { label, .. } if label == l))
                        .count(),
                    _ => 1,
                };
                if run == 1 {
                    descend(&children[v], *attribute, Test::Equals(v), out);
                } else {
                    let mut counts = vec![0; schema.num_classes()];
                    for c in &children[v..v + run] {
                        for (total, n) in counts.iter_mut().zip(c.counts().expect("leaf").counts()) {
                            *total += n;
                        }
                    }
                    let TreeNode::Leaf { label, .. } = &children[v] else {
                        unreachable!("runs consist of leaves")
                    };
                    let merged = TreeNode::Leaf {
                        label: *label,
                        counts: ClassCounts::new(counts),
                    };
                    descend(&merged, *attribute, Test::In((v..v + run).collect()), out);
                }
                v += run;
            }
        }
        TreeNode::Subset {
            attribute,
            left_values,
            left,
            right,
            ..
        } => {
            let k = schema.attribute(*attribute).values().map_or(0, |v| v.len());
            let complement = (0..k).filter(|v| !left_values.contains(v)).collect();
            descend(left, *attribute, Test::In(left_values.clone()), out);
            descend(right, *attribute, Test::In(complement), out);
        }
        TreeNode::Threshold {
            attribute,
            threshold,
            le,
            gt,
            ..
        } => {
            descend(le, *attribute, Test::LessEq(*threshold), out);
            descend(gt, *attribute, Test::Greater(*threshold), out);
        }
    }
}

/// Applies the first rule whose conditions all hold.
pub fn rules_classify(rules: &RuleSet, instance: &Instance) -> Result<Prediction, LearnError> {
    'rules: for rule in &rules.rules {
        for c in &rule.conditions {
            if !c.matches(instance)? {
                continue 'rules;
            }
        }
        return Ok(match rule.consequent {
            Consequent::Class(label) => {
                let distribution = rule
                    .counts
                    .as_ref()
                    .and_then(|c| c.distribution())
                    .unwrap_or_else(|| {
                        let n = rule.counts.as_ref().map_or(label + 1, |c| c.counts().len());
                        let mut one_hot = vec![0.0; n];
                        one_hot[label] = 1.0;
                        one_hot
                    });
                Prediction::Class { label, distribution }
            }
            Consequent::Unclassified => Prediction::Unclassified,
        });
    }
    Err(LearnError::NoMatchingRule)
}

fn quoted(schema: &Schema, attribute: usize, value: usize) -> String {
    format!("'{}'", schema.attribute(attribute).value_name(value).unwrap_or("?"))
}

/// `PSM = 'First'`, `CTG IN {'Good', 'Average'}`, `x <= 2.5`.
pub fn render_condition(condition: &Condition, schema: &Schema) -> String {
    let name = &schema.attribute(condition.attribute).name;
    match &condition.test {
        Test::Equals(v) => format!("{name} = {}", quoted(schema, condition.attribute, *v)),
        Test::In(vs) => {
            let items: Vec<String> = vs.iter().map(|&v| quoted(schema, condition.attribute, v)).collect();
            format!("{name} IN {{{}}}", items.join(", "))
        }
        Test::LessEq(t) => format!("{name} <= {t}"),
        Test::Greater(t) => format!("{name} > {t}"),
    }
}

/// `ESM = 'First'` or `ESM = UNCLASSIFIED`.
pub fn render_consequent(rule: &Rule, schema: &Schema) -> String {
    let class = &schema.class_attribute().name;
    match rule.consequent {
        Consequent::Class(label) => format!("{class} = '{}'", schema.class_labels()[label]),
        Consequent::Unclassified => format!("{class} = UNCLASSIFIED"),
    }
}

pub fn render_rule(rule: &Rule, schema: &Schema) -> String {
    let lhs = if rule.conditions.is_empty() {
        "TRUE".to_string()
    } else {
        rule.conditions
            .iter()
            .map(|c| render_condition(c, schema))
            .collect::<Vec<_>>()
            .join(" AND ")
    };
    format!("IF {lhs} THEN {}", render_consequent(rule, schema))
}

/// One rule per line.
pub fn render_rules(rules: &RuleSet, schema: &Schema) -> String {
    let mut out = String::new();
    for rule in &rules.rules {
        let _ = writeln!(out, "{}", render_rule(rule, schema));
    }
    out
}
