//! Attribute-selection measures over class-count tallies: entropy and
//! information gain (ID3), split information and gain ratio (C4.5), and Gini
//! impurity with its binary-split decrease (CART).

use serde::{Deserialize, Serialize};

use crate::data::{AttributeSpec, Dataset, Value};
use crate::error::LearnError;

/// Absolute tolerance for tie detection and sign checks.
pub const TOLERANCE: f64 = 1e-12;

/// Per-class instance counts in declared class order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassCounts(Vec<usize>);

impl ClassCounts {
    pub fn new(counts: Vec<usize>) -> Self {
        assert!(!counts.is_empty(), "class counts need at least one class");
        ClassCounts(counts)
    }

    pub fn zeros(num_classes: usize) -> Self {
        ClassCounts::new(vec![0; num_classes])
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn add(&mut self, class: usize) {
        self.0[class] += 1;
    }

    /// Most frequent class; ties go to the earliest declared class.
    pub fn majority(&self) -> usize {
        let mut best = 0;
        for (i, &c) in self.0.iter().enumerate() {
            if c > self.0[best] {
                best = i;
            }
        }
        best
    }

    /// Instances not in the majority class.
    pub fn errors(&self) -> usize {
        self.total() - self.0[self.majority()]
    }

    pub fn is_pure(&self) -> bool {
        self.0.iter().filter(|&&c| c > 0).count() <= 1
    }

    /// Normalized distribution; `None` when the tally is empty.
    pub fn distribution(&self) -> Option<Vec<f64>> {
        let n = self.total();
        if n == 0 {
            return None;
        }
        Some(self.0.iter().map(|&c| c as f64 / n as f64).collect())
    }
}

/// Shannon entropy in bits, with 0·log 0 = 0. Zero for an empty tally.
pub fn entropy(counts: &ClassCounts) -> f64 {
    entropy_of(counts.counts())
}

pub(crate) fn entropy_of(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Gini impurity 1 − Σ p². Zero for an empty tally.
pub fn gini(counts: &ClassCounts) -> f64 {
    gini_of(counts.counts())
}

pub(crate) fn gini_of(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// Impurity decrease of splitting `parent` into `parts`.
pub(crate) fn impurity_decrease(parent: &ClassCounts, parts: &[ClassCounts], impurity: fn(&[usize]) -> f64) -> f64 {
    let n = parent.total() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let weighted: f64 = parts
        .iter()
        .map(|p| p.total() as f64 / n * impurity(p.counts()))
        .sum();
    impurity(parent.counts()) - weighted
}

/// Class tally over the given rows.
pub(crate) fn class_counts(dataset: &Dataset, rows: &[usize]) -> ClassCounts {
    let mut counts = ClassCounts::zeros(dataset.schema.num_classes());
    for &r in rows {
        if let Some(c) = dataset.class_of(r) {
            counts.add(c);
        }
    }
    counts
}

/// Class tallies per declared value of a nominal attribute.
pub(crate) fn nominal_partition(dataset: &Dataset, rows: &[usize], attribute: usize) -> Vec<ClassCounts> {
    let k = dataset.schema.attribute(attribute).values().map_or(0, |v| v.len());
    let mut parts = vec![ClassCounts::zeros(dataset.schema.num_classes()); k];
    for &r in rows {
        if let (Value::Nominal(v), Some(c)) = (dataset.instances[r].get(attribute), dataset.class_of(r)) {
            parts[v].add(c);
        }
    }
    parts
}

fn all_rows(dataset: &Dataset) -> Vec<usize> {
    (0..dataset.len()).collect()
}

/// Resolves a nominal, non-class attribute with no missing cells.
fn nominal_attribute(dataset: &Dataset, name: &str) -> Result<usize, LearnError> {
    let schema = &dataset.schema;
    let idx = schema
        .index_of(name)
        .ok_or_else(|| LearnError::UnknownAttribute(name.to_string()))?;
    if idx == schema.class_index() {
        return Err(LearnError::ClassAttribute(name.to_string()));
    }
    if !schema.attribute(idx).is_nominal() {
        return Err(LearnError::UnsupportedAttribute(name.to_string()));
    }
    for (row, inst) in dataset.instances.iter().enumerate() {
        for col in [idx, schema.class_index()] {
            if inst.get(col).is_missing() {
                return Err(LearnError::UnsupportedMissing {
                    row,
                    attribute: schema.attribute(col).name.clone(),
                });
            }
        }
    }
    Ok(idx)
}

/// Entropy of the class minus the weighted entropy after partitioning by
/// the attribute's values.
pub fn information_gain(dataset: &Dataset, attribute: &str) -> Result<f64, LearnError> {
    let idx = nominal_attribute(dataset, attribute)?;
    let rows = all_rows(dataset);
    let parent = class_counts(dataset, &rows);
    Ok(impurity_decrease(&parent, &nominal_partition(dataset, &rows, idx), entropy_of))
}

/// Entropy of the attribute's own value distribution.
pub fn split_info(dataset: &Dataset, attribute: &str) -> Result<f64, LearnError> {
    let idx = nominal_attribute(dataset, attribute)?;
    Ok(entropy_of(&dataset.value_tally(idx).expect("nominal")))
}

/// Information gain over split information. `Ok(None)` marks an attribute
/// whose split information is zero: it is not a split candidate.
pub fn gain_ratio(dataset: &Dataset, attribute: &str) -> Result<Option<f64>, LearnError> {
    let gain = information_gain(dataset, attribute)?;
    let si = split_info(dataset, attribute)?;
    Ok((si > TOLERANCE).then(|| gain / si))
}

/// Gini decrease of the binary split sending `left_subset` values left and
/// every other value right.
pub fn binary_gini_decrease(dataset: &Dataset, attribute: &str, left_subset: &[&str]) -> Result<f64, LearnError> {
    let idx = nominal_attribute(dataset, attribute)?;
    let spec = dataset.schema.attribute(idx);
    let mut in_left = vec![false; spec.values().expect("nominal").len()];
    for v in left_subset {
        let i = spec
            .value_index(v)
            .ok_or_else(|| LearnError::Domain(format!("'{v}' is not a value of '{attribute}'")))?;
        in_left[i] = true;
    }
    let rows = all_rows(dataset);
    let parts = nominal_partition(dataset, &rows, idx);
    let (left, right) = merge_sides(&parts, &in_left, dataset.schema.num_classes());
    if left.total() == 0 || right.total() == 0 {
        return Err(LearnError::Domain(format!(
            "subset must be a proper non-empty subset of the observed values of '{attribute}'"
        )));
    }
    Ok(impurity_decrease(&class_counts(dataset, &rows), &[left, right], gini_of))
}

pub(crate) fn merge_sides(parts: &[ClassCounts], in_left: &[bool], num_classes: usize) -> (ClassCounts, ClassCounts) {
    let mut left = vec![0; num_classes];
    let mut right = vec![0; num_classes];
    for (part, &l) in parts.iter().zip(in_left) {
        let side = if l { &mut left } else { &mut right };
        for (s, &c) in side.iter_mut().zip(part.counts()) {
            *s += c;
        }
    }
    (ClassCounts::new(left), ClassCounts::new(right))
}

/// Canonical two-way partitions of a nominal attribute's declared values.
/// Each partition is listed once, by the side holding the first value; the
/// result has 2^(K−1) − 1 entries, in increasing bitmask order of the
/// remaining values. Empty for K < 2 or numeric attributes.
pub fn enumerate_binary_partitions(attribute: &AttributeSpec) -> Vec<Vec<usize>> {
    let k = attribute.values().map_or(0, |v| v.len());
    canonical_subsets(&(0..k).collect::<Vec<_>>())
}

/// Canonical subsets over an arbitrary ordered value list.
pub(crate) fn canonical_subsets(values: &[usize]) -> Vec<Vec<usize>> {
    let k = values.len();
    if k < 2 {
        return Vec::new();
    }
    assert!(k <= 63, "too many values for exhaustive binary partitioning");
    let rest = k - 1;
    let full = (1u64 << rest) - 1;
    (0..full)
        .map(|mask| {
            let mut subset = vec![values[0]];
            subset.extend((0..rest).filter(|b| mask & (1 << b) != 0).map(|b| values[b + 1]));
            subset
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    InformationGain,
    GainRatio,
    GiniDecrease,
}

/// The branches a candidate split induces, by value name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partition {
    Multiway(Vec<String>),
    Subset { left: Vec<String>, right: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitStatistics {
    pub attribute: String,
    pub criterion: Criterion,
    /// `None` when the attribute is not a candidate (gain ratio with zero split information).
    pub value: Option<f64>,
    pub partition: Partition,
}

/// Scores every nominal predictor of the dataset under `criterion`. For the
/// Gini criterion each canonical binary partition is reported separately.
pub fn score_attributes(dataset: &Dataset, criterion: Criterion) -> Result<Vec<SplitStatistics>, LearnError> {
    let schema = &dataset.schema;
    let mut out = Vec::new();
    for idx in schema.predictors() {
        let spec = schema.attribute(idx);
        let Some(values) = spec.values() else { continue };
        match criterion {
            Criterion::InformationGain | Criterion::GainRatio => {
                let value = if criterion == Criterion::InformationGain {
                    Some(information_gain(dataset, &spec.name)?)
                } else {
                    gain_ratio(dataset, &spec.name)?
                };
                out.push(SplitStatistics {
                    attribute: spec.name.clone(),
                    criterion,
                    value,
                    partition: Partition::Multiway(values.to_vec()),
                });
            }
            Criterion::GiniDecrease => {
                for subset in enumerate_binary_partitions(spec) {
                    let left: Vec<&str> = subset.iter().map(|&i| values[i].as_str()).collect();
                    let right: Vec<String> = (0..values.len())
                        .filter(|i| !subset.contains(i))
                        .map(|i| values[i].clone())
                        .collect();
                    let value = binary_gini_decrease(dataset, &spec.name, &left).ok();
                    out.push(SplitStatistics {
                        attribute: spec.name.clone(),
                        criterion,
                        value,
                        partition: Partition::Subset {
                            left: left.iter().map(|s| s.to_string()).collect(),
                            right,
                        },
                    });
                }
            }
        }
    }
    Ok(out)
}
