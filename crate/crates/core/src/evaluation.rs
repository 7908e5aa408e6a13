//! Stratified cross-validation, confusion matrices and accuracy reports.
//!
//! Fold assignment shuffles each class with SplitMix64 seeded by the run
//! seed (Fisher-Yates, drawing `next_u64() % (i + 1)` for `i` from the last
//! index down to 1), then deals instances round-robin with one counter
//! shared across classes in declared order.

use std::fmt::Write as _;
use std::time::Instant;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::Dataset;
use crate::error::EvalError;
use crate::tree::{classify, Algorithm, LearnerParams, Prediction};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of: Vec<usize>,
}

impl FoldAssignment {
    /// Row indices of one fold, ascending.
    pub fn rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&r| self.fold_of[r] == fold).collect()
    }

    /// Row indices outside one fold, ascending.
    pub fn complement(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&r| self.fold_of[r] != fold).collect()
    }
}

pub fn stratified_folds(dataset: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment, EvalError> {
    let n = dataset.len();
    if n == 0 {
        return Err(EvalError::Empty);
    }
    if k < 2 || k > n {
        return Err(EvalError::FoldCount { k, n });
    }
    let num_classes = dataset.schema.num_classes();
    // Rows without a class form a trailing group of their own.
    let classes: Vec<usize> = (0..n).map(|r| dataset.class_of(r).unwrap_or(num_classes)).collect();
    Ok(FoldAssignment {
        k,
        fold_of: assign_folds(&classes, num_classes + 1, k, seed),
    })
}

pub(crate) fn assign_folds(classes: &[usize], num_classes: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &c) in classes.iter().enumerate() {
        groups[c].push(i);
    }
    let mut fold_of = vec![0; classes.len()];
    let mut next = 0;
    for group in &mut groups {
        for i in (1..group.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            group.swap(i, j);
        }
        for &row in group.iter() {
            fold_of[row] = next % k;
            next += 1;
        }
    }
    fold_of
}

/// Actual-by-predicted counts over classified instances, with the
/// unclassified instances tallied separately per actual class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub cells: Vec<Vec<usize>>,
    pub unclassified_per_actual: Vec<usize>,
}

impl ConfusionMatrix {
    pub fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        ConfusionMatrix {
            labels,
            cells: vec![vec![0; n]; n],
            unclassified_per_actual: vec![0; n],
        }
    }

    pub fn correct(&self) -> usize {
        (0..self.labels.len()).map(|i| self.cells[i][i]).sum()
    }

    pub fn classified(&self) -> usize {
        self.cells.iter().flatten().sum()
    }

    pub fn unclassified(&self) -> usize {
        self.unclassified_per_actual.iter().sum()
    }

    pub fn total(&self) -> usize {
        self.classified() + self.unclassified()
    }
}

/// Tallies `(actual class, prediction)` pairs. Class indices refer to
/// `labels`.
pub fn confusion_from_pairs(pairs: &[(usize, Prediction)], labels: &[String]) -> Result<ConfusionMatrix, EvalError> {
    let mut m = ConfusionMatrix::zeros(labels.to_vec());
    let check = |c: usize| {
        if c < labels.len() {
            Ok(c)
        } else {
            Err(EvalError::UnknownLabel(format!("#{c}")))
        }
    };
    for (actual, prediction) in pairs {
        let a = check(*actual)?;
        match prediction.label() {
            Some(p) => m.cells[a][check(p)?] += 1,
            None => m.unclassified_per_actual[a] += 1,
        }
    }
    Ok(m)
}

/// Per-class precision as a percent rounded to one decimal; `None` where
/// nothing was predicted as that class.
pub fn precision_per_class(matrix: &ConfusionMatrix) -> Vec<Option<f64>> {
    let n = matrix.labels.len();
    (0..n)
        .map(|c| {
            let column: usize = (0..n).map(|a| matrix.cells[a][c]).sum();
            (column > 0).then(|| (1000.0 * matrix.cells[c][c] as f64 / column as f64).round() / 10.0)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub algorithm: Algorithm,
    pub matrix: ConfusionMatrix,
    pub correct_pct: f64,
    pub incorrect_pct: f64,
    pub unclassified_pct: f64,
    pub per_class_precision: Vec<Option<f64>>,
    /// Seconds to build on the full dataset, to the millisecond; `None`
    /// when timing is not reported.
    pub build_time_seconds: Option<f64>,
    pub k: usize,
    pub seed: u64,
}

impl EvaluationReport {
    pub fn from_matrix(algorithm: Algorithm, matrix: ConfusionMatrix, k: usize, seed: u64) -> Result<Self, EvalError> {
        let total = matrix.total();
        if total == 0 {
            return Err(EvalError::Empty);
        }
        let pct = |x: usize| 100.0 * x as f64 / total as f64;
        let correct = matrix.correct();
        let unclassified = matrix.unclassified();
        Ok(EvaluationReport {
            algorithm,
            correct_pct: pct(correct),
            incorrect_pct: pct(total - correct - unclassified),
            unclassified_pct: pct(unclassified),
            per_class_precision: precision_per_class(&matrix),
            matrix,
            build_time_seconds: None,
            k,
            seed,
        })
    }
}

/// Stratified k-fold cross-validation. Folds run in parallel and their
/// predictions are gathered in fold order, so the result does not depend on
/// scheduling. Build time is taken from one extra pass on the full data.
pub fn cross_validate(
    algorithm: Algorithm,
    dataset: &Dataset,
    params: &LearnerParams,
    k: usize,
    seed: u64,
) -> Result<EvaluationReport, EvalError> {
    let folds = stratified_folds(dataset, k, seed)?;
    let per_fold: Vec<Vec<(usize, Prediction)>> = (0..k)
        .into_par_iter()
        .map(|fold| -> Result<_, EvalError> {
            let train = dataset.subset(&folds.complement(fold));
            let tree = algorithm.build(&train, params)?;
            folds
                .rows(fold)
                .into_iter()
                .map(|r| {
                    let actual = dataset.class_of(r).ok_or(EvalError::UnknownLabel("?".into()))?;
                    Ok((actual, classify(&tree, &dataset.instances[r])?))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let pairs: Vec<(usize, Prediction)> = per_fold.into_iter().flatten().collect();
    let matrix = confusion_from_pairs(&pairs, dataset.schema.class_labels())?;
    let mut report = EvaluationReport::from_matrix(algorithm, matrix, k, seed)?;

    let start = Instant::now();
    algorithm.build(dataset, params)?;
    report.build_time_seconds = Some((start.elapsed().as_secs_f64() * 1000.0).round() / 1000.0);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryFormat {
    /// Aligned table with percents to four decimals.
    Text,
    /// `algorithm,correct_pct,incorrect_pct,unclassified_pct,build_time_s,k,seed`
    /// with full-precision numbers.
    Csv,
}

pub const CSV_HEADER: &str = "algorithm,correct_pct,incorrect_pct,unclassified_pct,build_time_s,k,seed";

/// Summary table over one or more reports. A missing build time prints as
/// `NA`.
pub fn report_summary(reports: &[EvaluationReport], format: SummaryFormat) -> Result<String, EvalError> {
    if reports.is_empty() || reports.iter().any(|r| r.matrix.total() == 0) {
        return Err(EvalError::Empty);
    }
    let mut out = String::new();
    match format {
        SummaryFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in reports {
                let time = r.build_time_seconds.map_or("NA".to_string(), |t| format!("{t}"));
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.algorithm.id(),
                    r.correct_pct,
                    r.incorrect_pct,
                    r.unclassified_pct,
                    time,
                    r.k,
                    r.seed
                );
            }
        }
        SummaryFormat::Text => {
            let _ = writeln!(
                out,
                "{:<10}{:>12}{:>14}{:>17}{:>16}",
                "Algorithm", "Correct %", "Incorrect %", "Unclassified %", "Build time (s)"
            );
            for r in reports {
                let time = r.build_time_seconds.map_or("NA".to_string(), |t| format!("{t:.3}"));
                let _ = writeln!(
                    out,
                    "{:<10}{:>12.4}{:>14.4}{:>17.4}{:>16}",
                    r.algorithm.to_string(),
                    r.correct_pct,
                    r.incorrect_pct,
                    r.unclassified_pct,
                    time
                );
            }
        }
    }
    Ok(out)
}

/// Confusion matrix with an unclassified column and each class's precision.
pub fn render_confusion(report: &EvaluationReport) -> String {
    let m = &report.matrix;
    let width = m.labels.iter().map(|l| l.len()).max().unwrap_or(0).max(8) + 2;
    let mut out = format!("{} (k = {}, seed = {})\n", report.algorithm, report.k, report.seed);
    let _ = write!(out, "{:<width$}", "actual");
    for label in &m.labels {
        let _ = write!(out, "{label:>width$}");
    }
    let _ = writeln!(out, "{:>14}{:>13}", "Unclassified", "Precision %");
    for (a, label) in m.labels.iter().enumerate() {
        let _ = write!(out, "{label:<width$}");
        for cell in &m.cells[a] {
            let _ = write!(out, "{cell:>width$}");
        }
        let precision = report.per_class_precision[a].map_or("-".to_string(), |p| format!("{p:.1}"));
        let _ = writeln!(out, "{:>14}{:>13}", m.unclassified_per_actual[a], precision);
    }
    out
}
