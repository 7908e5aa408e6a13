//! Schemas, instances and datasets, the grade discretizers, and the bundled
//! student-performance dataset.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DataError;

/// Kind of an attribute: a nominal domain with a declared value order, or a
/// real-valued measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttributeKind {
    Nominal { values: Vec<String> },
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: AttributeKind,
}

impl AttributeSpec {
    pub fn nominal<S: Into<String>, V: AsRef<str>>(name: S, values: &[V]) -> Self {
        AttributeSpec {
            name: name.into(),
            kind: AttributeKind::Nominal {
                values: values.iter().map(|v| v.as_ref().to_string()).collect(),
            },
        }
    }

    pub fn numeric<S: Into<String>>(name: S) -> Self {
        AttributeSpec {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }

    /// Declared values of a nominal attribute; `None` for numeric ones.
    pub fn values(&self) -> Option<&[String]> {
        match &self.kind {
            AttributeKind::Nominal { values } => Some(values),
            AttributeKind::Numeric => None,
        }
    }

    pub fn is_nominal(&self) -> bool {
        matches!(self.kind, AttributeKind::Nominal { .. })
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.values()?.iter().position(|v| v == value)
    }

    pub fn value_name(&self, index: usize) -> Option<&str> {
        self.values()?.get(index).map(String::as_str)
    }
}

/// Ordered attribute declarations plus the position of the class attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchemaDoc", into = "SchemaDoc")]
pub struct Schema {
    attributes: Vec<AttributeSpec>,
    class_index: usize,
}

impl Schema {
    pub fn new(attributes: Vec<AttributeSpec>, class_index: usize) -> Result<Self, DataError> {
        let mut names = HashSet::new();
        for attr in &attributes {
            if !names.insert(attr.name.as_str()) {
                return Err(DataError::DuplicateAttribute(attr.name.clone()));
            }
            if let AttributeKind::Nominal { values } = &attr.kind {
                if values.is_empty() {
                    return Err(DataError::EmptyDomain(attr.name.clone()));
                }
                let mut seen = HashSet::new();
                for v in values {
                    if !seen.insert(v.as_str()) {
                        return Err(DataError::DuplicateValue {
                            attribute: attr.name.clone(),
                            value: v.clone(),
                        });
                    }
                }
            }
        }
        match attributes.get(class_index) {
            None => return Err(DataError::ClassIndexOutOfRange(class_index)),
            Some(a) if !a.is_nominal() => return Err(DataError::NumericClass(a.name.clone())),
            Some(_) => {}
        }
        if attributes.len() < 2 {
            return Err(DataError::NoPredictors);
        }
        Ok(Schema {
            attributes,
            class_index,
        })
    }

    /// Builds a schema whose class is the attribute called `class_name`.
    pub fn with_class_name(attributes: Vec<AttributeSpec>, class_name: &str) -> Result<Self, DataError> {
        let idx = attributes
            .iter()
            .position(|a| a.name == class_name)
            .ok_or_else(|| DataError::UnknownAttribute(class_name.to_string()))?;
        Schema::new(attributes, idx)
    }

    pub fn attributes(&self) -> &[AttributeSpec] {
        &self.attributes
    }

    pub fn attribute(&self, index: usize) -> &AttributeSpec {
        &self.attributes[index]
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn class_attribute(&self) -> &AttributeSpec {
        &self.attributes[self.class_index]
    }

    /// Class labels in declared order.
    pub fn class_labels(&self) -> &[String] {
        self.class_attribute()
            .values()
            .expect("class attribute is nominal")
    }

    pub fn num_classes(&self) -> usize {
        self.class_labels().len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// Indices of the non-class attributes, in schema order.
    pub fn predictors(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.attributes.len()).filter(move |&i| i != self.class_index)
    }
}

#[derive(Serialize, Deserialize)]
struct SchemaDoc {
    attributes: Vec<AttributeSpec>,
    class: String,
}

impl TryFrom<SchemaDoc> for Schema {
    type Error = DataError;

    fn try_from(doc: SchemaDoc) -> Result<Self, Self::Error> {
        Schema::with_class_name(doc.attributes, &doc.class)
    }
}

impl From<Schema> for SchemaDoc {
    fn from(schema: Schema) -> Self {
        SchemaDoc {
            class: schema.class_attribute().name.clone(),
            attributes: schema.attributes,
        }
    }
}

/// One cell of an instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Nominal(usize),
    Numeric(f64),
    Missing,
}

impl Value {
    pub fn as_nominal(self) -> Option<usize> {
        match self {
            Value::Nominal(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_numeric(self) -> Option<f64> {
        match self {
            Value::Numeric(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_missing(self) -> bool {
        matches!(self, Value::Missing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub values: Vec<Value>,
}

impl Instance {
    pub fn new(values: Vec<Value>) -> Self {
        Instance { values }
    }

    pub fn get(&self, attribute: usize) -> Value {
        self.values.get(attribute).copied().unwrap_or(Value::Missing)
    }
}

/// A schema with instances aligned to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: Schema,
    pub instances: Vec<Instance>,
}

impl Dataset {
    /// Builds a dataset, rejecting instances that do not conform to the schema.
    pub fn new(schema: Schema, instances: Vec<Instance>) -> Result<Self, DataError> {
        let ds = Dataset { schema, instances };
        let violations = validate_dataset(&ds);
        if violations.is_empty() {
            Ok(ds)
        } else {
            Err(DataError::Invalid(violations))
        }
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Class index of an instance, `None` when the class cell is missing.
    pub fn class_of(&self, row: usize) -> Option<usize> {
        self.instances[row].get(self.schema.class_index()).as_nominal()
    }

    /// A new dataset holding the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            instances: rows.iter().map(|&r| self.instances[r].clone()).collect(),
        }
    }

    /// Per-class tally over all instances with a known class.
    pub fn class_tally(&self) -> Vec<usize> {
        let mut tally = vec![0; self.schema.num_classes()];
        for row in 0..self.len() {
            if let Some(c) = self.class_of(row) {
                tally[c] += 1;
            }
        }
        tally
    }

    /// Per-value tally of a nominal attribute; `None` for numeric attributes.
    pub fn value_tally(&self, attribute: usize) -> Option<Vec<usize>> {
        let k = self.schema.attribute(attribute).values()?.len();
        let mut tally = vec![0; k];
        for inst in &self.instances {
            if let Value::Nominal(v) = inst.get(attribute) {
                tally[v] += 1;
            }
        }
        Some(tally)
    }
}

/// Why an instance fails to conform to its schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    Arity { expected: usize, found: usize },
    UndeclaredValue { index: usize },
    KindMismatch,
    NonFinite,
}

/// A schema violation, positioned at a 0-based row and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub row: usize,
    pub column: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "row {}", self.row)?;
        if let Some(c) = self.column {
            write!(f, ", column {c}")?;
        }
        match &self.kind {
            ViolationKind::Arity { expected, found } => {
                write!(f, ": expected {expected} values, found {found}")
            }
            ViolationKind::UndeclaredValue { index } => {
                write!(f, ": undeclared nominal value index {index}")
            }
            ViolationKind::KindMismatch => write!(f, ": value kind does not match attribute kind"),
            ViolationKind::NonFinite => write!(f, ": numeric value is not finite"),
        }
    }
}

/// Lists every way the dataset's instances violate its schema. Empty when
/// the dataset is valid. Missing cells are legal here; learners reject them.
pub fn validate_dataset(dataset: &Dataset) -> Vec<Violation> {
    let schema = &dataset.schema;
    let mut out = Vec::new();
    for (row, inst) in dataset.instances.iter().enumerate() {
        if inst.values.len() != schema.len() {
            out.push(Violation {
                row,
                column: None,
                kind: ViolationKind::Arity {
                    expected: schema.len(),
                    found: inst.values.len(),
                },
            });
            continue;
        }
        for (col, (value, attr)) in inst.values.iter().zip(schema.attributes()).enumerate() {
            let kind = match (value, &attr.kind) {
                (Value::Missing, _) => None,
                (Value::Nominal(i), AttributeKind::Nominal { values }) if *i >= values.len() => {
                    Some(ViolationKind::UndeclaredValue { index: *i })
                }
                (Value::Nominal(_), AttributeKind::Nominal { .. }) => None,
                (Value::Numeric(x), AttributeKind::Numeric) if !x.is_finite() => {
                    Some(ViolationKind::NonFinite)
                }
                (Value::Numeric(_), AttributeKind::Numeric) => None,
                _ => Some(ViolationKind::KindMismatch),
            };
            if let Some(kind) = kind {
                out.push(Violation {
                    row,
                    column: Some(col),
                    kind,
                });
            }
        }
    }
    out
}

/// Percent cut-points for one graded variable. Categories are listed from the
/// lowest band upward; `lower_bounds[i]` is the inclusive lower edge of
/// `categories[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeBins {
    categories: Vec<&'static str>,
    lower_bounds: Vec<f64>,
}

impl GradeBins {
    pub fn new(categories: Vec<&'static str>, lower_bounds: Vec<f64>) -> Result<Self, DataError> {
        let well_formed = categories.len() == lower_bounds.len() + 1
            && lower_bounds.windows(2).all(|w| w[0] < w[1])
            && lower_bounds.iter().all(|&b| b > 0.0 && b < 100.0);
        if !well_formed {
            return Err(DataError::MalformedBins);
        }
        Ok(GradeBins {
            categories,
            lower_bounds,
        })
    }

    /// Marks bands shared by PSM and ESM: Fail < 36 ≤ Third < 45 ≤ Second < 60 ≤ First.
    pub fn marks() -> Self {
        GradeBins::new(vec!["Fail", "Third", "Second", "First"], vec![36.0, 45.0, 60.0]).unwrap()
    }

    /// Class-test grade: Poor < 40 ≤ Average < 60 ≤ Good.
    pub fn class_test() -> Self {
        GradeBins::new(vec!["Poor", "Average", "Good"], vec![40.0, 60.0]).unwrap()
    }

    /// Attendance: Poor < 60 ≤ Average < 80 ≤ Good.
    pub fn attendance() -> Self {
        GradeBins::new(vec!["Poor", "Average", "Good"], vec![60.0, 80.0]).unwrap()
    }

    /// Categories from the lowest band to the highest.
    pub fn categories(&self) -> &[&'static str] {
        &self.categories
    }

    /// Rank of the band containing `percent` (0 = lowest band).
    pub fn band(&self, percent: f64) -> Result<usize, DataError> {
        if !(0.0..=100.0).contains(&percent) {
            return Err(DataError::PercentOutOfRange(percent));
        }
        Ok(self.lower_bounds.iter().filter(|&&b| percent >= b).count())
    }
}

/// Maps a percentage to its grade category. Band edges belong to the upper band.
pub fn discretize_marks(percent: f64, bins: &GradeBins) -> Result<&'static str, DataError> {
    bins.band(percent).map(|b| bins.categories[b])
}

const STUDENTS_ARFF: &str = include_str!("../data/students.arff");

/// The bundled ARFF text of the 48-student dataset.
pub fn embedded_students_arff() -> &'static str {
    STUDENTS_ARFF
}

/// The 48-student dataset: PSM, CTG, SEM, ASS, ATT, LW predictors and ESM as class.
pub fn load_embedded_students() -> Dataset {
    crate::arff::parse_arff(STUDENTS_ARFF).expect("bundled dataset parses")
}
