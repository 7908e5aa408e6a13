use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Schema;
use crate::metrics::ClassCounts;

use super::{Algorithm, LearnerParams, TreeNode};

pub const MODEL_FORMAT: &str = "edutree-model/1";

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported model format '{0}'")]
    Format(String),
    #[error("invalid tree at {path}: {message}")]
    Tree { path: String, message: String },
}

/// Structured form of a node. Attributes, values and labels are stored by
/// name so the document reads without the schema at hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum NodeDoc {
    Multiway {
        attribute: String,
        counts: Vec<usize>,
        children: Vec<NodeDoc>,
    },
    Subset {
        attribute: String,
        subset: Vec<String>,
        counts: Vec<usize>,
        children: [Box<NodeDoc>; 2],
    },
    Threshold {
        attribute: String,
        threshold: f64,
        counts: Vec<usize>,
        children: [Box<NodeDoc>; 2],
    },
    Leaf {
        label: String,
        counts: Vec<usize>,
    },
    Empty,
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format: String,
    algorithm: Algorithm,
    params: LearnerParams,
    schema: Schema,
    tree: NodeDoc,
}

/// A trained tree together with everything needed to apply it.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub algorithm: Algorithm,
    pub params: LearnerParams,
    pub schema: Schema,
    pub tree: TreeNode,
}

impl Model {
    pub fn to_json(&self) -> String {
        let doc = ModelDoc {
            format: MODEL_FORMAT.to_string(),
            algorithm: self.algorithm,
            params: self.params.clone(),
            schema: self.schema.clone(),
            tree: to_doc(&self.tree, &self.schema),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("model documents always serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Model, ModelError> {
        let doc: ModelDoc = serde_json::from_str(text)?;
        if doc.format != MODEL_FORMAT {
            return Err(ModelError::Format(doc.format));
        }
        let tree = from_doc(&doc.tree, &doc.schema, "root")?;
        Ok(Model {
            algorithm: doc.algorithm,
            params: doc.params,
            schema: doc.schema,
            tree,
        })
    }
}

/// Structured document of a bare tree, as a JSON value.
pub fn tree_document(tree: &TreeNode, schema: &Schema) -> serde_json::Value {
    serde_json::to_value(to_doc(tree, schema)).expect("tree documents always serialize")
}

fn to_doc(node: &TreeNode, schema: &Schema) -> NodeDoc {
    let name = |a: usize| schema.attribute(a).name.clone();
    let counts = |c: &ClassCounts| c.counts().to_vec();
    match node {
        TreeNode::Multiway {
            attribute,
            counts: c,
            children,
        } => NodeDoc::Multiway {
            attribute: name(*attribute),
            counts: counts(c),
            children: children.iter().map(|ch| to_doc(ch, schema)).collect(),
        },
        TreeNode::Subset {
            attribute,
            left_values,
            counts: c,
            left,
            right,
        } => {
            let spec = schema.attribute(*attribute);
            NodeDoc::Subset {
                attribute: spec.name.clone(),
                subset: left_values
                    .iter()
                    .map(|&v| spec.value_name(v).unwrap_or("?").to_string())
                    .collect(),
                counts: counts(c),
                children: [Box::new(to_doc(left, schema)), Box::new(to_doc(right, schema))],
            }
        }
        TreeNode::Threshold {
            attribute,
            threshold,
            counts: c,
            le,
            gt,
        } => NodeDoc::Threshold {
            attribute: name(*attribute),
            threshold: *threshold,
            counts: counts(c),
            children: [Box::new(to_doc(le, schema)), Box::new(to_doc(gt, schema))],
        },
        TreeNode::Leaf { label, counts: c } => NodeDoc::Leaf {
            label: schema.class_labels()[*label].clone(),
            counts: counts(c),
        },
        TreeNode::Empty => NodeDoc::Empty,
    }
}

fn from_doc(doc: &NodeDoc, schema: &Schema, path: &str) -> Result<TreeNode, ModelError> {
    let fail = |message: String| ModelError::Tree {
        path: path.to_string(),
        message,
    };
    let predictor = |name: &str| -> Result<usize, ModelError> {
        match schema.index_of(name) {
            Some(i) if i != schema.class_index() => Ok(i),
            Some(_) => Err(fail(format!("splits on the class attribute '{name}'"))),
            None => Err(fail(format!("unknown attribute '{name}'"))),
        }
    };
    let tally = |c: &[usize]| -> Result<ClassCounts, ModelError> {
        if c.len() == schema.num_classes() {
            Ok(ClassCounts::new(c.to_vec()))
        } else {
            Err(fail(format!("counts have {} entries for {} classes", c.len(), schema.num_classes())))
        }
    };
    let child = |d: &NodeDoc, i: usize| from_doc(d, schema, &format!("{path}/{i}"));
    Ok(match doc {
        NodeDoc::Multiway {
            attribute,
            counts,
            children,
        } => {
            let a = predictor(attribute)?;
            let k = schema
                .attribute(a)
                .values()
                .ok_or_else(|| fail(format!("multiway split on numeric attribute '{attribute}'")))?
                .len();
            if children.len() != k {
                return Err(fail(format!("{} children for {k} declared values", children.len())));
            }
            TreeNode::Multiway {
                attribute: a,
                counts: tally(counts)?,
                children: children
                    .iter()
                    .enumerate()
                    .map(|(i, d)| child(d, i))
                    .collect::<Result<_, _>>()?,
            }
        }
        NodeDoc::Subset {
            attribute,
            subset,
            counts,
            children,
        } => {
            let a = predictor(attribute)?;
            let spec = schema.attribute(a);
            if !spec.is_nominal() {
                return Err(fail(format!("subset split on numeric attribute '{attribute}'")));
            }
            let mut left_values = subset
                .iter()
                .map(|v| spec.value_index(v).ok_or_else(|| fail(format!("undeclared value '{v}'"))))
                .collect::<Result<Vec<_>, _>>()?;
            left_values.sort_unstable();
            left_values.dedup();
            TreeNode::Subset {
                attribute: a,
                left_values,
                counts: tally(counts)?,
                left: Box::new(child(&children[0], 0)?),
                right: Box::new(child(&children[1], 1)?),
            }
        }
        NodeDoc::Threshold {
            attribute,
            threshold,
            counts,
            children,
        } => {
            let a = predictor(attribute)?;
            if schema.attribute(a).is_nominal() {
                return Err(fail(format!("threshold split on nominal attribute '{attribute}'")));
            }
            if !threshold.is_finite() {
                return Err(fail("threshold is not finite".into()));
            }
            TreeNode::Threshold {
                attribute: a,
                threshold: *threshold,
                counts: tally(counts)?,
                le: Box::new(child(&children[0], 0)?),
                gt: Box::new(child(&children[1], 1)?),
            }
        }
        NodeDoc::Leaf { label, counts } => TreeNode::Leaf {
            label: schema
                .class_labels()
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| fail(format!("unknown class label '{label}'")))?,
            counts: tally(counts)?,
        },
        NodeDoc::Empty => TreeNode::Empty,
    })
}
