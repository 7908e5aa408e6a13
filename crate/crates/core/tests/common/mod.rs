#![allow(dead_code)]

use edutree::data::{AttributeSpec, Dataset, Instance, Schema, Value};
use proptest::prelude::*;

const NAME_STEMS: &[&str] = &["a", "grade", "b c", "it's", "x%y", "{v}", "q,r", "Ünï"];

#[derive(Debug, Clone)]
pub enum Column {
    Nominal(usize),
    Numeric,
}

fn column() -> impl Strategy<Value = Column> {
    prop_oneof![3 => (2usize..=4).prop_map(Column::Nominal), 1 => Just(Column::Numeric)]
}

fn nominal_columns() -> impl Strategy<Value = Vec<Column>> {
    prop::collection::vec((2usize..=4).prop_map(Column::Nominal), 1..=3)
}

fn schema_for(columns: &[Column], classes: usize, stems: &[usize]) -> Schema {
    let mut attrs: Vec<AttributeSpec> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let name = format!("{}{i}", NAME_STEMS[stems[i % stems.len()] % NAME_STEMS.len()]);
            match c {
                Column::Nominal(k) => {
                    let values: Vec<String> = (0..*k)
                        .map(|v| format!("{}{v}", NAME_STEMS[(stems[i % stems.len()] + v + 1) % NAME_STEMS.len()]))
                        .collect();
                    AttributeSpec::nominal(name, &values)
                }
                Column::Numeric => AttributeSpec::numeric(name),
            }
        })
        .collect();
    let labels: Vec<String> = (0..classes).map(|c| format!("class {c}")).collect();
    attrs.push(AttributeSpec::nominal("class", &labels));
    let n = attrs.len();
    Schema::new(attrs, n - 1).unwrap()
}

fn cell(c: &Column, missing: bool) -> BoxedStrategy<Value> {
    let present = match c {
        Column::Nominal(k) => (0..*k).prop_map(Value::Nominal).boxed(),
        Column::Numeric => prop_oneof![
            (-1000i32..1000).prop_map(|x| Value::Numeric(x as f64 / 4.0)),
            (-1e6f64..1e6).prop_map(Value::Numeric),
        ]
        .boxed(),
    };
    if missing {
        prop_oneof![7 => present, 1 => Just(Value::Missing)].boxed()
    } else {
        present
    }
}

fn dataset_from(columns: Vec<Column>, classes: usize, rows: usize, missing: bool) -> impl Strategy<Value = Dataset> {
    let stems = prop::collection::vec(0usize..NAME_STEMS.len(), columns.len());
    let mut row_cells: Vec<BoxedStrategy<Value>> = columns.iter().map(|c| cell(c, missing)).collect();
    row_cells.push(cell(&Column::Nominal(classes), missing));
    (stems, prop::collection::vec(row_cells, rows)).prop_map(move |(stems, rows)| {
        let schema = schema_for(&columns, classes, &stems);
        let instances = rows.into_iter().map(Instance::new).collect();
        Dataset::new(schema, instances).unwrap()
    })
}

/// Mixed nominal/numeric datasets, possibly with missing cells and zero rows.
pub fn any_dataset() -> impl Strategy<Value = Dataset> {
    (prop::collection::vec(column(), 1..=4), 2usize..=3, 0usize..=25)
        .prop_flat_map(|(cols, classes, rows)| dataset_from(cols, classes, rows, true))
}

/// Complete nominal datasets with at least one row.
pub fn nominal_dataset() -> impl Strategy<Value = Dataset> {
    (nominal_columns(), 2usize..=3, 1usize..=30)
        .prop_flat_map(|(cols, classes, rows)| dataset_from(cols, classes, rows, false))
}

/// Complete datasets with numeric and nominal predictors.
pub fn complete_dataset() -> impl Strategy<Value = Dataset> {
    (prop::collection::vec(column(), 1..=3), 2usize..=3, 1usize..=30)
        .prop_flat_map(|(cols, classes, rows)| dataset_from(cols, classes, rows, false))
}

/// The dataset with its rows in another order.
pub fn permuted(ds: &Dataset, order: &[usize]) -> Dataset {
    Dataset::new(ds.schema.clone(), order.iter().map(|&r| ds.instances[r].clone()).collect()).unwrap()
}

/// A dataset with a row permutation.
pub fn with_permutation(data: impl Strategy<Value = Dataset>) -> impl Strategy<Value = (Dataset, Vec<usize>)> {
    data.prop_flat_map(|ds| {
        let order = Just((0..ds.len()).collect::<Vec<_>>()).prop_shuffle();
        (Just(ds), order)
    })
}
