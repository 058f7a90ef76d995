//! Shared toy instances used across unit, integration, and acceptance tests.
//!
//! The toy release: schema `{A: {a0, a1}, B: {b0, b1, b2}}`, private dataset
//! `{(a0,b0), (a0,b1), (a1,b1)}`, and the five 1-way marginals, whose counts
//! are `(2, 1, 1, 2, 0)`. Exactly two datasets match those counts; adding the
//! 2-way query `A=a1 ∧ B=b1` (count 1) makes the instance unique.

use std::sync::Arc;

use crate::domain::{Column, Dataset, OneHotRow, Schema};
use crate::query::{PredicateDef, QueryDef};

pub fn toy_schema() -> Schema {
    Schema::new(vec![
        Column {
            name: "A".into(),
            values: vec!["a0".into(), "a1".into()],
        },
        Column {
            name: "B".into(),
            values: vec!["b0".into(), "b1".into(), "b2".into()],
        },
    ])
    .unwrap()
}

pub fn dataset_from_indices(schema: &Arc<Schema>, rows: &[(usize, usize)]) -> Dataset {
    let rows = rows
        .iter()
        .map(|&(a, b)| OneHotRow::from_value_indices(&[a, b], schema))
        .collect();
    Dataset::new(schema.clone(), rows)
}

/// The private toy dataset `{(a0,b0), (a0,b1), (a1,b1)}`.
pub fn toy_dataset(schema: &Arc<Schema>) -> Dataset {
    dataset_from_indices(schema, &[(0, 0), (0, 1), (1, 1)])
}

/// The other dataset consistent with the toy 1-way counts:
/// `{(a0,b1), (a0,b1), (a1,b0)}`.
pub fn toy_alternative_dataset(schema: &Arc<Schema>) -> Dataset {
    dataset_from_indices(schema, &[(0, 1), (0, 1), (1, 0)])
}

fn pred(column: &str, values: &[&str]) -> PredicateDef {
    PredicateDef {
        column: column.into(),
        values: values.iter().map(|s| s.to_string()).collect(),
    }
}

/// Five 1-way marginals over the toy schema; counts on the toy dataset are
/// `(2, 1, 1, 2, 0)`.
pub fn toy_query_defs() -> Vec<QueryDef> {
    vec![
        QueryDef::new("A=a0", vec![pred("A", &["a0"])]),
        QueryDef::new("A=a1", vec![pred("A", &["a1"])]),
        QueryDef::new("B=b0", vec![pred("B", &["b0"])]),
        QueryDef::new("B=b1", vec![pred("B", &["b1"])]),
        QueryDef::new("B=b2", vec![pred("B", &["b2"])]),
    ]
}

/// The toy marginals plus the disambiguating 2-way query `A=a1 ∧ B=b1`.
pub fn toy_query_defs_with_two_way() -> Vec<QueryDef> {
    let mut defs = toy_query_defs();
    defs.push(QueryDef::new(
        "A=a1,B=b1",
        vec![pred("A", &["a1"]), pred("B", &["b1"])],
    ));
    defs
}
