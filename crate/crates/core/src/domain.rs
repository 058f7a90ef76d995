//! Schemas, records, partial assignments, and the one-hot encoding between
//! symbolic records and binary row vectors.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A discrete column: a name and its ordered value set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<String>,
}

/// An ordered list of discrete columns. Fixes the one-hot layout: column `j`
/// owns bit indices `[offset(j), offset(j) + cardinality(j))`.
#[derive(Debug, Clone)]
pub struct Schema {
    columns: Vec<Column>,
    offsets: Vec<usize>,
    width: usize,
    column_lookup: HashMap<String, usize>,
    value_lookup: Vec<HashMap<String, usize>>,
}

impl PartialEq for Schema {
    fn eq(&self, other: &Self) -> bool {
        self.columns == other.columns
    }
}
impl Eq for Schema {}

impl Schema {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Schema("schema has no columns".into()));
        }
        let mut column_lookup = HashMap::new();
        let mut value_lookup = Vec::new();
        let mut offsets = Vec::new();
        let mut width = 0;
        for (j, col) in columns.iter().enumerate() {
            if column_lookup.insert(col.name.clone(), j).is_some() {
                return Err(Error::Schema(format!("duplicate column name {}", col.name)));
            }
            if col.values.len() < 2 {
                return Err(Error::Schema(format!(
                    "column {} has {} values, need at least 2",
                    col.name,
                    col.values.len()
                )));
            }
            let mut vals = HashMap::new();
            for (v, value) in col.values.iter().enumerate() {
                if vals.insert(value.clone(), v).is_some() {
                    return Err(Error::Schema(format!(
                        "duplicate value {} in column {}",
                        value, col.name
                    )));
                }
            }
            value_lookup.push(vals);
            offsets.push(width);
            width += col.values.len();
        }
        Ok(Schema {
            columns,
            offsets,
            width,
            column_lookup,
            value_lookup,
        })
    }

    /// Number of columns `k`.
    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// One-hot width `d`.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Column {
        &self.columns[j]
    }

    pub fn cardinality(&self, j: usize) -> usize {
        self.columns[j].values.len()
    }

    pub fn offset(&self, j: usize) -> usize {
        self.offsets[j]
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.column_lookup
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn value_index(&self, column: usize, value: &str) -> Result<usize> {
        self.value_lookup[column]
            .get(value)
            .copied()
            .ok_or_else(|| Error::UnknownValue {
                column: self.columns[column].name.clone(),
                value: value.to_string(),
            })
    }

    /// Which column owns one-hot index `i`, plus the value index within it.
    pub fn locate(&self, bit: usize) -> (usize, usize) {
        debug_assert!(bit < self.width);
        let j = match self.offsets.binary_search(&bit) {
            Ok(j) => j,
            Err(j) => j - 1,
        };
        (j, bit - self.offsets[j])
    }

    /// Total number of distinct full records in the domain, saturating.
    pub fn domain_size(&self) -> u128 {
        self.columns
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul(c.values.len() as u128))
    }
}

/// A full symbolic record: one value per schema column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub values: BTreeMap<String, String>,
}

impl Record {
    pub fn new<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        Record {
            values: pairs
                .into_iter()
                .map(|(c, v)| (c.into(), v.into()))
                .collect(),
        }
    }
}

/// A one-hot encoded row: exactly one bit set within each column block.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OneHotRow {
    bits: Vec<u8>,
}

impl OneHotRow {
    /// Wraps raw bits, checking the one-per-block invariant.
    pub fn from_bits(bits: Vec<u8>, schema: &Schema) -> Result<Self> {
        if bits.len() != schema.width() {
            return Err(Error::MalformedRow(format!(
                "row has {} bits, schema width is {}",
                bits.len(),
                schema.width()
            )));
        }
        for j in 0..schema.num_columns() {
            let off = schema.offset(j);
            let card = schema.cardinality(j);
            let set = bits[off..off + card].iter().filter(|&&b| b != 0).count();
            if set != 1 {
                return Err(Error::MalformedRow(format!(
                    "{} bits set in block for column {}",
                    set,
                    schema.column(j).name
                )));
            }
        }
        Ok(OneHotRow { bits })
    }

    /// Builds a row from per-column value indices.
    pub fn from_value_indices(indices: &[usize], schema: &Schema) -> Self {
        debug_assert_eq!(indices.len(), schema.num_columns());
        let mut bits = vec![0u8; schema.width()];
        for (j, &v) in indices.iter().enumerate() {
            debug_assert!(v < schema.cardinality(j));
            bits[schema.offset(j) + v] = 1;
        }
        OneHotRow { bits }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// The value index this row takes in column `j`.
    pub fn value_index(&self, j: usize, schema: &Schema) -> usize {
        let off = schema.offset(j);
        let card = schema.cardinality(j);
        self.bits[off..off + card]
            .iter()
            .position(|&b| b != 0)
            .expect("one-hot invariant")
    }
}

/// Encodes a symbolic record into its one-hot row.
pub fn encode_record(record: &Record, schema: &Schema) -> Result<OneHotRow> {
    for name in record.values.keys() {
        schema.column_index(name)?;
    }
    let mut indices = Vec::with_capacity(schema.num_columns());
    for (j, col) in schema.columns().iter().enumerate() {
        let value = record
            .values
            .get(&col.name)
            .ok_or_else(|| Error::Schema(format!("record is missing column {}", col.name)))?;
        indices.push(schema.value_index(j, value)?);
    }
    Ok(OneHotRow::from_value_indices(&indices, schema))
}

/// Decodes a one-hot row back into its symbolic record.
pub fn decode_record(row: &OneHotRow, schema: &Schema) -> Result<Record> {
    OneHotRow::from_bits(row.bits().to_vec(), schema)?;
    let values = schema
        .columns()
        .iter()
        .enumerate()
        .map(|(j, col)| {
            let v = row.value_index(j, schema);
            (col.name.clone(), col.values[v].clone())
        })
        .collect();
    Ok(Record { values })
}

/// A multiset of N one-hot rows over a shared schema.
#[derive(Debug, Clone)]
pub struct Dataset {
    schema: Arc<Schema>,
    rows: Vec<OneHotRow>,
}

impl Dataset {
    pub fn new(schema: Arc<Schema>, rows: Vec<OneHotRow>) -> Self {
        Dataset { schema, rows }
    }

    pub fn from_records(schema: Arc<Schema>, records: &[Record]) -> Result<Self> {
        let rows = records
            .iter()
            .map(|r| encode_record(r, &schema))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset { schema, rows })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn rows(&self) -> &[OneHotRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows sorted lexicographically on the bit vector. Two datasets hold the
    /// same multiset iff their canonical forms are equal.
    pub fn canonical_rows(&self) -> Vec<OneHotRow> {
        let mut rows = self.rows.clone();
        rows.sort();
        rows
    }

    pub fn canonicalize(&self) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            rows: self.canonical_rows(),
        }
    }
}

impl PartialEq for Dataset {
    /// Multiset equality: row order is irrelevant.
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema && self.canonical_rows() == other.canonical_rows()
    }
}
impl Eq for Dataset {}

/// Values fixed on a subset of columns; unassigned columns match anything.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    /// One slot per schema column: `Some(value index)` or unassigned.
    assigned: Vec<Option<usize>>,
}

impl PartialAssignment {
    pub fn empty(schema: &Schema) -> Self {
        PartialAssignment {
            assigned: vec![None; schema.num_columns()],
        }
    }

    pub fn from_slots(assigned: Vec<Option<usize>>, schema: &Schema) -> Result<Self> {
        if assigned.len() != schema.num_columns() {
            return Err(Error::Dimension(format!(
                "assignment has {} slots, schema has {} columns",
                assigned.len(),
                schema.num_columns()
            )));
        }
        for (j, slot) in assigned.iter().enumerate() {
            if let Some(v) = slot {
                if *v >= schema.cardinality(j) {
                    return Err(Error::Schema(format!(
                        "value index {} out of range for column {}",
                        v,
                        schema.column(j).name
                    )));
                }
            }
        }
        Ok(PartialAssignment { assigned })
    }

    /// Builds from symbolic (column, value) pairs.
    pub fn from_pairs<'a, I>(pairs: I, schema: &Schema) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut assigned = vec![None; schema.num_columns()];
        for (col, val) in pairs {
            let j = schema.column_index(col)?;
            let v = schema.value_index(j, val)?;
            if assigned[j].is_some() {
                return Err(Error::Schema(format!("column {} assigned twice", col)));
            }
            assigned[j] = Some(v);
        }
        Ok(PartialAssignment { assigned })
    }

    pub fn slots(&self) -> &[Option<usize>] {
        &self.assigned
    }

    /// Number of assigned columns `|A|`.
    pub fn num_assigned(&self) -> usize {
        self.assigned.iter().filter(|s| s.is_some()).count()
    }

    pub fn matches(&self, row: &OneHotRow, schema: &Schema) -> bool {
        self.assigned
            .iter()
            .enumerate()
            .all(|(j, slot)| match slot {
                Some(v) => row.value_index(j, schema) == *v,
                None => true,
            })
    }

    /// One-hot index set `A^{oh}`: for each assigned column, the index of its
    /// assigned value bit.
    pub fn onehot_indices(&self, schema: &Schema) -> Vec<usize> {
        self.assigned
            .iter()
            .enumerate()
            .filter_map(|(j, slot)| slot.map(|v| schema.offset(j) + v))
            .collect()
    }

    /// Symbolic view, for reports.
    pub fn to_pairs(&self, schema: &Schema) -> Vec<(String, Option<String>)> {
        self.assigned
            .iter()
            .enumerate()
            .map(|(j, slot)| {
                let col = schema.column(j);
                (col.name.clone(), slot.map(|v| col.values[v].clone()))
            })
            .collect()
    }
}

/// Number of dataset rows matching a partial assignment.
pub fn count_matches(a: &PartialAssignment, dataset: &Dataset) -> Result<usize> {
    let schema = dataset.schema();
    if a.slots().len() != schema.num_columns() {
        return Err(Error::Dimension(
            "assignment and dataset use different schemas".into(),
        ));
    }
    Ok(dataset
        .rows()
        .iter()
        .filter(|r| a.matches(r, schema))
        .count())
}
