//! Marginal query compilation and tabulation.
//!
//! A query predicate is a conjunction of per-column sub-predicates, each
//! accepting a set of values. Compiled queries carry one-hot masks and are
//! padded to a common sub-predicate count `r_max` so the whole release can be
//! viewed as a single `(n, r_max, d)` binary tensor.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{Dataset, OneHotRow, Schema};
use crate::error::{Error, Result};

/// Symbolic definition of one sub-predicate: a column and accepted values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateDef {
    pub column: String,
    pub values: Vec<String>,
}

/// Symbolic definition of one marginal query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryDef {
    pub id: String,
    pub predicates: Vec<PredicateDef>,
}

impl QueryDef {
    pub fn new<S: Into<String>>(id: S, predicates: Vec<PredicateDef>) -> Self {
        QueryDef {
            id: id.into(),
            predicates: predicates,
        }
    }
}

/// One compiled sub-predicate: a one-hot mask nonzero only inside its column's
/// block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubPredicate {
    pub column: usize,
    pub accepted: Vec<usize>,
    pub mask: Vec<u8>,
}

impl SubPredicate {
    /// `x qᵀ` for a valid one-hot row; always 0 or 1.
    pub fn satisfied(&self, row: &OneHotRow) -> bool {
        self.mask
            .iter()
            .zip(row.bits())
            .map(|(&q, &x)| (q & x) as usize)
            .sum::<usize>()
            == 1
    }
}

/// A compiled marginal query: `r` real sub-predicates over distinct columns.
#[derive(Debug, Clone)]
pub struct CompiledQuery {
    pub id: String,
    pub sub_predicates: Vec<SubPredicate>,
}

impl CompiledQuery {
    /// Number of real sub-predicates `r`.
    pub fn arity(&self) -> usize {
        self.sub_predicates.len()
    }

    pub fn satisfied(&self, row: &OneHotRow) -> bool {
        self.sub_predicates.iter().all(|sp| sp.satisfied(row))
    }

    /// The padded `r_max × d` matrix: real masks first, then all-ones dummy
    /// rows.
    pub fn padded_matrix(&self, r_max: usize, d: usize) -> Vec<Vec<u8>> {
        let mut m: Vec<Vec<u8>> = self
            .sub_predicates
            .iter()
            .map(|sp| sp.mask.clone())
            .collect();
        while m.len() < r_max {
            m.push(vec![1u8; d]);
        }
        m
    }
}

/// A compiled query release: `n` queries sharing a schema and `r_max`, plus the
/// published counts once loaded.
#[derive(Debug, Clone)]
pub struct QuerySet {
    schema: Arc<Schema>,
    queries: Vec<CompiledQuery>,
    r_max: usize,
    counts: Option<Vec<usize>>,
}

impl QuerySet {
    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn queries(&self) -> &[CompiledQuery] {
        &self.queries
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn counts(&self) -> Option<&[usize]> {
        self.counts.as_deref()
    }

    /// Attaches published counts, validating `0 ≤ count ≤ N`.
    pub fn with_counts(mut self, counts: Vec<usize>, n_rows: usize) -> Result<Self> {
        if counts.len() != self.queries.len() {
            return Err(Error::Dimension(format!(
                "{} counts for {} queries",
                counts.len(),
                self.queries.len()
            )));
        }
        for (q, &c) in self.queries.iter().zip(&counts) {
            if c > n_rows {
                return Err(Error::TargetOutOfRange {
                    id: q.id.clone(),
                    count: c as i64,
                    n: n_rows,
                });
            }
        }
        self.counts = Some(counts);
        Ok(self)
    }

    /// The `(n, r_max, d)` binary query tensor.
    pub fn tensor(&self) -> Vec<Vec<Vec<u8>>> {
        let d = self.schema.width();
        self.queries
            .iter()
            .map(|q| q.padded_matrix(self.r_max, d))
            .collect()
    }

    /// Keeps only queries whose published counts are not in `drop_values`;
    /// counts are filtered in lockstep and `r_max` is recomputed.
    pub fn filter_by_count(&self, drop_values: &HashSet<usize>) -> Result<QuerySet> {
        let counts = self
            .counts
            .as_ref()
            .ok_or_else(|| Error::Query("published counts not loaded".into()))?;
        let mut queries = Vec::new();
        let mut kept_counts = Vec::new();
        for (q, &c) in self.queries.iter().zip(counts) {
            if !drop_values.contains(&c) {
                queries.push(q.clone());
                kept_counts.push(c);
            }
        }
        let r_max = queries.iter().map(|q| q.arity()).max().unwrap_or(0);
        Ok(QuerySet {
            schema: self.schema.clone(),
            queries,
            r_max,
            counts: Some(kept_counts),
        })
    }
}

/// Compiles symbolic query definitions against a schema.
pub fn compile_queries(defs: &[QueryDef], schema: &Arc<Schema>) -> Result<QuerySet> {
    let d = schema.width();
    let mut queries = Vec::with_capacity(defs.len());
    for def in defs {
        if def.predicates.is_empty() {
            return Err(Error::Query(format!(
                "query {} has no sub-predicates",
                def.id
            )));
        }
        let mut seen = HashSet::new();
        let mut sub_predicates = Vec::with_capacity(def.predicates.len());
        for pred in &def.predicates {
            let column = schema.column_index(&pred.column)?;
            if !seen.insert(column) {
                return Err(Error::Query(format!(
                    "query {} constrains column {} twice",
                    def.id, pred.column
                )));
            }
            if pred.values.is_empty() {
                return Err(Error::Query(format!(
                    "query {} has an empty value set for column {}",
                    def.id, pred.column
                )));
            }
            let mut accepted = Vec::with_capacity(pred.values.len());
            for v in &pred.values {
                let vi = schema.value_index(column, v)?;
                if !accepted.contains(&vi) {
                    accepted.push(vi);
                }
            }
            accepted.sort_unstable();
            let mut mask = vec![0u8; d];
            for &vi in &accepted {
                mask[schema.offset(column) + vi] = 1;
            }
            sub_predicates.push(SubPredicate {
                column,
                accepted,
                mask,
            });
        }
        queries.push(CompiledQuery {
            id: def.id.clone(),
            sub_predicates,
        });
    }
    let r_max = queries.iter().map(|q| q.arity()).max().unwrap_or(0);
    Ok(QuerySet {
        schema: schema.clone(),
        queries,
        r_max,
        counts: None,
    })
}

/// Evaluates one query on a dataset: the count of rows satisfying every real
/// sub-predicate. Dummy padding rows are always satisfied.
pub fn evaluate_query(query: &CompiledQuery, dataset: &Dataset) -> usize {
    dataset
        .rows()
        .iter()
        .filter(|row| query.satisfied(row))
        .count()
}

/// Tabulates the whole release: element `i` is `evaluate_query(query_i, D)`.
pub fn tabulate(qs: &QuerySet, dataset: &Dataset) -> Result<Vec<usize>> {
    if qs.schema().as_ref() != dataset.schema().as_ref() {
        return Err(Error::Dimension(
            "query set and dataset use different schemas".into(),
        ));
    }
    Ok(qs
        .queries()
        .iter()
        .map(|q| evaluate_query(q, dataset))
        .collect())
}

/// Tabulation through the padded tensor `Z = Q⁽ⁿ⁾ Xᵀ`: row `k` satisfies query
/// `i` iff every entry of `Z[i,:,k]` is nonzero. A second algebraic route kept
/// for cross-checking against [`tabulate`].
pub fn tabulate_via_tensor(qs: &QuerySet, dataset: &Dataset) -> Result<Vec<usize>> {
    if qs.schema().as_ref() != dataset.schema().as_ref() {
        return Err(Error::Dimension(
            "query set and dataset use different schemas".into(),
        ));
    }
    let tensor = qs.tensor();
    let mut answers = Vec::with_capacity(tensor.len());
    for matrix in &tensor {
        let mut count = 0usize;
        for row in dataset.rows() {
            let all_hit = matrix.iter().all(|mask| {
                let z: usize = mask
                    .iter()
                    .zip(row.bits())
                    .map(|(&q, &x)| (q as usize) * (x as usize))
                    .sum();
                z >= 1
            });
            if all_hit {
                count += 1;
            }
        }
        answers.push(count);
    }
    Ok(answers)
}
