//! Brute-force ground truth for tiny instances.
//!
//! Enumerates every size-N multiset over the full record domain and keeps the
//! ones whose tabulation matches the targets, then derives the exact verified
//! claim set by checking each candidate claim against every feasible dataset.
//! Deliberately has no propagation or pruning beyond the size guard, so it
//! cannot share bugs with the search solver it certifies.

use std::sync::Arc;

use crate::claims::{Claim, ClaimSet};
use crate::domain::{count_matches, Dataset, OneHotRow, PartialAssignment, Schema};
use crate::error::{Error, Result};
use crate::query::QuerySet;

const MAX_COMBINATIONS: u128 = 10_000_000;

/// `C(domain + N − 1, N)`, saturating.
fn multiset_count(domain: u128, n: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..n as u128 {
        acc = acc.saturating_mul(domain.saturating_add(i));
        acc /= i + 1;
    }
    acc
}

/// All domain cells as one-hot rows in canonical (lexicographic) order.
pub fn domain_cells(schema: &Schema) -> Vec<OneHotRow> {
    let k = schema.num_columns();
    let mut cells = Vec::new();
    let mut indices = vec![0usize; k];
    loop {
        cells.push(OneHotRow::from_value_indices(&indices, schema));
        let mut j = k;
        loop {
            if j == 0 {
                cells.sort();
                return cells;
            }
            j -= 1;
            indices[j] += 1;
            if indices[j] < schema.cardinality(j) {
                break;
            }
            indices[j] = 0;
        }
    }
}

/// Symbolic satisfaction check, independent of the one-hot mask machinery.
fn row_satisfies(query_index: usize, row_values: &[usize], qs: &QuerySet) -> bool {
    qs.queries()[query_index]
        .sub_predicates
        .iter()
        .all(|sp| sp.accepted.contains(&row_values[sp.column]))
}

/// All size-N multisets over the full domain whose tabulation equals
/// `targets`, in canonical order. Refuses instances beyond the combination
/// guard.
pub fn enumerate_feasible(
    schema: &Arc<Schema>,
    n: usize,
    qs: &QuerySet,
    targets: &[usize],
) -> Result<Vec<Dataset>> {
    if targets.len() != qs.len() {
        return Err(Error::Dimension(format!(
            "{} targets for {} queries",
            targets.len(),
            qs.len()
        )));
    }
    let domain = schema.domain_size();
    let combos = multiset_count(domain, n);
    if combos > MAX_COMBINATIONS {
        return Err(Error::InstanceTooLarge(format!(
            "{} multisets exceeds the {} oracle guard",
            combos, MAX_COMBINATIONS
        )));
    }
    let cells = domain_cells(schema);
    let cell_values: Vec<Vec<usize>> = cells
        .iter()
        .map(|c| {
            (0..schema.num_columns())
                .map(|j| c.value_index(j, schema))
                .collect()
        })
        .collect();

    let mut feasible = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    enumerate_rec(
        0,
        n,
        &cells,
        &cell_values,
        qs,
        targets,
        schema,
        &mut chosen,
        &mut feasible,
    );
    Ok(feasible)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rec(
    start: usize,
    n: usize,
    cells: &[OneHotRow],
    cell_values: &[Vec<usize>],
    qs: &QuerySet,
    targets: &[usize],
    schema: &Arc<Schema>,
    chosen: &mut Vec<usize>,
    feasible: &mut Vec<Dataset>,
) {
    if chosen.len() == n {
        let counts: Vec<usize> = (0..qs.len())
            .map(|i| {
                chosen
                    .iter()
                    .filter(|&&c| row_satisfies(i, &cell_values[c], qs))
                    .count()
            })
            .collect();
        if counts == targets {
            let rows = chosen.iter().map(|&c| cells[c].clone()).collect();
            feasible.push(Dataset::new(schema.clone(), rows));
        }
        return;
    }
    for c in start..cells.len() {
        chosen.push(c);
        enumerate_rec(
            c,
            n,
            cells,
            cell_values,
            qs,
            targets,
            schema,
            chosen,
            feasible,
        );
        chosen.pop();
    }
}

/// The exact ground-truth verified claim set: every `(a, m)` with `m ≥ 1` that
/// holds in all feasible datasets. Empty (vacuously) when the instance is
/// infeasible.
pub fn oracle_verified_claims(
    feasible: &[Dataset],
    schema: &Arc<Schema>,
    min_cols: usize,
    max_cols: usize,
) -> Result<ClaimSet> {
    let mut verified = ClaimSet::new(schema.clone());
    let Some(first) = feasible.first() else {
        return Ok(verified);
    };
    let k = schema.num_columns();
    if min_cols < 1 || min_cols > max_cols || max_cols > k {
        return Err(Error::InvalidArgument(format!(
            "column bounds {}..{} invalid for {} columns",
            min_cols, max_cols, k
        )));
    }
    // Candidate claims come from projections of the first feasible dataset;
    // any claim true in every feasible dataset is in particular true in the
    // first one, so this is exhaustive.
    for subset in 1u32..(1u32 << k) {
        let cols = subset.count_ones() as usize;
        if cols < min_cols || cols > max_cols {
            continue;
        }
        for row in first.rows() {
            let slots: Vec<Option<usize>> = (0..k)
                .map(|j| {
                    if (subset >> j) & 1 == 1 {
                        Some(row.value_index(j, schema))
                    } else {
                        None
                    }
                })
                .collect();
            let a = PartialAssignment::from_slots(slots, schema)?;
            let m = count_matches(&a, first)?;
            if feasible[1..]
                .iter()
                .all(|d| count_matches(&a, d).map(|c| c == m).unwrap_or(false))
            {
                verified.insert(&Claim::new(a, m));
            }
        }
    }
    Ok(verified)
}
