//! The generation constraint model: query targets, the seeded hash vector for
//! row ordering, and the pruned cell domain shared by the search solver and
//! the MILP emitter.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{OneHotRow, Schema};
use crate::error::{Error, Result};
use crate::query::QuerySet;

/// Upper bound on surviving domain cells after zero-propagation.
const MAX_CELLS: usize = 2_000_000;

/// One surviving domain cell: a full record that satisfies no zero-target
/// query, plus the active (nonzero-target) queries it satisfies.
#[derive(Debug, Clone)]
pub struct Cell {
    pub row: OneHotRow,
    pub satisfies: Vec<usize>,
}

/// A group of pairwise mutually exclusive active queries: same column tuple,
/// single-value predicates, distinct value tuples. Any row satisfies at most
/// one member, so the group's total deficit shrinks by at most one per row.
#[derive(Debug, Clone)]
pub struct QueryFamily {
    /// Sum of the members' targets.
    pub target_total: usize,
    /// Indices into `active_queries`.
    pub members: Vec<usize>,
}

/// The constraint system for one generation instance. Immutable once built.
#[derive(Debug, Clone)]
pub struct ConstraintModel {
    schema: Arc<Schema>,
    queries: QuerySet,
    targets: Vec<usize>,
    n_rows: usize,
    seed: u64,
    hash_vector: Vec<u64>,
    /// Surviving cells in canonical (lexicographic bit-vector) order.
    cells: Vec<Cell>,
    /// Indices of queries with target > 0; search state tracks only these.
    active_queries: Vec<usize>,
    /// Per active query (parallel to `active_queries`): its target.
    active_targets: Vec<usize>,
    /// Per active query: the largest cell index that satisfies it, or None.
    max_support: Vec<Option<usize>>,
    /// Mutually exclusive query groups used for deficit pruning.
    families: Vec<QueryFamily>,
    /// Per active query: its group in `families`, if any.
    family_of: Vec<Option<usize>>,
}

impl ConstraintModel {
    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn queries(&self) -> &QuerySet {
        &self.queries
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Big-M constant used in emitted models: the tightest uniform safe value
    /// given that every bounded expression is a sum of at most N binaries.
    pub fn big_m(&self) -> usize {
        self.n_rows + 1
    }

    pub fn hash_vector(&self) -> &[u64] {
        &self.hash_vector
    }

    /// Hash value `hᵀx` of a row.
    pub fn row_hash(&self, row: &OneHotRow) -> u64 {
        self.hash_vector
            .iter()
            .zip(row.bits())
            .map(|(&h, &b)| h * b as u64)
            .sum()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn active_queries(&self) -> &[usize] {
        &self.active_queries
    }

    pub fn active_targets(&self) -> &[usize] {
        &self.active_targets
    }

    pub fn max_support(&self) -> &[Option<usize>] {
        &self.max_support
    }

    pub fn families(&self) -> &[QueryFamily] {
        &self.families
    }

    pub fn family_of(&self) -> &[Option<usize>] {
        &self.family_of
    }
}

/// Deterministic hash vector: `d` integers drawn uniformly from `[1, 2^31)`.
fn hash_vector(d: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..d).map(|_| rng.random_range(1..(1u64 << 31))).collect()
}

/// Builds the generation model for Problem 1: one-hot block constraints, the
/// per-query counting constraints, and the hash-order row symmetry breaker.
///
/// Zero-propagation happens here: any domain cell satisfying a query with
/// target 0 is deleted before search, by pruning prefixes of the column-wise
/// domain walk as soon as a fully-assigned zero-target query is satisfied.
pub fn build_generation_model(
    queries: &QuerySet,
    targets: &[usize],
    n_rows: usize,
    seed: u64,
) -> Result<ConstraintModel> {
    if n_rows == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if targets.len() != queries.len() {
        return Err(Error::Dimension(format!(
            "{} targets for {} queries",
            targets.len(),
            queries.len()
        )));
    }
    for (q, &t) in queries.queries().iter().zip(targets) {
        if t > n_rows {
            return Err(Error::TargetOutOfRange {
                id: q.id.clone(),
                count: t as i64,
                n: n_rows,
            });
        }
    }
    let schema = queries.schema().clone();
    let k = schema.num_columns();

    // Zero-target queries grouped by the last schema column they constrain,
    // so each is checked exactly once per prefix during the domain walk.
    let mut zero_by_last_col: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, (q, &t)) in queries.queries().iter().zip(targets).enumerate() {
        if t == 0 {
            let last = q.sub_predicates.iter().map(|sp| sp.column).max().unwrap();
            zero_by_last_col[last].push(i);
        }
    }

    // Implied zeros: when a column's single-value 1-way queries have targets
    // summing to N, every row takes one of those values, so the column's
    // remaining values cannot appear in any consistent dataset. This keeps
    // the domain pruned even when explicit zero-count queries are absent.
    let mut banned_value: Vec<Vec<bool>> =
        (0..k).map(|j| vec![false; schema.cardinality(j)]).collect();
    for j in 0..k {
        let mut value_target: std::collections::BTreeMap<usize, usize> =
            std::collections::BTreeMap::new();
        let mut conflict = false;
        for (q, &t) in queries.queries().iter().zip(targets) {
            if let [sp] = q.sub_predicates.as_slice() {
                if sp.column == j && sp.accepted.len() == 1 {
                    match value_target.entry(sp.accepted[0]) {
                        std::collections::btree_map::Entry::Occupied(e) => {
                            conflict |= *e.get() != t;
                        }
                        std::collections::btree_map::Entry::Vacant(e) => {
                            e.insert(t);
                        }
                    }
                }
            }
        }
        if conflict {
            // duplicate queries disagree; the instance is infeasible and the
            // solver will discover that without help
            continue;
        }
        if value_target.values().sum::<usize>() == n_rows {
            for v in 0..schema.cardinality(j) {
                if value_target.get(&v).copied().unwrap_or(0) == 0 {
                    banned_value[j][v] = true;
                }
            }
        }
    }

    let mut cells: Vec<OneHotRow> = Vec::new();
    let mut indices: Vec<usize> = Vec::new();
    walk_domain(
        &schema,
        queries,
        &zero_by_last_col,
        &banned_value,
        &mut indices,
        &mut cells,
    )?;
    cells.sort();

    let active_queries: Vec<usize> = targets
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > 0)
        .map(|(i, _)| i)
        .collect();
    let active_targets: Vec<usize> = active_queries.iter().map(|&i| targets[i]).collect();

    let cells: Vec<Cell> = cells
        .into_iter()
        .map(|row| {
            let satisfies = active_queries
                .iter()
                .enumerate()
                .filter(|(_, &qi)| queries.queries()[qi].satisfied(&row))
                .map(|(a, _)| a)
                .collect();
            Cell { row, satisfies }
        })
        .collect();

    let mut max_support: Vec<Option<usize>> = vec![None; active_queries.len()];
    for (ci, cell) in cells.iter().enumerate() {
        for &a in &cell.satisfies {
            max_support[a] = Some(ci);
        }
    }

    // Group single-value active queries by column tuple. Duplicated value
    // tuples are left ungrouped — identical queries are satisfied together,
    // which would break the one-hit-per-row argument.
    let mut groups: std::collections::BTreeMap<Vec<usize>, Vec<(usize, Vec<usize>)>> =
        std::collections::BTreeMap::new();
    for (a, &qi) in active_queries.iter().enumerate() {
        let q = &queries.queries()[qi];
        if q.sub_predicates.iter().all(|sp| sp.accepted.len() == 1) {
            let mut pairs: Vec<(usize, usize)> = q
                .sub_predicates
                .iter()
                .map(|sp| (sp.column, sp.accepted[0]))
                .collect();
            pairs.sort_unstable();
            let key: Vec<usize> = pairs.iter().map(|&(c, _)| c).collect();
            let values: Vec<usize> = pairs.iter().map(|&(_, v)| v).collect();
            groups.entry(key).or_default().push((a, values));
        }
    }
    let mut families = Vec::new();
    let mut family_of: Vec<Option<usize>> = vec![None; active_queries.len()];
    for (_, mut members) in groups {
        members.sort_by(|x, y| x.1.cmp(&y.1));
        let mut unique: Vec<usize> = Vec::new();
        let mut i = 0;
        while i < members.len() {
            let mut end = i + 1;
            while end < members.len() && members[end].1 == members[i].1 {
                end += 1;
            }
            if end - i == 1 {
                unique.push(members[i].0);
            }
            i = end;
        }
        if unique.len() >= 2 {
            for &a in &unique {
                family_of[a] = Some(families.len());
            }
            families.push(QueryFamily {
                target_total: unique.iter().map(|&a| active_targets[a]).sum(),
                members: unique,
            });
        }
    }

    Ok(ConstraintModel {
        hash_vector: hash_vector(schema.width(), seed),
        schema,
        queries: queries.clone(),
        targets: targets.to_vec(),
        n_rows,
        seed,
        cells,
        active_queries,
        active_targets,
        max_support,
        families,
        family_of,
    })
}

fn walk_domain(
    schema: &Schema,
    queries: &QuerySet,
    zero_by_last_col: &[Vec<usize>],
    banned_value: &[Vec<bool>],
    indices: &mut Vec<usize>,
    out: &mut Vec<OneHotRow>,
) -> Result<()> {
    let t = indices.len();
    if t > 0 {
        for &qi in &zero_by_last_col[t - 1] {
            let banned = queries.queries()[qi]
                .sub_predicates
                .iter()
                .all(|sp| sp.accepted.contains(&indices[sp.column]));
            if banned {
                return Ok(());
            }
        }
    }
    if t == schema.num_columns() {
        if out.len() >= MAX_CELLS {
            return Err(Error::InstanceTooLarge(format!(
                "more than {} surviving domain cells",
                MAX_CELLS
            )));
        }
        out.push(OneHotRow::from_value_indices(indices, schema));
        return Ok(());
    }
    for v in 0..schema.cardinality(t) {
        if banned_value[t][v] {
            continue;
        }
        indices.push(v);
        walk_domain(
            schema,
            queries,
            zero_by_last_col,
            banned_value,
            indices,
            out,
        )?;
        indices.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::compile_queries;
    use crate::test_support::*;

    #[test]
    fn toy_model_dimensions() {
        let schema = Arc::new(toy_schema());
        let qs = compile_queries(&toy_query_defs(), &schema).unwrap();
        let model = build_generation_model(&qs, &[2, 1, 1, 2, 0], 3, 7).unwrap();
        assert_eq!(model.queries().len(), 5);
        assert_eq!(model.schema().width(), 5);
        assert_eq!(model.queries().r_max(), 1);
        assert_eq!(model.big_m(), 4);
    }

    #[test]
    fn zero_propagation_deletes_banned_cells() {
        let schema = Arc::new(toy_schema());
        let qs = compile_queries(&toy_query_defs(), &schema).unwrap();
        // B=b2 has target 0: cells (a0,b2) and (a1,b2) must be gone.
        let model = build_generation_model(&qs, &[2, 1, 1, 2, 0], 3, 7).unwrap();
        assert_eq!(model.cells().len(), 4);
        for cell in model.cells() {
            assert_ne!(cell.row.value_index(1, &schema), 2);
        }
    }

    #[test]
    fn implied_zeros_prune_without_explicit_zero_queries() {
        let schema = Arc::new(toy_schema());
        // drop the B=b2 (count 0) query: B=b0 and B=b1 still sum to N = 3,
        // so b2 is provably absent and its cells stay pruned
        let defs: Vec<_> = toy_query_defs().into_iter().take(4).collect();
        let qs = compile_queries(&defs, &schema).unwrap();
        let model = build_generation_model(&qs, &[2, 1, 1, 2], 3, 7).unwrap();
        assert_eq!(model.cells().len(), 4);
        for cell in model.cells() {
            assert_ne!(cell.row.value_index(1, &schema), 2);
        }

        // with B=b1 also gone the family sums to 1 < N and no inference fires
        let defs: Vec<_> = toy_query_defs().into_iter().take(3).collect();
        let qs = compile_queries(&defs, &schema).unwrap();
        let model = build_generation_model(&qs, &[2, 1, 1], 3, 7).unwrap();
        assert_eq!(model.cells().len(), 6);
    }

    #[test]
    fn hash_vector_is_seed_deterministic() {
        let schema = Arc::new(toy_schema());
        let qs = compile_queries(&toy_query_defs(), &schema).unwrap();
        let m1 = build_generation_model(&qs, &[2, 1, 1, 2, 0], 3, 42).unwrap();
        let m2 = build_generation_model(&qs, &[2, 1, 1, 2, 0], 3, 42).unwrap();
        let m3 = build_generation_model(&qs, &[2, 1, 1, 2, 0], 3, 43).unwrap();
        assert_eq!(m1.hash_vector(), m2.hash_vector());
        assert_ne!(m1.hash_vector(), m3.hash_vector());
        assert!(m1
            .hash_vector()
            .iter()
            .all(|&h| (1..(1u64 << 31)).contains(&h)));
    }

    #[test]
    fn target_out_of_range_rejected() {
        let schema = Arc::new(toy_schema());
        let qs = compile_queries(&toy_query_defs(), &schema).unwrap();
        assert!(build_generation_model(&qs, &[4, 1, 1, 2, 0], 3, 7).is_err());
        assert!(build_generation_model(&qs, &[2, 1, 1, 2, 0], 0, 7).is_err());
        assert!(build_generation_model(&qs, &[2, 1], 3, 7).is_err());
    }

    #[test]
    fn cells_are_canonically_ordered() {
        let schema = Arc::new(toy_schema());
        let qs = compile_queries(&toy_query_defs(), &schema).unwrap();
        let model = build_generation_model(&qs, &[2, 1, 1, 2, 0], 3, 7).unwrap();
        for pair in model.cells().windows(2) {
            assert!(pair[0].row < pair[1].row);
        }
    }
}
