//! Candidate claim enumeration, intersection across a solution pool, and
//! reporting filters.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::domain::{Dataset, PartialAssignment, Schema};
use crate::error::{Error, Result};

/// A claim `R(a, m)`: exactly `m` rows of the private dataset match the
/// partial assignment `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Claim {
    pub attributes: PartialAssignment,
    pub multiplicity: usize,
}

impl Claim {
    pub fn new(attributes: PartialAssignment, multiplicity: usize) -> Self {
        Claim {
            attributes,
            multiplicity,
        }
    }

    /// Number of assigned columns `|A|`.
    pub fn num_cols(&self) -> usize {
        self.attributes.num_assigned()
    }
}

/// Canonical claim key: per-column value slots in schema order, multiplicity
/// last. `BTreeSet` ordering over these keys is the canonical claim order used
/// everywhere claims are listed.
pub type ClaimKey = (Vec<Option<usize>>, usize);

/// A set of claims keyed by canonical attribute encoding and multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimSet {
    schema: Arc<Schema>,
    claims: BTreeSet<ClaimKey>,
}

impl ClaimSet {
    pub fn new(schema: Arc<Schema>) -> Self {
        ClaimSet {
            schema,
            claims: BTreeSet::new(),
        }
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn insert(&mut self, claim: &Claim) {
        self.claims
            .insert((claim.attributes.slots().to_vec(), claim.multiplicity));
    }

    pub fn contains(&self, claim: &Claim) -> bool {
        self.claims
            .contains(&(claim.attributes.slots().to_vec(), claim.multiplicity))
    }

    pub fn len(&self) -> usize {
        self.claims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.claims.is_empty()
    }

    /// Claims in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = Claim> + '_ {
        self.claims.iter().map(|(slots, m)| Claim {
            attributes: PartialAssignment::from_slots(slots.clone(), &self.schema)
                .expect("keys are schema-validated on insert"),
            multiplicity: *m,
        })
    }

    pub fn keys(&self) -> &BTreeSet<ClaimKey> {
        &self.claims
    }
}

/// Enumerates every claim observable in a dataset: for each column subset `A`
/// with `min_cols ≤ |A| ≤ max_cols` and each distinct projection of the rows
/// onto `A`, the claim `(a, m)` with `m = count_matches(a, D) ≥ 1`.
/// Zero-multiplicity claims are never generated.
pub fn enumerate_claims(dataset: &Dataset, min_cols: usize, max_cols: usize) -> Result<ClaimSet> {
    let schema = dataset.schema();
    let k = schema.num_columns();
    if min_cols < 1 || min_cols > max_cols || max_cols > k {
        return Err(Error::InvalidArgument(format!(
            "column bounds {}..{} invalid for {} columns",
            min_cols, max_cols, k
        )));
    }
    if k > 20 {
        return Err(Error::InstanceTooLarge(format!(
            "2^{} column subsets exceeds the 2^20 enumeration guard",
            k
        )));
    }
    let row_indices: Vec<Vec<usize>> = dataset
        .rows()
        .iter()
        .map(|row| (0..k).map(|j| row.value_index(j, schema)).collect())
        .collect();

    let mut set = ClaimSet::new(schema.clone());
    for subset in 1u32..(1u32 << k) {
        let cols = subset.count_ones() as usize;
        if cols < min_cols || cols > max_cols {
            continue;
        }
        let mut projections: HashMap<Vec<Option<usize>>, usize> = HashMap::new();
        for indices in &row_indices {
            let slots: Vec<Option<usize>> = (0..k)
                .map(|j| (subset >> j) & 1 == 1)
                .zip(indices)
                .map(|(on, &v)| if on { Some(v) } else { None })
                .collect();
            *projections.entry(slots).or_insert(0) += 1;
        }
        for (slots, m) in projections {
            set.claims.insert((slots, m));
        }
    }
    Ok(set)
}

/// Claims present with identical `(a, m)` in every input set. Any claim
/// outside the intersection already has a refuting dataset in the pool.
pub fn intersect_claims(sets: &[ClaimSet]) -> Result<ClaimSet> {
    let first = sets
        .first()
        .ok_or_else(|| Error::InvalidArgument("cannot intersect zero claim sets".into()))?;
    let mut claims = first.claims.clone();
    for set in &sets[1..] {
        claims = claims.intersection(&set.claims).cloned().collect();
    }
    Ok(ClaimSet {
        schema: first.schema.clone(),
        claims,
    })
}

/// Reporting filters applied to candidate claims before verification.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClaimFilter {
    /// Keep only claims with `m == 1`.
    pub singleton_only: bool,
    /// Keep only claims over at least this many columns.
    pub min_cols: usize,
    /// Drop claims over at most this many columns (they can be read directly
    /// off published tables when this is the release's `r_max`).
    pub drop_trivial_upto: usize,
}

pub fn filter_claims(cs: &ClaimSet, filter: &ClaimFilter) -> ClaimSet {
    let claims = cs
        .claims
        .iter()
        .filter(|(slots, m)| {
            let cols = slots.iter().filter(|s| s.is_some()).count();
            (!filter.singleton_only || *m == 1)
                && cols >= filter.min_cols
                && cols > filter.drop_trivial_upto
        })
        .cloned()
        .collect();
    ClaimSet {
        schema: cs.schema.clone(),
        claims,
    }
}
