//! Depth-first multiset search over the pruned cell domain.
//!
//! Rows are chosen as cell indices in nondecreasing canonical order, which
//! breaks row-permutation symmetry: every multiset is visited exactly once, so
//! pool members are pairwise distinct by construction. The big-M arithmetic is
//! left to the MILP emitter; the search works on the counting constraints
//! directly.

use std::time::{Duration, Instant};

use crate::domain::{Dataset, PartialAssignment};
use crate::error::Result;
use crate::model::ConstraintModel;

/// How the search terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolStatus {
    /// The returned pool is the complete set of feasible canonical datasets.
    Exhausted,
    /// K solutions were found before the search space was exhausted.
    PoolFull,
    /// The deadline expired; the pool is a (possibly empty) partial result.
    TimedOut,
}

/// Up to K distinct feasible datasets plus search statistics.
#[derive(Debug, Clone)]
pub struct SolutionPool {
    pub datasets: Vec<Dataset>,
    pub status: PoolStatus,
    pub nodes_expanded: u64,
    pub wall_time: Duration,
}

/// Outcome of pool-size-2 uniqueness probing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uniqueness {
    Unique,
    NotUnique,
    Infeasible,
    Unknown,
}

/// Side constraint on the number of rows matching a partial assignment.
#[derive(Debug, Clone)]
pub struct MatchBound {
    pub assignment: PartialAssignment,
    pub lo: usize,
    pub hi: usize,
}

struct Search<'a> {
    model: &'a ConstraintModel,
    k_max: usize,
    deadline: Option<Instant>,
    /// Per-cell flag: does this cell match the bound's assignment.
    claim_match: Vec<bool>,
    claim_bound: Option<(usize, usize)>,
    claim_max_support: Option<usize>,
    counts: Vec<usize>,
    /// Per query family: rows placed so far that hit any member.
    family_hits: Vec<usize>,
    chosen: Vec<usize>,
    matched: usize,
    nodes: u64,
    timed_out: bool,
    solutions: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(
        model: &'a ConstraintModel,
        bound: Option<&MatchBound>,
        k_max: usize,
        deadline: Option<Instant>,
    ) -> Self {
        let (claim_match, claim_bound, claim_max_support) = match bound {
            Some(b) => {
                let schema = model.schema();
                let matches: Vec<bool> = model
                    .cells()
                    .iter()
                    .map(|c| b.assignment.matches(&c.row, schema))
                    .collect();
                let max = matches.iter().rposition(|&m| m);
                (matches, Some((b.lo, b.hi)), max)
            }
            None => (vec![false; model.cells().len()], None, None),
        };
        Search {
            k_max,
            deadline,
            claim_match,
            claim_bound,
            claim_max_support,
            counts: vec![0; model.active_targets().len()],
            family_hits: vec![0; model.families().len()],
            chosen: Vec::with_capacity(model.n_rows()),
            matched: 0,
            nodes: 0,
            timed_out: false,
            solutions: Vec::new(),
            model,
        }
    }

    /// Bound pruning: after `t` rows placed with next cell index at least
    /// `start`, every remaining deficit must fit in the remaining rows and
    /// still have a supporting cell ahead.
    fn viable(&self, start: usize, placed: usize) -> bool {
        let remaining = self.model.n_rows() - placed;
        for (a, (&target, &count)) in self
            .model
            .active_targets()
            .iter()
            .zip(&self.counts)
            .enumerate()
        {
            let deficit = target - count;
            if deficit > remaining {
                return false;
            }
            if deficit > 0 && self.model.max_support()[a].map_or(true, |m| m < start) {
                return false;
            }
        }
        // a row hits at most one member of a mutually exclusive family, so
        // the family's total deficit shrinks by at most one per row
        for (f, family) in self.model.families().iter().enumerate() {
            if family.target_total - self.family_hits[f] > remaining {
                return false;
            }
        }
        if let Some((lo, _)) = self.claim_bound {
            if self.matched < lo {
                let deficit = lo - self.matched;
                if deficit > remaining {
                    return false;
                }
                if self.claim_max_support.map_or(true, |m| m < start) {
                    return false;
                }
            }
        }
        true
    }

    fn dfs(&mut self, start: usize) {
        if self.solutions.len() >= self.k_max || self.timed_out {
            return;
        }
        if self.chosen.len() == self.model.n_rows() {
            // viable() with zero remaining rows guarantees all targets and the
            // match bound are met exactly.
            self.solutions.push(self.chosen.clone());
            return;
        }
        for c in start..self.model.cells().len() {
            self.nodes += 1;
            if self.nodes % 1024 == 0 {
                if let Some(deadline) = self.deadline {
                    if Instant::now() >= deadline {
                        self.timed_out = true;
                        return;
                    }
                }
            }
            if !self.try_place(c) {
                continue;
            }
            if self.viable(c, self.chosen.len()) {
                self.dfs(c);
            }
            self.unplace(c);
            if self.solutions.len() >= self.k_max || self.timed_out {
                return;
            }
        }
    }

    /// Cell feasibility: placing must not overshoot any target or the bound.
    fn try_place(&mut self, c: usize) -> bool {
        let cell = &self.model.cells()[c];
        for (i, &a) in cell.satisfies.iter().enumerate() {
            if self.counts[a] + 1 > self.model.active_targets()[a] {
                for &b in &cell.satisfies[..i] {
                    self.counts[b] -= 1;
                }
                return false;
            }
            self.counts[a] += 1;
        }
        if self.claim_match[c] {
            if let Some((_, hi)) = self.claim_bound {
                if self.matched + 1 > hi {
                    for &b in &cell.satisfies {
                        self.counts[b] -= 1;
                    }
                    return false;
                }
            }
            self.matched += 1;
        }
        for &a in &cell.satisfies {
            if let Some(f) = self.model.family_of()[a] {
                self.family_hits[f] += 1;
            }
        }
        self.chosen.push(c);
        true
    }

    fn unplace(&mut self, c: usize) {
        self.chosen.pop();
        let cell = &self.model.cells()[c];
        for &a in &cell.satisfies {
            self.counts[a] -= 1;
            if let Some(f) = self.model.family_of()[a] {
                self.family_hits[f] -= 1;
            }
        }
        if self.claim_match[c] {
            self.matched -= 1;
        }
    }
}

/// Runs the bounded feasibility search, returning up to `k_max` distinct
/// datasets in canonical-lexicographic ascending order. Each returned
/// dataset's rows are ordered by hash value, satisfying the emitted model's
/// row-ordering constraint.
pub fn search_pool(
    model: &ConstraintModel,
    bound: Option<&MatchBound>,
    k_max: usize,
    timeout: Option<Duration>,
) -> SolutionPool {
    let started = Instant::now();
    let deadline = timeout.map(|t| started + t);
    let mut search = Search::new(model, bound, k_max.max(1), deadline);
    if search.viable(0, 0) {
        search.dfs(0);
    }
    let status = if search.timed_out {
        PoolStatus::TimedOut
    } else if search.solutions.len() >= k_max.max(1) {
        PoolStatus::PoolFull
    } else {
        PoolStatus::Exhausted
    };
    let datasets = search
        .solutions
        .iter()
        .map(|cells| {
            let mut rows: Vec<_> = cells
                .iter()
                .map(|&c| model.cells()[c].row.clone())
                .collect();
            rows.sort_by_key(|r| (model.row_hash(r), r.clone()));
            Dataset::new(model.schema().clone(), rows)
        })
        .collect();
    SolutionPool {
        datasets,
        status,
        nodes_expanded: search.nodes,
        wall_time: started.elapsed(),
    }
}

/// Solves Problem 1 up to `k` times, pooling distinct solutions.
pub fn solve_pool(
    model: &ConstraintModel,
    k: usize,
    timeout: Option<Duration>,
) -> Result<SolutionPool> {
    Ok(search_pool(model, None, k, timeout))
}

/// Pool-size-2 probing: is the feasible dataset unique?
pub fn check_uniqueness(model: &ConstraintModel, timeout: Option<Duration>) -> Uniqueness {
    let pool = search_pool(model, None, 2, timeout);
    match (pool.datasets.len(), pool.status) {
        (0, PoolStatus::Exhausted) => Uniqueness::Infeasible,
        (1, PoolStatus::Exhausted) => Uniqueness::Unique,
        (n, _) if n >= 2 => Uniqueness::NotUnique,
        _ => Uniqueness::Unknown,
    }
}
