//! Claim verification by infeasibility.
//!
//! A claim `(a, m)` is verified when no dataset consistent with the published
//! counts has a match count different from `m`. The disequality splits into
//! two bounded feasibility probes — match count at most `m - 1`, and at least
//! `m + 1` — each run through the same search used for generation. Any
//! solution of either probe is a concrete counterexample; exhausting both
//! proves the claim.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::claims::Claim;
use crate::domain::Dataset;
use crate::error::{Error, Result};
use crate::milp::{export_milp, ClaimMode};
use crate::model::ConstraintModel;
use crate::solver::{search_pool, MatchBound, PoolStatus};

/// Default per-claim verification budget.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(180);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerificationStatus {
    /// Every consistent dataset matches the claim: proven true of the private
    /// data.
    Verified,
    /// Some consistent dataset disagrees with the claim (see the
    /// counterexample).
    Refuted,
    /// The budget expired before either probe finished; nothing is proven.
    Timeout,
}

#[derive(Debug, Clone)]
pub struct VerificationOutcome {
    pub claim: Claim,
    pub status: VerificationStatus,
    /// A consistent dataset whose match count differs from `m`, when refuted.
    pub counterexample: Option<Dataset>,
    pub wall_time: Duration,
    pub nodes_expanded: u64,
}

/// Whether a claim can hold at all: is any consistent dataset's match count
/// exactly `m`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Possibility {
    /// A consistent dataset attains the claim (witness attached).
    Possible(Box<Dataset>),
    /// No consistent dataset attains it: the claim is provably false.
    Impossible,
    /// Budget expired.
    Unknown,
}

fn remaining(deadline: Option<Instant>) -> Option<Duration> {
    deadline.map(|d| d.saturating_duration_since(Instant::now()))
}

/// If the claim's assignment coincides with a released query predicate (all
/// sub-predicates singleton-valued), every consistent dataset's match count
/// equals that query's published target — no search needed.
fn published_count_for(model: &ConstraintModel, claim: &Claim) -> Option<usize> {
    let slots = claim.attributes.slots();
    for (q, &target) in model.queries().queries().iter().zip(model.targets()) {
        if q.arity() != claim.num_cols() {
            continue;
        }
        // arity equal + every sub-predicate pinned to the claim's value on a
        // distinct column => the predicate is exactly the assignment
        let matches = q
            .sub_predicates
            .iter()
            .all(|sp| sp.accepted.len() == 1 && slots[sp.column] == Some(sp.accepted[0]));
        if matches {
            return Some(target);
        }
    }
    None
}

/// Verifies one claim against the model's published counts. `timeout` of
/// `None` means run to exhaustion.
pub fn verify_claim(
    model: &ConstraintModel,
    claim: &Claim,
    timeout: Option<Duration>,
) -> Result<VerificationOutcome> {
    let n = model.n_rows();
    let m = claim.multiplicity;
    if m > n {
        return Err(Error::MultiplicityOutOfRange { m, n });
    }
    let started = Instant::now();
    let deadline = timeout.map(|t| started + t);
    let mut nodes = 0u64;
    let mut timed_out = false;

    if let Some(target) = published_count_for(model, claim) {
        if m == target {
            return Ok(VerificationOutcome {
                claim: claim.clone(),
                status: VerificationStatus::Verified,
                counterexample: None,
                wall_time: started.elapsed(),
                nodes_expanded: 0,
            });
        }
        // the claim contradicts a published count outright; any consistent
        // dataset is a counterexample (none existing means vacuous truth)
        let pool = search_pool(model, None, 1, remaining(deadline));
        return Ok(match (pool.datasets.into_iter().next(), pool.status) {
            (Some(counterexample), _) => VerificationOutcome {
                claim: claim.clone(),
                status: VerificationStatus::Refuted,
                counterexample: Some(counterexample),
                wall_time: started.elapsed(),
                nodes_expanded: pool.nodes_expanded,
            },
            (None, status) => VerificationOutcome {
                claim: claim.clone(),
                status: if status == PoolStatus::TimedOut {
                    VerificationStatus::Timeout
                } else {
                    VerificationStatus::Verified
                },
                counterexample: None,
                wall_time: started.elapsed(),
                nodes_expanded: pool.nodes_expanded,
            },
        });
    }

    // probe the two sides of the disequality; either solution refutes
    let mut probes: Vec<(usize, usize)> = Vec::new();
    if m >= 1 {
        probes.push((0, m - 1));
    }
    if m < n {
        probes.push((m + 1, n));
    }
    for (lo, hi) in probes {
        let bound = MatchBound {
            assignment: claim.attributes.clone(),
            lo,
            hi,
        };
        let pool = search_pool(model, Some(&bound), 1, remaining(deadline));
        nodes += pool.nodes_expanded;
        if let Some(counterexample) = pool.datasets.into_iter().next() {
            return Ok(VerificationOutcome {
                claim: claim.clone(),
                status: VerificationStatus::Refuted,
                counterexample: Some(counterexample),
                wall_time: started.elapsed(),
                nodes_expanded: nodes,
            });
        }
        if pool.status == PoolStatus::TimedOut {
            timed_out = true;
            break;
        }
    }

    Ok(VerificationOutcome {
        claim: claim.clone(),
        status: if timed_out {
            VerificationStatus::Timeout
        } else {
            VerificationStatus::Verified
        },
        counterexample: None,
        wall_time: started.elapsed(),
        nodes_expanded: nodes,
    })
}

/// Verifies claims in parallel. Output order matches input order regardless of
/// thread count; `jobs` of `None` uses the global thread pool.
pub fn verify_batch(
    model: &ConstraintModel,
    claims: &[Claim],
    timeout: Option<Duration>,
    jobs: Option<usize>,
) -> Result<Vec<VerificationOutcome>> {
    let run = || {
        claims
            .par_iter()
            .map(|c| verify_claim(model, c, timeout))
            .collect::<Result<Vec<_>>>()
    };
    match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {}", e)))?
            .install(run),
        None => run(),
    }
}

/// Verifies a candidate batch with counterexample reuse: every refuting
/// dataset found is first tried against the remaining claims, so one
/// counterexample can settle many refutations without a search. Output order
/// matches input order and statuses are deterministic for a fixed model.
pub fn verify_candidates(
    model: &ConstraintModel,
    claims: &[Claim],
    timeout: Option<Duration>,
    jobs: Option<usize>,
) -> Result<Vec<VerificationOutcome>> {
    let run = || -> Result<Vec<VerificationOutcome>> {
        let mut outcomes: Vec<Option<VerificationOutcome>> = vec![None; claims.len()];
        let mut refuters: Vec<Dataset> = Vec::new();
        let mut screened = 0usize; // refuters already tried on every pending claim
        let batch = rayon::current_num_threads().max(1);
        loop {
            // screen pending claims against refuters found since last pass
            if screened < refuters.len() {
                let fresh = &refuters[screened..];
                let hits: Vec<(usize, VerificationOutcome)> = outcomes
                    .par_iter()
                    .enumerate()
                    .filter(|(_, o)| o.is_none())
                    .filter_map(|(i, _)| {
                        let claim = &claims[i];
                        fresh.iter().find_map(|d| {
                            match crate::domain::count_matches(&claim.attributes, d) {
                                Ok(c) if c != claim.multiplicity => Some(Ok((
                                    i,
                                    VerificationOutcome {
                                        claim: claim.clone(),
                                        status: VerificationStatus::Refuted,
                                        counterexample: Some(d.clone()),
                                        wall_time: Duration::ZERO,
                                        nodes_expanded: 0,
                                    },
                                ))),
                                Ok(_) => None,
                                Err(e) => Some(Err(e)),
                            }
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                for (i, o) in hits {
                    outcomes[i] = Some(o);
                }
                screened = refuters.len();
            }
            let pending: Vec<usize> = outcomes
                .iter()
                .enumerate()
                .filter(|(_, o)| o.is_none())
                .map(|(i, _)| i)
                .take(batch)
                .collect();
            if pending.is_empty() {
                break;
            }
            let resolved: Vec<(usize, VerificationOutcome)> = pending
                .par_iter()
                .map(|&i| verify_claim(model, &claims[i], timeout).map(|o| (i, o)))
                .collect::<Result<Vec<_>>>()?;
            for (i, o) in resolved {
                if let Some(d) = &o.counterexample {
                    refuters.push(d.clone());
                }
                outcomes[i] = Some(o);
            }
        }
        Ok(outcomes
            .into_iter()
            .map(|o| o.expect("all claims resolved"))
            .collect())
    };
    match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {}", e)))?
            .install(run),
        None => run(),
    }
}

/// Probes whether any consistent dataset matches the claim exactly `m` times.
/// `Impossible` is a proof the claim is false of the private data.
pub fn prove_impossible(
    model: &ConstraintModel,
    claim: &Claim,
    timeout: Option<Duration>,
) -> Result<Possibility> {
    let n = model.n_rows();
    let m = claim.multiplicity;
    if m > n {
        return Err(Error::MultiplicityOutOfRange { m, n });
    }
    let bound = MatchBound {
        assignment: claim.attributes.clone(),
        lo: m,
        hi: m,
    };
    let pool = search_pool(model, Some(&bound), 1, timeout);
    Ok(match (pool.datasets.into_iter().next(), pool.status) {
        (Some(witness), _) => Possibility::Possible(Box::new(witness)),
        (None, PoolStatus::TimedOut) => Possibility::Unknown,
        (None, _) => Possibility::Impossible,
    })
}

/// LP-format text of the generation system augmented with the claim's
/// disequality side constraint — the model whose infeasibility certifies the
/// claim.
pub fn export_verification_model(model: &ConstraintModel, claim: &Claim) -> String {
    export_milp(model, Some((claim, ClaimMode::NotEqual)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::domain::PartialAssignment;
    use crate::model::build_generation_model;
    use crate::query::compile_queries;
    use crate::test_support::*;

    fn toy_model() -> ConstraintModel {
        let schema = Arc::new(toy_schema());
        let qs = compile_queries(&toy_query_defs(), &schema).unwrap();
        build_generation_model(&qs, &[2, 1, 1, 2, 0], 3, 7).unwrap()
    }

    fn claim(pairs: &[(&str, &str)], m: usize) -> Claim {
        let schema = Arc::new(toy_schema());
        Claim::new(
            PartialAssignment::from_pairs(pairs.iter().copied(), &schema).unwrap(),
            m,
        )
    }

    #[test]
    fn agreed_claims_verify() {
        let model = toy_model();
        for (pairs, m) in [
            (vec![("A", "a0")], 2),
            (vec![("A", "a1")], 1),
            (vec![("B", "b0")], 1),
            (vec![("B", "b1")], 2),
            (vec![("B", "b2")], 0),
        ] {
            let out = verify_claim(&model, &claim(&pairs, m), None).unwrap();
            assert_eq!(out.status, VerificationStatus::Verified, "{:?}", pairs);
            assert!(out.counterexample.is_none());
        }
    }

    #[test]
    fn disagreed_claim_refuted_with_counterexample() {
        let schema = Arc::new(toy_schema());
        let model = toy_model();
        // one dataset has an (a0, b0) row, the other does not
        let out = verify_claim(&model, &claim(&[("A", "a0"), ("B", "b0")], 1), None).unwrap();
        assert_eq!(out.status, VerificationStatus::Refuted);
        assert_eq!(
            out.counterexample.unwrap(),
            toy_alternative_dataset(&schema)
        );
        let out = verify_claim(&model, &claim(&[("A", "a0"), ("B", "b0")], 0), None).unwrap();
        assert_eq!(out.status, VerificationStatus::Refuted);
        assert_eq!(out.counterexample.unwrap(), toy_dataset(&schema));
    }

    #[test]
    fn unique_instance_verifies_every_observed_claim() {
        let schema = Arc::new(toy_schema());
        let qs = compile_queries(&toy_query_defs_with_two_way(), &schema).unwrap();
        let model = build_generation_model(&qs, &[2, 1, 1, 2, 0, 1], 3, 7).unwrap();
        let observed = crate::claims::enumerate_claims(&toy_dataset(&schema), 1, 2).unwrap();
        let claims: Vec<Claim> = observed.iter().collect();
        let outs = verify_batch(&model, &claims, None, Some(2)).unwrap();
        assert_eq!(outs.len(), claims.len());
        for (c, out) in claims.iter().zip(&outs) {
            assert_eq!(out.status, VerificationStatus::Verified, "{:?}", c);
            assert_eq!(&out.claim, c);
        }
    }

    #[test]
    fn impossibility_probe() {
        let model = toy_model();
        // no consistent dataset has exactly one (a1, b2) row: B=b2 count is 0
        let c = claim(&[("A", "a1"), ("B", "b2")], 1);
        assert_eq!(
            prove_impossible(&model, &c, None).unwrap(),
            Possibility::Impossible
        );
        // but exactly one (a0, b0) row is attainable
        let c = claim(&[("A", "a0"), ("B", "b0")], 1);
        assert!(matches!(
            prove_impossible(&model, &c, None).unwrap(),
            Possibility::Possible(_)
        ));
    }

    #[test]
    fn empty_assignment_matches_all_rows() {
        let schema = Arc::new(toy_schema());
        let model = toy_model();
        let all = Claim::new(PartialAssignment::empty(&schema), 3);
        let out = verify_claim(&model, &all, None).unwrap();
        assert_eq!(out.status, VerificationStatus::Verified);
        let wrong = Claim::new(PartialAssignment::empty(&schema), 2);
        let out = verify_claim(&model, &wrong, None).unwrap();
        assert_eq!(out.status, VerificationStatus::Refuted);
    }

    #[test]
    fn multiplicity_beyond_n_rejected() {
        let model = toy_model();
        assert!(verify_claim(&model, &claim(&[("A", "a0")], 4), None).is_err());
    }

    #[test]
    fn batch_order_is_input_order_for_any_thread_count() {
        let model = toy_model();
        let claims: Vec<Claim> =
            crate::claims::enumerate_claims(&toy_dataset(&model.schema().clone()), 1, 2)
                .unwrap()
                .iter()
                .collect();
        let one = verify_batch(&model, &claims, None, Some(1)).unwrap();
        let eight = verify_batch(&model, &claims, None, Some(8)).unwrap();
        let statuses = |v: &[VerificationOutcome]| {
            v.iter()
                .map(|o| (o.claim.clone(), o.status))
                .collect::<Vec<_>>()
        };
        assert_eq!(statuses(&one), statuses(&eight));
    }

    #[test]
    fn verification_model_text_includes_disequality() {
        let model = toy_model();
        let text = export_verification_model(&model, &claim(&[("A", "a1")], 1));
        assert!(text.contains("claim_ne_ub"));
        assert!(text.contains("claim_ne_lb"));
        assert!(text.contains("mode=not-equal"));
    }
}
