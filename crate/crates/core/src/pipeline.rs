//! End-to-end attack orchestration: generate a solution pool, intersect the
//! pool's claim sets into candidates, verify each candidate, and report.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::time::Duration;

use crate::baseline::{baseline_report, Prior};
use crate::claims::{
    enumerate_claims, filter_claims, intersect_claims, Claim, ClaimFilter, ClaimSet,
};
use crate::domain::{count_matches, Dataset};
use crate::error::{Error, Result};
use crate::io;
use crate::model::build_generation_model;
use crate::query::QuerySet;
use crate::solver::{solve_pool, PoolStatus, SolutionPool};
use crate::verifier::{
    verify_candidates, VerificationOutcome, VerificationStatus, DEFAULT_TIMEOUT,
};

/// Knobs for one attack run. Defaults follow the solver defaults: pool size
/// 100, three minutes per claim.
#[derive(Debug, Clone)]
pub struct AttackSettings {
    pub pool_size: usize,
    pub claim_timeout: Option<Duration>,
    pub gen_timeout: Option<Duration>,
    pub seed: u64,
    pub filter: ClaimFilter,
    /// Upper bound on claim width; `None` means all columns.
    pub max_cols: Option<usize>,
    /// Ablation: drop queries whose published count is in this set.
    pub drop_count_values: HashSet<usize>,
    pub jobs: Option<usize>,
}

impl Default for AttackSettings {
    fn default() -> Self {
        AttackSettings {
            pool_size: 100,
            claim_timeout: Some(DEFAULT_TIMEOUT),
            gen_timeout: None,
            seed: 0,
            filter: ClaimFilter::default(),
            max_cols: None,
            drop_count_values: HashSet::new(),
            jobs: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AttackReport {
    pub pool: SolutionPool,
    pub candidates: ClaimSet,
    pub outcomes: Vec<VerificationOutcome>,
    /// Verified-claim counts keyed by claim width.
    pub verified_per_k: BTreeMap<usize, usize>,
    /// Whether any verified singleton (m = 1) exists at each width.
    pub verified_singleton_per_k: BTreeMap<usize, bool>,
    /// Verified full-width singletons: whole households pinned down exactly.
    pub households_identified: usize,
    /// The published counts admit no dataset at all.
    pub infeasible: bool,
    /// Generation hit its deadline; the pool (and thus candidates) may be
    /// incomplete.
    pub generation_timed_out: bool,
    pub timeouts: usize,
    /// Verified claims contradicted by the supplied ground truth. Any entry
    /// is a correctness bug, not a data property.
    pub soundness_violations: Vec<Claim>,
}

/// Runs generate-then-verify against a query set with published counts
/// attached. When `ground_truth` is given, every Verified claim is also
/// checked against it.
pub fn run_attack(
    queries: &QuerySet,
    n_rows: usize,
    settings: &AttackSettings,
    ground_truth: Option<&Dataset>,
) -> Result<AttackReport> {
    if settings.pool_size == 0 {
        return Err(Error::InvalidArgument(
            "pool size must be at least 1".into(),
        ));
    }
    let queries = if settings.drop_count_values.is_empty() {
        queries.clone()
    } else {
        queries.filter_by_count(&settings.drop_count_values)?
    };
    let targets = queries
        .counts()
        .ok_or_else(|| Error::Query("published counts not loaded".into()))?
        .to_vec();
    let schema = queries.schema().clone();
    let model = build_generation_model(&queries, &targets, n_rows, settings.seed)?;
    let pool = solve_pool(&model, settings.pool_size, settings.gen_timeout)?;
    let generation_timed_out = pool.status == PoolStatus::TimedOut;

    let k = schema.num_columns();
    let max_cols = settings.max_cols.unwrap_or(k).min(k);
    let empty_report = |pool: SolutionPool, infeasible: bool| AttackReport {
        pool,
        candidates: ClaimSet::new(schema.clone()),
        outcomes: Vec::new(),
        verified_per_k: BTreeMap::new(),
        verified_singleton_per_k: BTreeMap::new(),
        households_identified: 0,
        infeasible,
        generation_timed_out,
        timeouts: 0,
        soundness_violations: Vec::new(),
    };
    if pool.datasets.is_empty() {
        // Exhausted and empty: the published counts are inconsistent. Timed
        // out and empty: nothing to intersect yet.
        return Ok(empty_report(pool, !generation_timed_out));
    }

    let sets = pool
        .datasets
        .iter()
        .map(|d| enumerate_claims(d, 1, max_cols))
        .collect::<Result<Vec<_>>>()?;
    let candidates = filter_claims(&intersect_claims(&sets)?, &settings.filter);
    let claims: Vec<Claim> = candidates.iter().collect();
    let outcomes = verify_candidates(&model, &claims, settings.claim_timeout, settings.jobs)?;

    let mut verified_per_k = BTreeMap::new();
    let mut verified_singleton_per_k = BTreeMap::new();
    let mut households_identified = 0;
    let mut timeouts = 0;
    let mut soundness_violations = Vec::new();
    for out in &outcomes {
        match out.status {
            VerificationStatus::Verified => {
                let kc = out.claim.num_cols();
                *verified_per_k.entry(kc).or_insert(0) += 1;
                let flag = verified_singleton_per_k.entry(kc).or_insert(false);
                if out.claim.multiplicity == 1 {
                    *flag = true;
                    if kc == k {
                        households_identified += 1;
                    }
                }
                if let Some(gt) = ground_truth {
                    if count_matches(&out.claim.attributes, gt)? != out.claim.multiplicity {
                        soundness_violations.push(out.claim.clone());
                    }
                }
            }
            VerificationStatus::Timeout => timeouts += 1,
            VerificationStatus::Refuted => {}
        }
    }

    Ok(AttackReport {
        pool,
        candidates,
        outcomes,
        verified_per_k,
        verified_singleton_per_k,
        households_identified,
        infeasible: false,
        generation_timed_out,
        timeouts,
        soundness_violations,
    })
}

/// Summary JSON mirroring the JSONL artifacts; counts here are recomputable
/// from those files.
pub fn summary_json(report: &AttackReport, n_rows: usize) -> String {
    let per_k: BTreeMap<String, usize> = report
        .verified_per_k
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    let singles: BTreeMap<String, bool> = report
        .verified_singleton_per_k
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    let mut value = serde_json::json!({
        "n_rows": n_rows,
        "pool_size": report.pool.datasets.len(),
        "pool_status": match report.pool.status {
            PoolStatus::Exhausted => "exhausted",
            PoolStatus::PoolFull => "pool-full",
            PoolStatus::TimedOut => "timed-out",
        },
        "infeasible": report.infeasible,
        "generation_timed_out": report.generation_timed_out,
        "candidates": report.candidates.len(),
        "verified_total": report.verified_per_k.values().sum::<usize>(),
        "verified_per_k": per_k,
        "verified_singleton_per_k": singles,
        "households_identified": report.households_identified,
        "timeouts": report.timeouts,
        "soundness_violations": report.soundness_violations.len(),
    });
    if report.infeasible {
        value["message"] = serde_json::Value::String("published counts are inconsistent".into());
    }
    serde_json::to_string_pretty(&value).expect("summary serializes")
}

/// Writes the report bundle: `pool.json`, `candidates.jsonl`,
/// `outcomes.jsonl`, `summary.json`, and (with priors) `baseline.csv` plus
/// `baseline_summary.json`.
pub fn write_report(
    report: &AttackReport,
    n_rows: usize,
    priors: &[Prior],
    dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let schema = report.candidates.schema().clone();
    std::fs::write(
        dir.join("pool.json"),
        io::pool_to_json(&report.pool, &schema),
    )?;
    let claims: Vec<Claim> = report.candidates.iter().collect();
    std::fs::write(
        dir.join("candidates.jsonl"),
        io::claims_to_jsonl(&claims, "candidate", &schema),
    )?;
    std::fs::write(
        dir.join("outcomes.jsonl"),
        io::outcomes_to_jsonl(&report.outcomes, &schema),
    )?;
    std::fs::write(dir.join("summary.json"), summary_json(report, n_rows))?;
    if !priors.is_empty() {
        let baseline = baseline_report(&report.outcomes, priors, n_rows, &schema)?;
        std::fs::write(
            dir.join("baseline.csv"),
            io::baseline_to_csv(&baseline, &schema),
        )?;
        std::fs::write(
            dir.join("baseline_summary.json"),
            io::baseline_summary_json(&baseline),
        )?;
    }
    Ok(())
}
