//! File formats: schema/query/stats JSON, dataset CSV, claim and outcome
//! JSONL streams, pool export, and baseline report emission.
//!
//! All emitters are deterministic: maps are serialized with sorted keys and
//! row/claim order follows the canonical orders established upstream.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::baseline::BaselineReport;
use crate::claims::Claim;
use crate::domain::{decode_record, Dataset, PartialAssignment, Record, Schema};
use crate::error::{Error, Result};
use crate::query::{QueryDef, QuerySet};
use crate::solver::{PoolStatus, SolutionPool};
use crate::verifier::{VerificationOutcome, VerificationStatus};

#[derive(Serialize, Deserialize)]
struct SchemaFile {
    columns: Vec<crate::domain::Column>,
}

pub fn schema_from_json(text: &str) -> Result<Schema> {
    let file: SchemaFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("schema JSON: {}", e)))?;
    Schema::new(file.columns)
}

pub fn schema_to_json(schema: &Schema) -> String {
    serde_json::to_string_pretty(&SchemaFile {
        columns: schema.columns().to_vec(),
    })
    .expect("schema serializes")
}

#[derive(Serialize, Deserialize)]
struct QueryFile {
    queries: Vec<QueryDef>,
}

pub fn queries_from_json(text: &str) -> Result<Vec<QueryDef>> {
    let file: QueryFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("query JSON: {}", e)))?;
    Ok(file.queries)
}

pub fn queries_to_json(queries: &[QueryDef]) -> String {
    serde_json::to_string_pretty(&QueryFile {
        queries: queries.to_vec(),
    })
    .expect("queries serialize")
}

/// The published release: per-query counts keyed by query id, plus the public
/// row count N.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PublishedStats {
    pub counts: BTreeMap<String, usize>,
    pub n_rows: usize,
}

impl PublishedStats {
    /// Counts aligned to the query set's order. Every query must be present.
    pub fn aligned_counts(&self, qs: &QuerySet) -> Result<Vec<usize>> {
        qs.queries()
            .iter()
            .map(|q| {
                self.counts.get(&q.id).copied().ok_or_else(|| {
                    Error::Parse(format!("stats file has no count for query {}", q.id))
                })
            })
            .collect()
    }

    pub fn from_tabulation(qs: &QuerySet, counts: &[usize], n_rows: usize) -> Self {
        PublishedStats {
            counts: qs
                .queries()
                .iter()
                .zip(counts)
                .map(|(q, &c)| (q.id.clone(), c))
                .collect(),
            n_rows,
        }
    }
}

pub fn stats_from_json(text: &str) -> Result<PublishedStats> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("stats JSON: {}", e)))
}

pub fn stats_to_json(stats: &PublishedStats) -> String {
    serde_json::to_string_pretty(stats).expect("stats serialize")
}

/// Header row is the schema's column names in order; no quoting, so values
/// must not contain commas or newlines.
pub fn dataset_to_csv(dataset: &Dataset) -> String {
    let schema = dataset.schema();
    let mut out = String::new();
    let names: Vec<&str> = schema.columns().iter().map(|c| c.name.as_str()).collect();
    out.push_str(&names.join(","));
    out.push('\n');
    for row in dataset.rows() {
        let values: Vec<&str> = (0..schema.num_columns())
            .map(|j| schema.column(j).values[row.value_index(j, schema)].as_str())
            .collect();
        out.push_str(&values.join(","));
        out.push('\n');
    }
    out
}

pub fn dataset_from_csv(text: &str, schema: &Arc<Schema>) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("dataset CSV is empty".into()))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    for name in &names {
        schema.column_index(name)?;
    }
    if names.len() != schema.num_columns() {
        return Err(Error::Parse(format!(
            "dataset CSV header has {} columns, schema has {}",
            names.len(),
            schema.num_columns()
        )));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != names.len() {
            return Err(Error::Parse(format!(
                "dataset CSV line {}: {} fields, expected {}",
                lineno + 1,
                fields.len(),
                names.len()
            )));
        }
        records.push(Record::new(
            names.iter().copied().zip(fields.iter().copied()),
        ));
    }
    Dataset::from_records(schema.clone(), &records)
}

/// The attributes object for a claim: every schema column, unassigned ones
/// null. `BTreeMap` keys give sorted, deterministic output.
fn attributes_map(a: &PartialAssignment, schema: &Schema) -> BTreeMap<String, Option<String>> {
    a.to_pairs(schema).into_iter().collect()
}

fn assignment_from_map(
    map: &BTreeMap<String, Option<String>>,
    schema: &Schema,
) -> Result<PartialAssignment> {
    let pairs: Vec<(&str, &str)> = map
        .iter()
        .filter_map(|(c, v)| v.as_deref().map(|v| (c.as_str(), v)))
        .collect();
    PartialAssignment::from_pairs(pairs, schema)
}

#[derive(Serialize, Deserialize)]
struct ClaimLine {
    attributes: BTreeMap<String, Option<String>>,
    m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_cols: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    status: Option<String>,
}

/// One line per claim: `{"attributes":{...},"m":1,"k_cols":2,"status":"candidate"}`.
pub fn claims_to_jsonl<'a>(
    claims: impl IntoIterator<Item = &'a Claim>,
    status: &str,
    schema: &Schema,
) -> String {
    let mut out = String::new();
    for claim in claims {
        let line = ClaimLine {
            attributes: attributes_map(&claim.attributes, schema),
            m: claim.multiplicity,
            k_cols: Some(claim.num_cols()),
            status: Some(status.to_string()),
        };
        out.push_str(&serde_json::to_string(&line).expect("claim serializes"));
        out.push('\n');
    }
    out
}

/// Parses a claim stream. Malformed lines are returned separately as
/// `(line_number, message)` warnings rather than aborting the batch.
pub fn claims_from_jsonl(text: &str, schema: &Schema) -> (Vec<Claim>, Vec<(usize, String)>) {
    let mut claims = Vec::new();
    let mut warnings = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: std::result::Result<ClaimLine, _> = serde_json::from_str(line);
        match parsed {
            Ok(cl) => match assignment_from_map(&cl.attributes, schema) {
                Ok(a) => claims.push(Claim::new(a, cl.m)),
                Err(e) => warnings.push((i + 1, e.to_string())),
            },
            Err(e) => warnings.push((i + 1, e.to_string())),
        }
    }
    (claims, warnings)
}

#[derive(Serialize, Deserialize)]
struct OutcomeLine {
    attributes: BTreeMap<String, Option<String>>,
    m: usize,
    status: String,
    elapsed_ms: u64,
    nodes: u64,
}

pub fn status_label(status: VerificationStatus) -> &'static str {
    match status {
        VerificationStatus::Verified => "verified",
        VerificationStatus::Refuted => "refuted",
        VerificationStatus::Timeout => "timeout",
    }
}

pub fn outcomes_to_jsonl(outcomes: &[VerificationOutcome], schema: &Schema) -> String {
    let mut out = String::new();
    for o in outcomes {
        let line = OutcomeLine {
            attributes: attributes_map(&o.claim.attributes, schema),
            m: o.claim.multiplicity,
            status: status_label(o.status).to_string(),
            elapsed_ms: o.wall_time.as_millis() as u64,
            nodes: o.nodes_expanded,
        };
        out.push_str(&serde_json::to_string(&line).expect("outcome serializes"));
        out.push('\n');
    }
    out
}

/// Parses an outcome stream back into outcomes (counterexamples are not
/// stored in the stream, so they come back as `None`). Malformed lines are
/// returned as `(line_number, message)` warnings.
pub fn outcomes_from_jsonl(
    text: &str,
    schema: &Schema,
) -> (Vec<VerificationOutcome>, Vec<(usize, String)>) {
    let mut outcomes = Vec::new();
    let mut warnings = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: std::result::Result<OutcomeLine, _> = serde_json::from_str(line);
        let line_result = parsed.map_err(|e| e.to_string()).and_then(|ol| {
            let status = match ol.status.as_str() {
                "verified" => VerificationStatus::Verified,
                "refuted" => VerificationStatus::Refuted,
                "timeout" => VerificationStatus::Timeout,
                other => return Err(format!("unknown status {:?}", other)),
            };
            let attributes =
                assignment_from_map(&ol.attributes, schema).map_err(|e| e.to_string())?;
            Ok(VerificationOutcome {
                claim: Claim::new(attributes, ol.m),
                status,
                counterexample: None,
                wall_time: std::time::Duration::from_millis(ol.elapsed_ms),
                nodes_expanded: ol.nodes,
            })
        });
        match line_result {
            Ok(o) => outcomes.push(o),
            Err(e) => warnings.push((i + 1, e)),
        }
    }
    (outcomes, warnings)
}

fn pool_status_label(status: PoolStatus) -> &'static str {
    match status {
        PoolStatus::Exhausted => "exhausted",
        PoolStatus::PoolFull => "pool-full",
        PoolStatus::TimedOut => "timed-out",
    }
}

#[derive(Serialize)]
struct PoolFile<'a> {
    status: &'a str,
    n_datasets: usize,
    /// Each dataset is a list of rows; each row is the per-column value list
    /// in schema column order.
    datasets: Vec<Vec<Vec<String>>>,
}

pub fn pool_to_json(pool: &SolutionPool, schema: &Schema) -> String {
    let datasets = pool
        .datasets
        .iter()
        .map(|d| {
            d.rows()
                .iter()
                .map(|r| {
                    (0..schema.num_columns())
                        .map(|j| schema.column(j).values[r.value_index(j, schema)].clone())
                        .collect()
                })
                .collect()
        })
        .collect::<Vec<_>>();
    serde_json::to_string_pretty(&PoolFile {
        status: pool_status_label(pool.status),
        n_datasets: datasets.len(),
        datasets,
    })
    .expect("pool serializes")
}

/// Compact claim key for report rows: assigned columns only, `col=value`
/// joined by `&`.
pub fn claim_key(a: &PartialAssignment, schema: &Schema) -> String {
    a.to_pairs(schema)
        .into_iter()
        .filter_map(|(c, v)| v.map(|v| format!("{}={}", c, v)))
        .collect::<Vec<_>>()
        .join("&")
}

/// Inverse of [`claim_key`]: parses `col=value&col=value` plus a multiplicity
/// into a claim.
pub fn claim_from_key(key: &str, m: usize, schema: &Schema) -> Result<Claim> {
    let pairs = key
        .split('&')
        .map(|part| {
            part.split_once('=')
                .ok_or_else(|| Error::Parse(format!("claim part {:?} is not col=value", part)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Claim::new(PartialAssignment::from_pairs(pairs, schema)?, m))
}

/// Baseline CSV: claim key, k_cols, m, then one probability column per prior.
pub fn baseline_to_csv(report: &BaselineReport, schema: &Schema) -> String {
    let mut out = String::from("claim,k_cols,m");
    for name in &report.prior_names {
        out.push_str(",p_");
        out.push_str(name);
    }
    out.push('\n');
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{}",
            claim_key(&row.claim.attributes, schema),
            row.k_cols,
            row.claim.multiplicity
        ));
        for p in &row.probabilities {
            out.push_str(&format!(",{}", p));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct SummaryEntry<'a> {
    prior: &'a str,
    k_cols: usize,
    count: usize,
    median: f64,
    q1: f64,
    q3: f64,
    whisker_lo: f64,
    whisker_hi: f64,
}

/// Box-plot summary JSON for plotting tools.
pub fn baseline_summary_json(report: &BaselineReport) -> String {
    let entries: Vec<SummaryEntry> = report
        .summaries
        .iter()
        .map(|s| SummaryEntry {
            prior: &s.prior,
            k_cols: s.k_cols,
            count: s.count,
            median: s.median,
            q1: s.q1,
            q3: s.q3,
            whisker_lo: s.whisker_lo,
            whisker_hi: s.whisker_hi,
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({
        "uniform_over_assigned_columns": report.uniform_over_assigned_columns,
        "skipped_unverified": report.skipped_unverified,
        "summaries": entries,
    }))
    .expect("summary serializes")
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))
}

pub fn load_schema(path: &Path) -> Result<Arc<Schema>> {
    Ok(Arc::new(schema_from_json(&read_to_string(path)?)?))
}

pub fn load_queries(path: &Path) -> Result<Vec<QueryDef>> {
    queries_from_json(&read_to_string(path)?)
}

pub fn load_stats(path: &Path) -> Result<PublishedStats> {
    stats_from_json(&read_to_string(path)?)
}

pub fn load_dataset(path: &Path, schema: &Arc<Schema>) -> Result<Dataset> {
    dataset_from_csv(&read_to_string(path)?, schema)
}

/// Decodes a counterexample (or any dataset) for display: symbolic records in
/// row order.
pub fn dataset_records(dataset: &Dataset) -> Result<Vec<Record>> {
    dataset
        .rows()
        .iter()
        .map(|r| decode_record(r, dataset.schema()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::compile_queries;
    use crate::test_support::*;

    #[test]
    fn schema_roundtrip_matches_documented_shape() {
        let text = r#"{"columns":[{"name":"A","values":["a0","a1"]},{"name":"B","values":["b0","b1","b2"]}]}"#;
        let schema = schema_from_json(text).unwrap();
        assert_eq!(schema, toy_schema());
        let again = schema_from_json(&schema_to_json(&schema)).unwrap();
        assert_eq!(again, schema);
        assert!(schema_from_json("{\"columns\":[]}").is_err());
        assert!(schema_from_json("not json").is_err());
    }

    #[test]
    fn query_roundtrip_matches_documented_shape() {
        let text =
            r#"{"queries":[{"id":"P20.1","predicates":[{"column":"B","values":["b1","b2"]}]}]}"#;
        let defs = queries_from_json(text).unwrap();
        assert_eq!(defs.len(), 1);
        assert_eq!(defs[0].id, "P20.1");
        assert_eq!(defs[0].predicates[0].column, "B");
        let again = queries_from_json(&queries_to_json(&defs)).unwrap();
        assert_eq!(again, defs);
    }

    #[test]
    fn stats_roundtrip_and_alignment() {
        let schema = Arc::new(toy_schema());
        let qs = compile_queries(&toy_query_defs(), &schema).unwrap();
        let stats = PublishedStats::from_tabulation(&qs, &[2, 1, 1, 2, 0], 3);
        let text = stats_to_json(&stats);
        let parsed = stats_from_json(&text).unwrap();
        assert_eq!(parsed, stats);
        assert_eq!(parsed.aligned_counts(&qs).unwrap(), vec![2, 1, 1, 2, 0]);
        assert_eq!(parsed.n_rows, 3);

        let missing = stats_from_json(r#"{"counts":{"A=a0":2},"n_rows":3}"#).unwrap();
        assert!(missing.aligned_counts(&qs).is_err());
    }

    #[test]
    fn dataset_csv_roundtrip() {
        let schema = Arc::new(toy_schema());
        let data = toy_dataset(&schema);
        let csv = dataset_to_csv(&data);
        assert!(csv.starts_with("A,B\n"));
        let parsed = dataset_from_csv(&csv, &schema).unwrap();
        assert_eq!(parsed, data);
        // bad cell is named
        let err = dataset_from_csv("A,B\na0,b9\n", &schema).unwrap_err();
        assert!(err.to_string().contains("b9"));
        assert!(dataset_from_csv("A\na0\n", &schema).is_err());
        assert!(dataset_from_csv("A,B\na0\n", &schema).is_err());
    }

    #[test]
    fn claims_jsonl_roundtrip_with_nulls() {
        let schema = Arc::new(toy_schema());
        let a = PartialAssignment::from_pairs([("A", "a1")], &schema).unwrap();
        let claims = vec![Claim::new(a, 1)];
        let text = claims_to_jsonl(&claims, "candidate", &schema);
        assert!(text.contains(r#""attributes":{"A":"a1","B":null}"#));
        assert!(text.contains(r#""m":1"#));
        assert!(text.contains(r#""k_cols":1"#));
        assert!(text.contains(r#""status":"candidate""#));
        let (parsed, warnings) = claims_from_jsonl(&text, &schema);
        assert_eq!(parsed, claims);
        assert!(warnings.is_empty());
    }

    #[test]
    fn malformed_claim_lines_become_warnings() {
        let schema = Arc::new(toy_schema());
        let text = "\n{\"attributes\":{\"A\":\"a1\",\"B\":null},\"m\":1}\nnot json\n{\"attributes\":{\"A\":\"zz\",\"B\":null},\"m\":1}\n";
        let (parsed, warnings) = claims_from_jsonl(text, &schema);
        assert_eq!(parsed.len(), 1);
        assert_eq!(warnings.len(), 2);
        assert_eq!(warnings[0].0, 3);
        assert_eq!(warnings[1].0, 4);
    }

    #[test]
    fn outcome_lines_match_documented_shape() {
        let schema = Arc::new(toy_schema());
        let a = PartialAssignment::from_pairs([("A", "a1")], &schema).unwrap();
        let outcome = VerificationOutcome {
            claim: Claim::new(a, 1),
            status: VerificationStatus::Verified,
            counterexample: None,
            wall_time: std::time::Duration::from_millis(412),
            nodes_expanded: 9,
        };
        let text = outcomes_to_jsonl(&[outcome], &schema);
        assert!(text.contains(r#""status":"verified""#));
        assert!(text.contains(r#""elapsed_ms":412"#));
    }

    #[test]
    fn outcomes_jsonl_roundtrip() {
        let schema = Arc::new(toy_schema());
        let a = PartialAssignment::from_pairs([("A", "a1")], &schema).unwrap();
        let outcome = VerificationOutcome {
            claim: Claim::new(a, 1),
            status: VerificationStatus::Refuted,
            counterexample: None,
            wall_time: std::time::Duration::from_millis(7),
            nodes_expanded: 3,
        };
        let text = outcomes_to_jsonl(&[outcome.clone()], &schema);
        let (parsed, warnings) = outcomes_from_jsonl(&text, &schema);
        assert!(warnings.is_empty());
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0].claim, outcome.claim);
        assert_eq!(parsed[0].status, outcome.status);
        assert_eq!(parsed[0].wall_time, outcome.wall_time);

        let bad = "{\"attributes\":{\"A\":\"a1\",\"B\":null},\"m\":1,\"status\":\"maybe\",\"elapsed_ms\":0,\"nodes\":0}\n";
        let (parsed, warnings) = outcomes_from_jsonl(bad, &schema);
        assert!(parsed.is_empty());
        assert!(warnings[0].1.contains("maybe"));
    }

    #[test]
    fn claim_key_roundtrip() {
        let schema = Arc::new(toy_schema());
        let a = PartialAssignment::from_pairs([("A", "a0"), ("B", "b2")], &schema).unwrap();
        let key = claim_key(&a, &schema);
        assert_eq!(key, "A=a0&B=b2");
        let claim = claim_from_key(&key, 2, &schema).unwrap();
        assert_eq!(claim.attributes, a);
        assert_eq!(claim.multiplicity, 2);
        assert!(claim_from_key("A", 1, &schema).is_err());
        assert!(claim_from_key("A=zz", 1, &schema).is_err());
    }

    #[test]
    fn pool_json_lists_row_arrays() {
        let schema = Arc::new(toy_schema());
        let pool = SolutionPool {
            datasets: vec![toy_dataset(&schema)],
            status: PoolStatus::Exhausted,
            nodes_expanded: 0,
            wall_time: std::time::Duration::ZERO,
        };
        let text = pool_to_json(&pool, &schema);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["status"], "exhausted");
        assert_eq!(v["n_datasets"], 1);
        assert_eq!(v["datasets"][0][0].as_array().unwrap().len(), 2);
    }

    #[test]
    fn baseline_csv_has_one_probability_column_per_prior() {
        use crate::baseline::{baseline_report, Prior};
        let schema = Arc::new(toy_schema());
        let a = PartialAssignment::from_pairs([("A", "a0")], &schema).unwrap();
        let outcome = VerificationOutcome {
            claim: Claim::new(a, 2),
            status: VerificationStatus::Verified,
            counterexample: None,
            wall_time: std::time::Duration::ZERO,
            nodes_expanded: 0,
        };
        let priors = vec![
            Prior::Uniform,
            Prior::Empirical {
                name: "tract".into(),
                reference: toy_dataset(&schema),
            },
        ];
        let report = baseline_report(&[outcome], &priors, 3, &schema).unwrap();
        let csv = baseline_to_csv(&report, &schema);
        assert!(csv.starts_with("claim,k_cols,m,p_uniform,p_tract\n"));
        assert!(csv.contains("A=a0,1,2,"));
        let summary = baseline_summary_json(&report);
        let v: serde_json::Value = serde_json::from_str(&summary).unwrap();
        assert_eq!(v["summaries"].as_array().unwrap().len(), 2);
        assert_eq!(v["uniform_over_assigned_columns"], true);
    }
}
