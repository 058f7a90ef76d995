//! `reclaim` — reconstruct verified partial claims about the rows of a
//! private discrete table from its published marginal counts.
//!
//! Exit codes: 0 success, 1 usage or parse failure, 2 published counts are
//! inconsistent, 3 partial result (timeouts or skipped records).

use std::collections::{BTreeSet, HashSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use reclaim_core::baseline::{baseline_report, Prior};
use reclaim_core::claims::{enumerate_claims, filter_claims, intersect_claims, Claim, ClaimFilter};
use reclaim_core::domain::{count_matches, Dataset, Schema};
use reclaim_core::io;
use reclaim_core::milp::{export_milp, ClaimMode};
use reclaim_core::model::build_generation_model;
use reclaim_core::oracle::{enumerate_feasible, oracle_verified_claims};
use reclaim_core::pipeline::{run_attack, summary_json, write_report, AttackSettings};
use reclaim_core::query::{compile_queries, tabulate, QuerySet};
use reclaim_core::solver::solve_pool;
use reclaim_core::verifier::{
    prove_impossible, verify_candidates, Possibility, VerificationStatus,
};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "reclaim",
    version,
    about = "Reconstructs verified partial rows of a private table from published marginal counts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate a dataset against a query set and emit the published-stats file
    Tabulate(TabulateArgs),
    /// Full pipeline: pool generation, claim intersection, verification, reports
    Attack(AttackArgs),
    /// Generate a pool of datasets consistent with the published counts
    Generate(GenerateArgs),
    /// Emit candidate claims (pool intersection) without verifying them
    Candidates(GenerateArgs),
    /// Verify externally supplied claims against the published counts
    Verify(VerifyArgs),
    /// Score verified outcomes against binomial guessing baselines
    Baseline(BaselineArgs),
    /// Export the feasibility system as an LP-format model file
    ExportModel(ExportModelArgs),
    /// Cross-check the pipeline against brute-force enumeration on a small instance
    OracleCheck(OracleCheckArgs),
    /// Write the bundled example instances to a directory
    Fixtures(FixturesArgs),
}

/// Where the counts come from: a published-stats file, or a ground-truth
/// dataset to tabulate (which also enables soundness scoring).
#[derive(Args)]
struct InstanceArgs {
    /// Schema JSON file
    #[arg(long)]
    schema: PathBuf,
    /// Query-set JSON file
    #[arg(long)]
    queries: PathBuf,
    /// Published-stats JSON file (counts keyed by query id, plus N)
    #[arg(long, conflicts_with = "dataset")]
    stats: Option<PathBuf>,
    /// Ground-truth dataset CSV; counts are tabulated from it
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Number of rows N; defaults to the stats file's N or the dataset length
    #[arg(long)]
    n_rows: Option<usize>,
}

struct Instance {
    schema: Arc<Schema>,
    queries: QuerySet,
    n_rows: usize,
    ground_truth: Option<Dataset>,
}

impl InstanceArgs {
    fn load(&self) -> anyhow::Result<Instance> {
        let schema = io::load_schema(&self.schema)?;
        let defs = io::load_queries(&self.queries)?;
        let queries = compile_queries(&defs, &schema)?;
        let (counts, n_rows, ground_truth) = match (&self.stats, &self.dataset) {
            (Some(stats_path), None) => {
                let stats = io::load_stats(stats_path)?;
                let counts = stats.aligned_counts(&queries)?;
                (counts, self.n_rows.unwrap_or(stats.n_rows), None)
            }
            (None, Some(dataset_path)) => {
                let dataset = io::load_dataset(dataset_path, &schema)?;
                let counts = tabulate(&queries, &dataset)?;
                (counts, self.n_rows.unwrap_or(dataset.len()), Some(dataset))
            }
            _ => bail!("exactly one of --stats or --dataset must be given"),
        };
        let queries = queries.with_counts(counts, n_rows)?;
        Ok(Instance {
            schema,
            queries,
            n_rows,
            ground_truth,
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Solution pool size K
    #[arg(long, default_value_t = 100)]
    pool_size: usize,
    /// Per-claim verification timeout in seconds; 0 disables it
    #[arg(long, default_value_t = 180)]
    timeout_secs: u64,
    /// Generation timeout in seconds; unset means run until the pool fills
    #[arg(long)]
    gen_timeout_secs: Option<u64>,
    /// Seed for the symmetry-breaking hash order
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to all cores
    #[arg(long)]
    jobs: Option<usize>,
}

impl SolveArgs {
    fn claim_timeout(&self) -> Option<Duration> {
        (self.timeout_secs > 0).then(|| Duration::from_secs(self.timeout_secs))
    }

    fn gen_timeout(&self) -> Option<Duration> {
        self.gen_timeout_secs.map(Duration::from_secs)
    }
}

#[derive(Args)]
struct FilterArgs {
    /// Keep only claims with multiplicity 1
    #[arg(long)]
    singleton_only: bool,
    /// Keep only claims over at least this many columns
    #[arg(long, default_value_t = 0)]
    min_cols: usize,
    /// Drop claims over at most this many columns (readable off the tables)
    #[arg(long, default_value_t = 0)]
    drop_trivial_upto: usize,
    /// Upper bound on claim width; defaults to all columns
    #[arg(long)]
    max_cols: Option<usize>,
    /// Ablation: drop queries whose published count is one of these values
    #[arg(long, value_delimiter = ',')]
    drop_count_values: Vec<usize>,
}

impl FilterArgs {
    fn claim_filter(&self) -> ClaimFilter {
        ClaimFilter {
            singleton_only: self.singleton_only,
            min_cols: self.min_cols,
            drop_trivial_upto: self.drop_trivial_upto,
        }
    }
}

#[derive(Args)]
struct TabulateArgs {
    /// Schema JSON file
    #[arg(long)]
    schema: PathBuf,
    /// Query-set JSON file
    #[arg(long)]
    queries: PathBuf,
    /// Dataset CSV to tabulate
    #[arg(long)]
    dataset: PathBuf,
    /// Output stats file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    solve: SolveArgs,
    #[command(flatten)]
    filter: FilterArgs,
    /// Reference dataset for an empirical guessing prior, as name=PATH
    /// (e.g. --prior tract=tract.csv); repeatable
    #[arg(long, value_name = "NAME=PATH")]
    prior: Vec<String>,
    /// Report directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    solve: SolveArgs,
    #[command(flatten)]
    filter: FilterArgs,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    solve: SolveArgs,
    /// Claims JSONL file to verify
    #[arg(long)]
    claims: PathBuf,
    /// exact: prove the count equals m in every consistent dataset;
    /// impossible: prove no consistent dataset has count exactly m
    #[arg(long, default_value = "exact")]
    mode: VerifyMode,
    /// Output outcomes file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum VerifyMode {
    Exact,
    Impossible,
}

#[derive(Args)]
struct BaselineArgs {
    /// Schema JSON file
    #[arg(long)]
    schema: PathBuf,
    /// Outcomes JSONL file from a previous attack or verify run
    #[arg(long)]
    outcomes: PathBuf,
    /// Number of rows N in the attacked block
    #[arg(long)]
    n_rows: usize,
    /// Reference dataset for an empirical guessing prior, as name=PATH; repeatable
    #[arg(long, value_name = "NAME=PATH")]
    prior: Vec<String>,
    /// Report directory for baseline.csv and baseline_summary.json
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportModelArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Seed for the symmetry-breaking hash order
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional claim to encode as a side constraint, as col=value&col=value
    #[arg(long, requires = "m")]
    claim: Option<String>,
    /// The claim's multiplicity
    #[arg(long, short = 'm', requires = "claim")]
    m: Option<usize>,
    /// Encode the claim as an equality probe instead of the disequality used
    /// for verification
    #[arg(long)]
    equality: bool,
    /// Output LP file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleCheckArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Seed for the symmetry-breaking hash order
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FixturesArgs {
    /// Directory receiving one subdirectory per fixture
    #[arg(long)]
    out: PathBuf,
}

fn parse_priors(specs: &[String], schema: &Arc<Schema>) -> anyhow::Result<Vec<Prior>> {
    let mut priors = vec![Prior::Uniform];
    for spec in specs {
        let (name, path) = spec
            .split_once('=')
            .ok_or_else(|| anyhow!("--prior must be NAME=PATH, got {:?}", spec))?;
        let reference =
            io::load_dataset(Path::new(path), schema).with_context(|| format!("prior {}", name))?;
        priors.push(Prior::Empirical {
            name: name.to_string(),
            reference,
        });
    }
    Ok(priors)
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, text)?;
        }
        None => print!("{}", text),
    }
    Ok(())
}

fn cmd_tabulate(args: &TabulateArgs) -> anyhow::Result<u8> {
    let schema = io::load_schema(&args.schema)?;
    let defs = io::load_queries(&args.queries)?;
    let queries = compile_queries(&defs, &schema)?;
    let dataset = io::load_dataset(&args.dataset, &schema)?;
    let counts = tabulate(&queries, &dataset)?;
    let stats = io::PublishedStats::from_tabulation(&queries, &counts, dataset.len());
    write_or_print(&args.out, &io::stats_to_json(&stats))?;
    let zero = counts.iter().filter(|&&c| c == 0).count();
    let one = counts.iter().filter(|&&c| c == 1).count();
    let multi = counts.len() - zero - one;
    eprintln!(
        "{} queries over N = {} rows: {} zero counts, {} ones, {} of two or more",
        counts.len(),
        dataset.len(),
        zero,
        one,
        multi
    );
    Ok(0)
}

fn attack_settings(solve: &SolveArgs, filter: &FilterArgs) -> AttackSettings {
    AttackSettings {
        pool_size: solve.pool_size,
        claim_timeout: solve.claim_timeout(),
        gen_timeout: solve.gen_timeout(),
        seed: solve.seed,
        filter: filter.claim_filter(),
        max_cols: filter.max_cols,
        drop_count_values: filter.drop_count_values.iter().copied().collect(),
        jobs: solve.jobs,
    }
}

fn cmd_attack(args: &AttackArgs) -> anyhow::Result<u8> {
    let instance = args.instance.load()?;
    let settings = attack_settings(&args.solve, &args.filter);
    let priors = parse_priors(&args.prior, &instance.schema)?;
    let report = run_attack(
        &instance.queries,
        instance.n_rows,
        &settings,
        instance.ground_truth.as_ref(),
    )?;
    write_report(&report, instance.n_rows, &priors, &args.out)?;
    eprintln!("{}", summary_json(&report, instance.n_rows));
    for claim in &report.soundness_violations {
        eprintln!(
            "CRITICAL: verified claim contradicts ground truth: ({}, {})",
            io::claim_key(&claim.attributes, &instance.schema),
            claim.multiplicity
        );
    }
    if !report.soundness_violations.is_empty() {
        bail!("soundness violations detected");
    }
    if report.infeasible {
        eprintln!("published counts are inconsistent: no dataset matches them");
        return Ok(EXIT_INFEASIBLE);
    }
    if report.timeouts > 0 || report.generation_timed_out {
        return Ok(EXIT_PARTIAL);
    }
    Ok(0)
}

fn cmd_generate(args: &GenerateArgs) -> anyhow::Result<u8> {
    let instance = args.instance.load()?;
    let queries = apply_ablation(&instance.queries, &args.filter)?;
    let targets = queries.counts().expect("counts attached").to_vec();
    let model = build_generation_model(&queries, &targets, instance.n_rows, args.solve.seed)?;
    let pool = solve_pool(&model, args.solve.pool_size, args.solve.gen_timeout())?;
    write_or_print(&args.out, &io::pool_to_json(&pool, &instance.schema))?;
    if pool.datasets.is_empty() && pool.status != reclaim_core::solver::PoolStatus::TimedOut {
        eprintln!("published counts are inconsistent: no dataset matches them");
        return Ok(EXIT_INFEASIBLE);
    }
    if pool.status == reclaim_core::solver::PoolStatus::TimedOut {
        return Ok(EXIT_PARTIAL);
    }
    Ok(0)
}

fn apply_ablation(queries: &QuerySet, filter: &FilterArgs) -> anyhow::Result<QuerySet> {
    if filter.drop_count_values.is_empty() {
        Ok(queries.clone())
    } else {
        let drop: HashSet<usize> = filter.drop_count_values.iter().copied().collect();
        Ok(queries.filter_by_count(&drop)?)
    }
}

fn cmd_candidates(args: &GenerateArgs) -> anyhow::Result<u8> {
    let instance = args.instance.load()?;
    let queries = apply_ablation(&instance.queries, &args.filter)?;
    let targets = queries.counts().expect("counts attached").to_vec();
    let model = build_generation_model(&queries, &targets, instance.n_rows, args.solve.seed)?;
    let pool = solve_pool(&model, args.solve.pool_size, args.solve.gen_timeout())?;
    if pool.datasets.is_empty() {
        write_or_print(&args.out, "")?;
        if pool.status == reclaim_core::solver::PoolStatus::TimedOut {
            return Ok(EXIT_PARTIAL);
        }
        eprintln!("published counts are inconsistent: no dataset matches them");
        return Ok(EXIT_INFEASIBLE);
    }
    let k = instance.schema.num_columns();
    let max_cols = args.filter.max_cols.unwrap_or(k).min(k);
    let sets = pool
        .datasets
        .iter()
        .map(|d| enumerate_claims(d, 1, max_cols))
        .collect::<reclaim_core::Result<Vec<_>>>()?;
    let candidates = filter_claims(&intersect_claims(&sets)?, &args.filter.claim_filter());
    let claims: Vec<Claim> = candidates.iter().collect();
    write_or_print(
        &args.out,
        &io::claims_to_jsonl(&claims, "candidate", &instance.schema),
    )?;
    eprintln!(
        "{} candidate claims from a pool of {}",
        claims.len(),
        pool.datasets.len()
    );
    if pool.status == reclaim_core::solver::PoolStatus::TimedOut {
        return Ok(EXIT_PARTIAL);
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<u8> {
    let instance = args.instance.load()?;
    let targets = instance.queries.counts().expect("counts attached").to_vec();
    let model = build_generation_model(
        &instance.queries,
        &targets,
        instance.n_rows,
        args.solve.seed,
    )?;
    let text = io::read_to_string(&args.claims)?;
    let (mut claims, mut warnings) = io::claims_from_jsonl(&text, &instance.schema);
    // multiplicities beyond N are malformed, not refutable
    let mut kept = Vec::new();
    for (i, claim) in claims.drain(..).enumerate() {
        if claim.multiplicity > instance.n_rows {
            warnings.push((
                i + 1,
                format!(
                    "multiplicity {} out of range for N = {}",
                    claim.multiplicity, instance.n_rows
                ),
            ));
        } else {
            kept.push(claim);
        }
    }
    for (line, message) in &warnings {
        eprintln!("warning: claims line {}: {}", line, message);
    }

    let mut partial = !warnings.is_empty();
    let output = match args.mode {
        VerifyMode::Exact => {
            let outcomes =
                verify_candidates(&model, &kept, args.solve.claim_timeout(), args.solve.jobs)?;
            partial |= outcomes
                .iter()
                .any(|o| o.status == VerificationStatus::Timeout);
            io::outcomes_to_jsonl(&outcomes, &instance.schema)
        }
        VerifyMode::Impossible => {
            let mut out = String::new();
            for claim in &kept {
                let result = prove_impossible(&model, claim, args.solve.claim_timeout())?;
                let status = match result {
                    Possibility::Impossible => "impossible",
                    Possibility::Possible(_) => "possible",
                    Possibility::Unknown => {
                        partial = true;
                        "unknown"
                    }
                };
                let attributes: std::collections::BTreeMap<String, Option<String>> = claim
                    .attributes
                    .to_pairs(&instance.schema)
                    .into_iter()
                    .collect();
                let line = serde_json::json!({
                    "attributes": attributes,
                    "m": claim.multiplicity,
                    "status": status,
                });
                out.push_str(&serde_json::to_string(&line)?);
                out.push('\n');
            }
            out
        }
    };
    write_or_print(&args.out, &output)?;
    Ok(if partial { EXIT_PARTIAL } else { 0 })
}

fn cmd_baseline(args: &BaselineArgs) -> anyhow::Result<u8> {
    let schema = io::load_schema(&args.schema)?;
    let priors = parse_priors(&args.prior, &schema)?;
    let text = io::read_to_string(&args.outcomes)?;
    let (outcomes, warnings) = io::outcomes_from_jsonl(&text, &schema);
    for (line, message) in &warnings {
        eprintln!("warning: outcomes line {}: {}", line, message);
    }
    let report = baseline_report(&outcomes, &priors, args.n_rows, &schema)?;
    std::fs::create_dir_all(&args.out)?;
    std::fs::write(
        args.out.join("baseline.csv"),
        io::baseline_to_csv(&report, &schema),
    )?;
    std::fs::write(
        args.out.join("baseline_summary.json"),
        io::baseline_summary_json(&report),
    )?;
    Ok(if warnings.is_empty() { 0 } else { EXIT_PARTIAL })
}

fn cmd_export_model(args: &ExportModelArgs) -> anyhow::Result<u8> {
    let instance = args.instance.load()?;
    let targets = instance.queries.counts().expect("counts attached").to_vec();
    let model = build_generation_model(&instance.queries, &targets, instance.n_rows, args.seed)?;
    let claim = match (&args.claim, args.m) {
        (Some(key), Some(m)) => Some(io::claim_from_key(key, m, &instance.schema)?),
        _ => None,
    };
    let mode = if args.equality {
        ClaimMode::Equal
    } else {
        ClaimMode::NotEqual
    };
    let text = export_milp(&model, claim.as_ref().map(|c| (c, mode)));
    write_or_print(&args.out, &text)?;
    Ok(0)
}

fn cmd_oracle_check(args: &OracleCheckArgs) -> anyhow::Result<u8> {
    let instance = args.instance.load()?;
    let targets = instance.queries.counts().expect("counts attached").to_vec();
    let feasible = match enumerate_feasible(
        &instance.schema,
        instance.n_rows,
        &instance.queries,
        &targets,
    ) {
        Ok(feasible) => feasible,
        Err(reclaim_core::Error::InvalidArgument(message)) => {
            eprintln!("skipped: {}", message);
            return Ok(0);
        }
        Err(e) => return Err(e.into()),
    };
    let k = instance.schema.num_columns();
    let expected = oracle_verified_claims(&feasible, &instance.schema, 1, k)?;

    let settings = AttackSettings {
        pool_size: feasible.len().max(1) + 1,
        claim_timeout: None,
        gen_timeout: None,
        seed: args.seed,
        ..AttackSettings::default()
    };
    let report = run_attack(&instance.queries, instance.n_rows, &settings, None)?;

    let mut failures = 0usize;
    let canonical = |d: &Dataset| -> Vec<Vec<u8>> {
        d.canonical_rows()
            .iter()
            .map(|r| r.bits().to_vec())
            .collect()
    };
    let oracle_sets: BTreeSet<Vec<Vec<u8>>> = feasible.iter().map(canonical).collect();
    let pool_sets: BTreeSet<Vec<Vec<u8>>> = report.pool.datasets.iter().map(canonical).collect();
    if oracle_sets != pool_sets {
        failures += 1;
        eprintln!(
            "FAIL feasible sets differ: oracle {} vs pipeline {}",
            oracle_sets.len(),
            pool_sets.len()
        );
    }
    if report.timeouts > 0 {
        failures += 1;
        eprintln!("FAIL pipeline timed out on {} claims", report.timeouts);
    }

    let verified: BTreeSet<(String, usize)> = report
        .outcomes
        .iter()
        .filter(|o| o.status == VerificationStatus::Verified)
        .map(|o| {
            (
                io::claim_key(&o.claim.attributes, &instance.schema),
                o.claim.multiplicity,
            )
        })
        .collect();
    let expected_set: BTreeSet<(String, usize)> = expected
        .iter()
        .map(|c| {
            (
                io::claim_key(&c.attributes, &instance.schema),
                c.multiplicity,
            )
        })
        .collect();
    for (key, m) in expected_set.difference(&verified) {
        failures += 1;
        eprintln!(
            "FAIL oracle-verified claim missed by pipeline: ({}, {})",
            key, m
        );
    }
    for (key, m) in verified.difference(&expected_set) {
        failures += 1;
        eprintln!(
            "FAIL pipeline verified a claim the oracle rejects: ({}, {})",
            key, m
        );
    }
    // pipeline Verified claims must hold in every feasible dataset
    for outcome in &report.outcomes {
        if outcome.status != VerificationStatus::Verified {
            continue;
        }
        for dataset in &feasible {
            if count_matches(&outcome.claim.attributes, dataset)? != outcome.claim.multiplicity {
                failures += 1;
                eprintln!(
                    "FAIL verified claim ({}, {}) fails in a feasible dataset",
                    io::claim_key(&outcome.claim.attributes, &instance.schema),
                    outcome.claim.multiplicity
                );
            }
        }
    }

    if failures == 0 {
        println!(
            "PASS {} feasible datasets, {} verified claims agree",
            feasible.len(),
            expected_set.len()
        );
        Ok(0)
    } else {
        println!("FAIL {} divergences", failures);
        Err(anyhow!("oracle check failed"))
    }
}

fn cmd_fixtures(args: &FixturesArgs) -> anyhow::Result<u8> {
    for fixture in reclaim_core::fixtures::all_fixtures() {
        let dir = args.out.join(&fixture.name);
        fixture.write_to(&dir)?;
        eprintln!("wrote {}", dir.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are success, everything else is a usage error
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Tabulate(args) => cmd_tabulate(args),
        Command::Attack(args) => cmd_attack(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Candidates(args) => cmd_candidates(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::ExportModel(args) => cmd_export_model(args),
        Command::OracleCheck(args) => cmd_oracle_check(args),
        Command::Fixtures(args) => cmd_fixtures(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(EXIT_USAGE)
        }
    }
}
