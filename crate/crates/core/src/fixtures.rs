//! Shipped example instances: the two-column toy, a P20-style block of 10
//! households, and three miniature SF1-style releases over the full 10-column
//! census household schema. All are generated deterministically so the files
//! under `fixtures/` can be reproduced bit-for-bit.

use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{Column, Dataset, OneHotRow, Schema};
use crate::error::Result;
use crate::io;
use crate::query::{compile_queries, tabulate, PredicateDef, QueryDef, QuerySet};

/// One self-contained instance: schema, release queries, and the ground-truth
/// block whose tabulation is the published statistic.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub schema: Arc<Schema>,
    pub query_defs: Vec<QueryDef>,
    pub dataset: Dataset,
}

impl Fixture {
    pub fn query_set(&self) -> Result<QuerySet> {
        compile_queries(&self.query_defs, &self.schema)
    }

    pub fn counts(&self) -> Result<Vec<usize>> {
        tabulate(&self.query_set()?, &self.dataset)
    }

    /// Writes `schema.json`, `queries.json`, `dataset.csv`, and `stats.json`
    /// into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let qs = self.query_set()?;
        let counts = self.counts()?;
        let stats = io::PublishedStats::from_tabulation(&qs, &counts, self.dataset.len());
        std::fs::write(dir.join("schema.json"), io::schema_to_json(&self.schema))?;
        std::fs::write(
            dir.join("queries.json"),
            io::queries_to_json(&self.query_defs),
        )?;
        std::fs::write(dir.join("dataset.csv"), io::dataset_to_csv(&self.dataset))?;
        std::fs::write(dir.join("stats.json"), io::stats_to_json(&stats))?;
        Ok(())
    }
}

/// The 10 household columns of the block-level census release.
pub fn census_schema() -> Arc<Schema> {
    let col = |name: &str, values: &[&str]| Column {
        name: name.into(),
        values: values.iter().map(|v| v.to_string()).collect(),
    };
    let numbered = |n: usize| (1..=n).map(|i| i.to_string()).collect::<Vec<_>>();
    let col_n = |name: &str, n: usize| Column {
        name: name.into(),
        values: numbered(n),
    };
    Arc::new(
        Schema::new(vec![
            col(
                "TEN",
                &["owned_mortgage", "owned_clear", "rented", "no_rent"],
            ),
            col(
                "VACS",
                &[
                    "occupied",
                    "for_rent",
                    "rented_unoccupied",
                    "for_sale",
                    "sold_unoccupied",
                    "seasonal",
                    "migrant",
                    "other",
                ],
            ),
            col("HHSIZE", &["1", "2", "3", "4", "5", "6", "7plus"]),
            col_n("HHT", 7),
            col_n("HHT2", 12),
            col("THHSPAN", &["not_hispanic", "hispanic"]),
            col_n("THHLDRAGE", 7),
            col_n("THHRACE", 7),
            col("TP18", &["no", "yes"]),
            col("TP65", &["no", "yes"]),
        ])
        .expect("census schema is valid"),
    )
}

pub fn toy_fixture() -> Fixture {
    let schema = Arc::new(crate::test_support::toy_schema());
    Fixture {
        name: "toy".into(),
        schema: schema.clone(),
        query_defs: crate::test_support::toy_query_defs(),
        dataset: crate::test_support::toy_dataset(&schema),
    }
}

/// The P20 release shape: one query per detailed household type, plus the two
/// nested elderly-householder rows for the living-alone types. The nested
/// rows bin the top three householder-age buckets, mirroring the release's
/// binned 65-and-over condition.
fn p20_queries() -> Vec<QueryDef> {
    let hht2 = |id: usize, value: usize| QueryDef {
        id: format!("P20.{}", id),
        predicates: vec![PredicateDef {
            column: "HHT2".into(),
            values: vec![value.to_string()],
        }],
    };
    let elderly = |id: usize, hht2_value: usize| QueryDef {
        id: format!("P20.{}", id),
        predicates: vec![
            PredicateDef {
                column: "HHT2".into(),
                values: vec![hht2_value.to_string()],
            },
            PredicateDef {
                column: "THHLDRAGE".into(),
                values: vec!["5".into(), "6".into(), "7".into()],
            },
        ],
    };
    vec![
        hht2(1, 1),
        hht2(2, 2),
        hht2(3, 3),
        hht2(4, 4),
        hht2(5, 5),
        elderly(6, 5),
        hht2(7, 6),
        hht2(8, 7),
        hht2(9, 8),
        hht2(10, 9),
        elderly(11, 9),
        hht2(12, 10),
        hht2(13, 11),
        hht2(14, 12),
    ]
}

/// A 10-household block whose P20 tabulation is the documented count column
/// (6,1,0,0,0,0,1,0,0,1,0,0,1,0).
pub fn p20_fixture() -> Fixture {
    let schema = census_schema();
    // value indices per column:
    // TEN, VACS, HHSIZE, HHT, HHT2, THHSPAN, THHLDRAGE, THHRACE, TP18, TP65
    let rows: &[[usize; 10]] = &[
        // six married couples with own children under 18 (HHT2 = 1)
        [0, 0, 2, 0, 0, 0, 1, 0, 1, 0],
        [0, 0, 3, 0, 0, 0, 2, 0, 1, 0],
        [2, 0, 3, 0, 0, 1, 1, 1, 1, 0],
        [2, 0, 4, 0, 0, 0, 2, 0, 1, 0],
        [1, 0, 2, 0, 0, 0, 3, 2, 1, 0],
        [0, 0, 4, 0, 0, 0, 1, 0, 1, 1],
        // one married couple without own children (HHT2 = 2)
        [1, 0, 1, 0, 1, 0, 4, 0, 0, 1],
        // one cohabiting couple, no spouse/partner typing (HHT2 = 6)
        [2, 0, 1, 2, 5, 0, 1, 1, 0, 0],
        // one householder living alone, under 65 (HHT2 = 9, young age bucket)
        [2, 0, 0, 5, 8, 0, 2, 0, 0, 0],
        // one householder with relatives, no own children (HHT2 = 11)
        [1, 0, 2, 1, 10, 0, 3, 0, 0, 1],
    ];
    let dataset = Dataset::new(
        schema.clone(),
        rows.iter()
            .map(|r| OneHotRow::from_value_indices(r, &schema))
            .collect(),
    );
    Fixture {
        name: "p20".into(),
        schema,
        query_defs: p20_queries(),
        dataset,
    }
}

/// All value combinations of a full k-way marginal over the named columns.
fn marginal_queries(schema: &Schema, columns: &[&str]) -> Vec<QueryDef> {
    let indices: Vec<usize> = columns
        .iter()
        .map(|c| schema.column_index(c).expect("fixture column"))
        .collect();
    let mut out = Vec::new();
    let mut combo = vec![0usize; columns.len()];
    loop {
        let predicates = indices
            .iter()
            .zip(&combo)
            .map(|(&j, &v)| PredicateDef {
                column: schema.column(j).name.clone(),
                values: vec![schema.column(j).values[v].clone()],
            })
            .collect::<Vec<_>>();
        let id = predicates
            .iter()
            .map(|p| format!("{}={}", p.column, p.values[0]))
            .collect::<Vec<_>>()
            .join("&");
        out.push(QueryDef { id, predicates });
        let mut pos = combo.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            combo[pos] += 1;
            if combo[pos] < schema.cardinality(indices[pos]) {
                break;
            }
            combo[pos] = 0;
        }
    }
}

/// The miniature release: full marginals over a fixed family of column
/// tuples, mixed arities 1 through 4, 636 queries total — the scale of one
/// block's SF1 tables.
fn sf1_queries(schema: &Schema) -> Vec<QueryDef> {
    let tuples: &[&[&str]] = &[
        &["TEN"],
        &["VACS"],
        &["HHSIZE"],
        &["HHT"],
        &["HHT2"],
        &["THHSPAN"],
        &["THHLDRAGE"],
        &["THHRACE"],
        &["TP18"],
        &["TP65"],
        &["TEN", "TP18"],
        &["TEN", "TP65"],
        &["THHSPAN", "TP18"],
        &["HHT", "TP65"],
        &["HHSIZE", "THHSPAN"],
        &["THHRACE", "THHSPAN"],
        &["TEN", "HHT"],
        &["HHSIZE", "TP18"],
        &["THHLDRAGE", "TP65"],
        &["VACS", "THHSPAN"],
        &["TEN", "THHSPAN", "TP18"],
        &["TEN", "TP18", "TP65"],
        &["HHT", "THHSPAN", "TP18"],
        &["HHSIZE", "TP18", "TP65"],
        &["THHLDRAGE", "THHSPAN", "TP65"],
        &["THHRACE", "TP18", "TP65"],
        &["TEN", "THHSPAN", "TP65"],
        &["HHT", "TP18", "TP65"],
        &["TEN", "THHSPAN", "TP18", "TP65"],
        &["HHT", "THHSPAN", "TP18", "TP65"],
        &["HHSIZE", "THHSPAN", "TP18", "TP65"],
        &["THHLDRAGE", "THHSPAN", "TP18", "TP65"],
        &["THHRACE", "THHSPAN", "TP18", "TP65"],
    ];
    tuples
        .iter()
        .flat_map(|t| marginal_queries(schema, t))
        .collect()
}

/// A seeded 10-household ground-truth block. Each column draws from a small
/// low-index value pool so rows share marginals and the instance stays
/// underdetermined rather than trivially unique.
fn sf1_dataset(schema: &Arc<Schema>, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let supports: Vec<usize> = (0..schema.num_columns())
        .map(|j| schema.cardinality(j).min(3))
        .collect();
    // three household patterns with multiplicities 5/3/2: repeated rows keep
    // the released marginals overlapping enough that verification searches
    // terminate at desk scale, and every nonzero published count is ≥ 2 (a
    // subset sum of {5, 3, 2}), so the 1-way families that drive implied-zero
    // pruning survive the count-dropping ablations
    let patterns: Vec<Vec<usize>> = (0..3)
        .map(|_| supports.iter().map(|&s| rng.random_range(0..s)).collect())
        .collect();
    let rows = [0, 0, 0, 0, 0, 1, 1, 1, 2, 2]
        .iter()
        .map(|&p| OneHotRow::from_value_indices(&patterns[p], schema))
        .collect();
    Dataset::new(schema.clone(), rows)
}

const SF1_SEEDS: [u64; 3] = [1001, 1002, 1004];

pub fn sf1_fixtures() -> Vec<Fixture> {
    let schema = census_schema();
    let query_defs = sf1_queries(&schema);
    (1..=3u64)
        .map(|i| Fixture {
            name: format!("sf1-mini-{}", i),
            schema: schema.clone(),
            query_defs: query_defs.clone(),
            dataset: sf1_dataset(&schema, SF1_SEEDS[i as usize - 1]),
        })
        .collect()
}

pub fn all_fixtures() -> Vec<Fixture> {
    let mut out = vec![toy_fixture(), p20_fixture()];
    out.extend(sf1_fixtures());
    out
}
