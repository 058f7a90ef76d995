//! Python bindings: schemas, datasets, query sets, pool generation, claim
//! verification, the end-to-end attack, and the binomial guessing baseline.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use reclaim_core::claims::Claim;
use reclaim_core::domain::{count_matches, Dataset, PartialAssignment, Schema};
use reclaim_core::io;
use reclaim_core::model::build_generation_model;
use reclaim_core::pipeline::{run_attack, summary_json, AttackSettings};
use reclaim_core::query::{compile_queries, tabulate, QueryDef, QuerySet};
use reclaim_core::solver::{solve_pool, PoolStatus};
use reclaim_core::verifier::verify_candidates;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Column layout of the private table: named columns over finite value sets.
#[pyclass(name = "Schema", frozen)]
struct PySchema {
    inner: Arc<Schema>,
}

#[pymethods]
impl PySchema {
    /// Parses `{"columns":[{"name":...,"values":[...]}]}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PySchema {
            inner: Arc::new(io::schema_from_json(text).map_err(err)?),
        })
    }

    fn to_json(&self) -> String {
        io::schema_to_json(&self.inner)
    }

    /// `[(name, [values...]), ...]` in schema order.
    fn columns(&self) -> Vec<(String, Vec<String>)> {
        self.inner
            .columns()
            .iter()
            .map(|c| (c.name.clone(), c.values.clone()))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.num_columns()
    }

    fn __repr__(&self) -> String {
        format!(
            "Schema({} columns, width {})",
            self.inner.num_columns(),
            self.inner.width()
        )
    }
}

/// A concrete table: an ordered multiset of fully assigned rows.
#[pyclass(name = "Dataset")]
struct PyDataset {
    inner: Dataset,
}

#[pymethods]
impl PyDataset {
    /// Parses header-first CSV with one column per schema column.
    #[staticmethod]
    fn from_csv(text: &str, schema: &PySchema) -> PyResult<Self> {
        Ok(PyDataset {
            inner: io::dataset_from_csv(text, &schema.inner).map_err(err)?,
        })
    }

    fn to_csv(&self) -> String {
        io::dataset_to_csv(&self.inner)
    }

    /// Row values as strings, in schema column order.
    fn rows(&self) -> Vec<Vec<String>> {
        let schema = self.inner.schema();
        self.inner
            .rows()
            .iter()
            .map(|r| {
                (0..schema.num_columns())
                    .map(|j| schema.column(j).values[r.value_index(j, schema)].clone())
                    .collect()
            })
            .collect()
    }

    /// Number of rows matching a partial assignment `{column: value}`.
    fn count_matches(&self, attributes: HashMap<String, String>) -> PyResult<usize> {
        let a = assignment(&attributes, self.inner.schema())?;
        count_matches(&a, &self.inner).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Dataset({} rows)", self.inner.len())
    }
}

/// The released counting queries: marginal predicates over value sets.
#[pyclass(name = "QuerySet")]
struct PyQuerySet {
    defs: Vec<QueryDef>,
    compiled: QuerySet,
}

#[pymethods]
impl PyQuerySet {
    /// Parses `{"queries":[{"id":...,"predicates":[{"column":...,"values":[...]}]}]}`.
    #[staticmethod]
    fn from_json(text: &str, schema: &PySchema) -> PyResult<Self> {
        let defs = io::queries_from_json(text).map_err(err)?;
        let compiled = compile_queries(&defs, &schema.inner).map_err(err)?;
        Ok(PyQuerySet { defs, compiled })
    }

    fn to_json(&self) -> String {
        io::queries_to_json(&self.defs)
    }

    fn ids(&self) -> Vec<String> {
        self.compiled
            .queries()
            .iter()
            .map(|q| q.id.clone())
            .collect()
    }

    /// Published answers: per-query match counts on a dataset.
    fn tabulate(&self, dataset: &PyDataset) -> PyResult<Vec<usize>> {
        tabulate(&self.compiled, &dataset.inner).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.compiled.len()
    }

    fn __repr__(&self) -> String {
        format!("QuerySet({} queries)", self.compiled.len())
    }
}

fn assignment(
    attributes: &HashMap<String, String>,
    schema: &Schema,
) -> PyResult<PartialAssignment> {
    let pairs: Vec<(&str, &str)> = attributes
        .iter()
        .map(|(c, v)| (c.as_str(), v.as_str()))
        .collect();
    PartialAssignment::from_pairs(pairs, schema).map_err(err)
}

fn attributes_dict<'py>(
    py: Python<'py>,
    a: &PartialAssignment,
    schema: &Schema,
) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    for (column, value) in a.to_pairs(schema) {
        if let Some(value) = value {
            dict.set_item(column, value)?;
        }
    }
    Ok(dict)
}

fn status_str(pool: PoolStatus) -> &'static str {
    match pool {
        PoolStatus::Exhausted => "exhausted",
        PoolStatus::PoolFull => "pool-full",
        PoolStatus::TimedOut => "timed-out",
    }
}

/// Up to `pool_size` distinct datasets consistent with the published counts.
/// Returns `(status, [Dataset, ...])`; an empty exhausted pool proves the
/// counts inconsistent.
#[pyfunction]
#[pyo3(signature = (queries, counts, n_rows, pool_size = 100, seed = 0, timeout_secs = None))]
fn generate_pool(
    queries: &PyQuerySet,
    counts: Vec<usize>,
    n_rows: usize,
    pool_size: usize,
    seed: u64,
    timeout_secs: Option<u64>,
) -> PyResult<(String, Vec<PyDataset>)> {
    let model = build_generation_model(&queries.compiled, &counts, n_rows, seed).map_err(err)?;
    let pool = solve_pool(&model, pool_size, timeout_secs.map(Duration::from_secs)).map_err(err)?;
    let datasets = pool
        .datasets
        .into_iter()
        .map(|inner| PyDataset { inner })
        .collect();
    Ok((status_str(pool.status).to_string(), datasets))
}

/// Verifies claims `({column: value}, m)` against the published counts.
/// Each outcome dict has `attributes`, `m`, `status` (verified / refuted /
/// timeout), `elapsed_ms`, and `counterexample` rows when refuted.
#[pyfunction]
#[pyo3(signature = (queries, counts, n_rows, claims, seed = 0, timeout_secs = Some(180), jobs = None))]
fn verify_claims<'py>(
    py: Python<'py>,
    queries: &PyQuerySet,
    counts: Vec<usize>,
    n_rows: usize,
    claims: Vec<(HashMap<String, String>, usize)>,
    seed: u64,
    timeout_secs: Option<u64>,
    jobs: Option<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let model = build_generation_model(&queries.compiled, &counts, n_rows, seed).map_err(err)?;
    let schema = model.schema().clone();
    let claims: Vec<Claim> = claims
        .iter()
        .map(|(attributes, m)| Ok(Claim::new(assignment(attributes, &schema)?, *m)))
        .collect::<PyResult<_>>()?;
    let outcomes = verify_candidates(&model, &claims, timeout_secs.map(Duration::from_secs), jobs)
        .map_err(err)?;
    outcomes
        .into_iter()
        .map(|o| {
            let dict = PyDict::new(py);
            dict.set_item(
                "attributes",
                attributes_dict(py, &o.claim.attributes, &schema)?,
            )?;
            dict.set_item("m", o.claim.multiplicity)?;
            dict.set_item("status", io::status_label(o.status))?;
            dict.set_item("elapsed_ms", o.wall_time.as_millis() as u64)?;
            if let Some(witness) = o.counterexample {
                dict.set_item("counterexample", PyDataset { inner: witness }.rows())?;
            }
            Ok(dict)
        })
        .collect()
}

/// All claims `(attributes, m)` true of a dataset, over 1 to `max_cols`
/// assigned columns.
#[pyfunction]
#[pyo3(signature = (dataset, min_cols = 1, max_cols = None))]
fn enumerate_claims<'py>(
    py: Python<'py>,
    dataset: &PyDataset,
    min_cols: usize,
    max_cols: Option<usize>,
) -> PyResult<Vec<(Bound<'py, PyDict>, usize)>> {
    let schema = dataset.inner.schema().clone();
    let max_cols = max_cols.unwrap_or(schema.num_columns());
    let set =
        reclaim_core::claims::enumerate_claims(&dataset.inner, min_cols, max_cols).map_err(err)?;
    set.iter()
        .map(|c| Ok((attributes_dict(py, &c.attributes, &schema)?, c.multiplicity)))
        .collect()
}

/// Full pipeline: generate a pool, intersect claim sets, verify candidates.
/// Returns the run summary as a dict; `outcomes` holds one dict per candidate.
#[pyfunction]
#[pyo3(signature = (queries, counts, n_rows, pool_size = 100, seed = 0, timeout_secs = Some(180), jobs = None, max_cols = None))]
#[allow(clippy::too_many_arguments)]
fn attack<'py>(
    py: Python<'py>,
    queries: &PyQuerySet,
    counts: Vec<usize>,
    n_rows: usize,
    pool_size: usize,
    seed: u64,
    timeout_secs: Option<u64>,
    jobs: Option<usize>,
    max_cols: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let qs = queries
        .compiled
        .clone()
        .with_counts(counts, n_rows)
        .map_err(err)?;
    let settings = AttackSettings {
        pool_size,
        claim_timeout: timeout_secs.map(Duration::from_secs),
        seed,
        jobs,
        max_cols,
        ..AttackSettings::default()
    };
    let report = run_attack(&qs, n_rows, &settings, None).map_err(err)?;
    let schema = qs.schema().clone();

    let summary: serde_json::Value =
        serde_json::from_str(&summary_json(&report, n_rows)).map_err(err)?;
    let dict = PyDict::new(py);
    if let serde_json::Value::Object(map) = summary {
        for (key, value) in map {
            dict.set_item(key, json_to_py(py, &value)?)?;
        }
    }
    let outcomes: Vec<Bound<'py, PyDict>> = report
        .outcomes
        .iter()
        .map(|o| {
            let line = PyDict::new(py);
            line.set_item(
                "attributes",
                attributes_dict(py, &o.claim.attributes, &schema)?,
            )?;
            line.set_item("m", o.claim.multiplicity)?;
            line.set_item("status", io::status_label(o.status))?;
            Ok(line)
        })
        .collect::<PyResult<_>>()?;
    dict.set_item("outcomes", outcomes)?;
    Ok(dict)
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    Ok(match value {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().unbind().into(),
        serde_json::Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.unbind().into()
            } else if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.unbind().into()
            } else {
                n.as_f64()
                    .unwrap_or(f64::NAN)
                    .into_pyobject(py)?
                    .unbind()
                    .into()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.unbind().into(),
        serde_json::Value::Array(items) => {
            let list: Vec<Py<PyAny>> = items
                .iter()
                .map(|v| json_to_py(py, v))
                .collect::<PyResult<_>>()?;
            list.into_pyobject(py)?.unbind().into()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.unbind().into()
        }
    })
}

/// Probability that a binomial(n, p) count equals m, computed in log space.
#[pyfunction]
fn binomial_pmf(n: usize, m: usize, p: f64) -> f64 {
    reclaim_core::baseline::binomial_pmf(n, m, p)
}

#[pymodule]
fn reclaim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySchema>()?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyQuerySet>()?;
    m.add_function(wrap_pyfunction!(generate_pool, m)?)?;
    m.add_function(wrap_pyfunction!(verify_claims, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_claims, m)?)?;
    m.add_function(wrap_pyfunction!(attack, m)?)?;
    m.add_function(wrap_pyfunction!(binomial_pmf, m)?)?;
    Ok(())
}
