//! Binomial baselines for verified claims.
//!
//! A verified claim `(a, m)` is only interesting if it was unlikely a priori.
//! If block records were drawn i.i.d. from a prior giving a row probability
//! `p` of matching `a`, the match count follows Binomial(N, p); the pmf at `m`
//! is the probability the claim would have held by chance.

use statrs::function::gamma::ln_gamma;

use crate::claims::Claim;
use crate::domain::{count_matches, Dataset, Schema};
use crate::error::{Error, Result};
use crate::verifier::{VerificationOutcome, VerificationStatus};

/// Row-match prior for the baseline.
#[derive(Debug, Clone)]
pub enum Prior {
    /// Independent uniform choice per assigned column: p is the product of
    /// reciprocal cardinalities over the assigned columns only.
    Uniform,
    /// Match frequency in a reference dataset (e.g. the surrounding tract or
    /// state): p = matches / |reference|.
    Empirical { name: String, reference: Dataset },
}

impl Prior {
    pub fn name(&self) -> &str {
        match self {
            Prior::Uniform => "uniform",
            Prior::Empirical { name, .. } => name,
        }
    }
}

/// Exact binomial pmf `C(n,m) p^m (1-p)^(n-m)`, computed in log space so large
/// `n` cannot overflow. Degenerate p handled exactly.
pub fn binomial_pmf(n: usize, m: usize, p: f64) -> f64 {
    assert!(m <= n, "m = {} exceeds n = {}", m, n);
    assert!((0.0..=1.0).contains(&p), "p = {} outside [0, 1]", p);
    if p == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if m == n { 1.0 } else { 0.0 };
    }
    let (n_f, m_f) = (n as f64, m as f64);
    let ln_choose = ln_gamma(n_f + 1.0) - ln_gamma(m_f + 1.0) - ln_gamma(n_f - m_f + 1.0);
    (ln_choose + m_f * p.ln() + (n_f - m_f) * (1.0 - p).ln()).exp()
}

/// The prior's probability that a single random row matches the assignment.
pub fn match_probability(prior: &Prior, claim: &Claim, schema: &Schema) -> Result<f64> {
    match prior {
        Prior::Uniform => {
            let mut p = 1.0;
            for (col, slot) in claim.attributes.slots().iter().enumerate() {
                if slot.is_some() {
                    p /= schema.cardinality(col) as f64;
                }
            }
            Ok(p)
        }
        Prior::Empirical { name, reference } => {
            if reference.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "empirical prior '{}' has an empty reference dataset",
                    name
                )));
            }
            let matches = count_matches(&claim.attributes, reference)?;
            Ok(matches as f64 / reference.len() as f64)
        }
    }
}

/// Probability that the claim would hold exactly in a random N-row block
/// drawn from the prior.
pub fn claim_probability(prior: &Prior, claim: &Claim, n: usize, schema: &Schema) -> Result<f64> {
    if claim.multiplicity > n {
        return Err(Error::MultiplicityOutOfRange {
            m: claim.multiplicity,
            n,
        });
    }
    let p = match_probability(prior, claim, schema)?;
    Ok(binomial_pmf(n, claim.multiplicity, p))
}

/// One report row: a verified claim with its chance probability under each
/// prior, in the priors' input order.
#[derive(Debug, Clone)]
pub struct BaselineRow {
    pub claim: Claim,
    pub k_cols: usize,
    pub probabilities: Vec<f64>,
}

/// Box-plot summary of one prior's probabilities at one claim width.
#[derive(Debug, Clone)]
pub struct BoxSummary {
    pub prior: String,
    pub k_cols: usize,
    pub count: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    /// Furthest data points within 1.5 * IQR of the quartiles.
    pub whisker_lo: f64,
    pub whisker_hi: f64,
}

#[derive(Debug, Clone)]
pub struct BaselineReport {
    pub prior_names: Vec<String>,
    pub rows: Vec<BaselineRow>,
    pub summaries: Vec<BoxSummary>,
    /// True when non-verified outcomes were passed in and skipped.
    pub skipped_unverified: usize,
    /// The uniform prior multiplies reciprocals over assigned columns only.
    pub uniform_over_assigned_columns: bool,
}

/// Linear-interpolation quantile of a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Computes chance probabilities for every verified outcome under every prior
/// and per-k box-plot summaries per prior. Unverified outcomes are skipped
/// and counted.
pub fn baseline_report(
    outcomes: &[VerificationOutcome],
    priors: &[Prior],
    n: usize,
    schema: &Schema,
) -> Result<BaselineReport> {
    let mut rows = Vec::new();
    let mut skipped = 0usize;
    for out in outcomes {
        if out.status != VerificationStatus::Verified {
            skipped += 1;
            continue;
        }
        let probabilities = priors
            .iter()
            .map(|p| claim_probability(p, &out.claim, n, schema))
            .collect::<Result<Vec<_>>>()?;
        rows.push(BaselineRow {
            claim: out.claim.clone(),
            k_cols: out.claim.num_cols(),
            probabilities,
        });
    }

    let mut summaries = Vec::new();
    let ks: std::collections::BTreeSet<usize> = rows.iter().map(|r| r.k_cols).collect();
    for (pi, prior) in priors.iter().enumerate() {
        for &k in &ks {
            let mut values: Vec<f64> = rows
                .iter()
                .filter(|r| r.k_cols == k)
                .map(|r| r.probabilities[pi])
                .collect();
            values.sort_by(|a, b| a.total_cmp(b));
            let q1 = quantile(&values, 0.25);
            let q3 = quantile(&values, 0.75);
            let iqr = q3 - q1;
            let lo_fence = q1 - 1.5 * iqr;
            let hi_fence = q3 + 1.5 * iqr;
            summaries.push(BoxSummary {
                prior: prior.name().to_string(),
                k_cols: k,
                count: values.len(),
                median: quantile(&values, 0.5),
                q1,
                q3,
                whisker_lo: values.iter().copied().find(|&v| v >= lo_fence).unwrap(),
                whisker_hi: values
                    .iter()
                    .copied()
                    .rev()
                    .find(|&v| v <= hi_fence)
                    .unwrap(),
            });
        }
    }

    Ok(BaselineReport {
        prior_names: priors.iter().map(|p| p.name().to_string()).collect(),
        rows,
        summaries,
        skipped_unverified: skipped,
        uniform_over_assigned_columns: true,
    })
}
