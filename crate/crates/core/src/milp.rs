//! Big-M MILP emission and constraint evaluation.
//!
//! The emitter writes the generation system (and optionally one claim's
//! verification system) as a portable LP-format text model with `M = N + 1`.
//! The same constraint generator backs [`check_assignment`], which evaluates
//! every emitted constraint against a concrete dataset with the helper
//! variables derived from `X` by their defining logic.
//!
//! Variable naming, bit-exact in emitted files:
//!   `X_{row}_{bit}`   one-hot dataset entries
//!   `W_{query}_{row}` query satisfaction indicators
//!   `T_{row}_{bit}`   claim per-bit match indicators (bits in `A_oh` only)
//!   `U_{row}_{bit}`   claim mismatch direction helpers
//!   `P_{row}_{bit}`   linearization of the product `(1 - T) * U`
//!   `S_{row}`         claim full-row match indicators
//!   `Y`               multiplicity disequality selector

use std::fmt::Write as _;

use crate::claims::Claim;
use crate::domain::Dataset;
use crate::error::{Error, Result};
use crate::model::ConstraintModel;

/// Which side constraint the claim attaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimMode {
    /// Rows matching the claim must NOT number exactly `m` (verification).
    NotEqual,
    /// Rows matching the claim must number exactly `m` (impossibility probe).
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Var {
    X { row: usize, bit: usize },
    W { query: usize, row: usize },
    T { row: usize, bit: usize },
    U { row: usize, bit: usize },
    P { row: usize, bit: usize },
    S { row: usize },
    Y,
}

impl Var {
    fn name(&self) -> String {
        match *self {
            Var::X { row, bit } => format!("X_{}_{}", row, bit),
            Var::W { query, row } => format!("W_{}_{}", query, row),
            Var::T { row, bit } => format!("T_{}_{}", row, bit),
            Var::U { row, bit } => format!("U_{}_{}", row, bit),
            Var::P { row, bit } => format!("P_{}_{}", row, bit),
            Var::S { row } => format!("S_{}", row),
            Var::Y => "Y".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Constraint {
    name: String,
    terms: Vec<(i64, Var)>,
    sense: Sense,
    rhs: i64,
}

impl Constraint {
    fn holds(&self, value: impl Fn(Var) -> i64) -> bool {
        let lhs: i64 = self.terms.iter().map(|&(c, v)| c * value(v)).sum();
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Generation constraints: one-hot blocks, the W-linearization of query
/// satisfaction, exact count targets, and hash-order row symmetry breaking.
fn generation_constraints(model: &ConstraintModel) -> Vec<Constraint> {
    let schema = model.schema();
    let n_rows = model.n_rows();
    let mut out = Vec::new();

    for row in 0..n_rows {
        for col in 0..schema.num_columns() {
            let off = schema.offset(col);
            let terms = (0..schema.cardinality(col))
                .map(|v| (1, Var::X { row, bit: off + v }))
                .collect();
            out.push(Constraint {
                name: format!("onehot_r{}_c{}", row, col),
                terms,
                sense: Sense::Eq,
                rhs: 1,
            });
        }
    }

    for (qi, query) in model.queries().queries().iter().enumerate() {
        let r = query.arity() as i64;
        for row in 0..n_rows {
            // W <= Z for every real sub-predicate
            for (si, sp) in query.sub_predicates.iter().enumerate() {
                let mut terms = vec![(1, Var::W { query: qi, row })];
                for (bit, &q) in sp.mask.iter().enumerate() {
                    if q != 0 {
                        terms.push((-1, Var::X { row, bit }));
                    }
                }
                out.push(Constraint {
                    name: format!("sat_ub_q{}_r{}_s{}", qi, row, si),
                    terms,
                    sense: Sense::Le,
                    rhs: 0,
                });
            }
            // W >= sum Z - (r - 1)
            let mut terms = vec![(1, Var::W { query: qi, row })];
            for sp in &query.sub_predicates {
                for (bit, &q) in sp.mask.iter().enumerate() {
                    if q != 0 {
                        terms.push((-1, Var::X { row, bit }));
                    }
                }
            }
            out.push(Constraint {
                name: format!("sat_lb_q{}_r{}", qi, row),
                terms,
                sense: Sense::Ge,
                rhs: 1 - r,
            });
        }
        // sum_k W = target
        let terms = (0..n_rows)
            .map(|row| (1, Var::W { query: qi, row }))
            .collect();
        out.push(Constraint {
            name: format!("count_q{}_{}", qi, sanitize(&query.id)),
            terms,
            sense: Sense::Eq,
            rhs: model.targets()[qi] as i64,
        });
    }

    for row in 1..n_rows {
        let mut terms = Vec::new();
        for (bit, &h) in model.hash_vector().iter().enumerate() {
            terms.push((h as i64, Var::X { row, bit }));
            terms.push((-(h as i64), Var::X { row: row - 1, bit }));
        }
        out.push(Constraint {
            name: format!("hashorder_r{}", row),
            terms,
            sense: Sense::Ge,
            rhs: 0,
        });
    }

    out
}

/// Claim-side constraints: T/U/P bit matching, S row matching, and either the
/// Y-driven disequality or the exact-multiplicity equality.
fn claim_constraints(model: &ConstraintModel, claim: &Claim, mode: ClaimMode) -> Vec<Constraint> {
    let schema = model.schema();
    let n_rows = model.n_rows();
    let m_big = model.big_m() as i64;
    let bits = claim.attributes.onehot_indices(schema);
    let v = bits.len() as i64;
    let mut out = Vec::new();

    for row in 0..n_rows {
        for &bit in &bits {
            let x = Var::X { row, bit };
            let t = Var::T { row, bit };
            let u = Var::U { row, bit };
            let p = Var::P { row, bit };
            // the claim bit at each index in A_oh is 1, so the comparison
            // target in the four big-M constraints is the constant 1
            out.push(Constraint {
                name: format!("claim_t1_r{}_b{}", row, bit),
                terms: vec![(1, x), (m_big, t)],
                sense: Sense::Le,
                rhs: m_big + 1,
            });
            out.push(Constraint {
                name: format!("claim_t2_r{}_b{}", row, bit),
                terms: vec![(-1, x), (m_big, t)],
                sense: Sense::Le,
                rhs: m_big - 1,
            });
            out.push(Constraint {
                name: format!("claim_t3_r{}_b{}", row, bit),
                terms: vec![(1, x), (m_big, t), (m_big, p)],
                sense: Sense::Ge,
                rhs: 2,
            });
            out.push(Constraint {
                name: format!("claim_t4_r{}_b{}", row, bit),
                terms: vec![(1, x), (m_big, p)],
                sense: Sense::Le,
                rhs: m_big,
            });
            // P = (1 - T) * U
            out.push(Constraint {
                name: format!("claim_p1_r{}_b{}", row, bit),
                terms: vec![(1, p), (-1, u)],
                sense: Sense::Le,
                rhs: 0,
            });
            out.push(Constraint {
                name: format!("claim_p2_r{}_b{}", row, bit),
                terms: vec![(1, p), (1, t)],
                sense: Sense::Le,
                rhs: 1,
            });
            out.push(Constraint {
                name: format!("claim_p3_r{}_b{}", row, bit),
                terms: vec![(1, p), (-1, u), (1, t)],
                sense: Sense::Ge,
                rhs: 0,
            });
        }
        // S = AND of T over A_oh
        for &bit in &bits {
            out.push(Constraint {
                name: format!("claim_s_ub_r{}_b{}", row, bit),
                terms: vec![(1, Var::S { row }), (-1, Var::T { row, bit })],
                sense: Sense::Le,
                rhs: 0,
            });
        }
        let mut terms = vec![(1, Var::S { row })];
        for &bit in &bits {
            terms.push((-1, Var::T { row, bit }));
        }
        out.push(Constraint {
            name: format!("claim_s_lb_r{}", row),
            terms,
            sense: Sense::Ge,
            rhs: 1 - v,
        });
    }

    let m = claim.multiplicity as i64;
    let sum_s: Vec<(i64, Var)> = (0..n_rows).map(|row| (1, Var::S { row })).collect();
    match mode {
        ClaimMode::NotEqual => {
            let mut terms = sum_s.clone();
            terms.push((-m_big, Var::Y));
            out.push(Constraint {
                name: "claim_ne_ub".into(),
                terms,
                sense: Sense::Le,
                rhs: m - 1,
            });
            let mut terms = sum_s;
            terms.push((-m_big, Var::Y));
            out.push(Constraint {
                name: "claim_ne_lb".into(),
                terms,
                sense: Sense::Ge,
                rhs: m + 1 - m_big,
            });
        }
        ClaimMode::Equal => {
            out.push(Constraint {
                name: "claim_eq".into(),
                terms: sum_s,
                sense: Sense::Eq,
                rhs: m,
            });
        }
    }

    out
}

fn all_constraints(model: &ConstraintModel, claim: Option<(&Claim, ClaimMode)>) -> Vec<Constraint> {
    let mut cs = generation_constraints(model);
    if let Some((claim, mode)) = claim {
        cs.extend(claim_constraints(model, claim, mode));
    }
    cs
}

/// Emits the model as LP-format text with a constant objective. Deterministic
/// bytes for a fixed model, claim, and seed.
pub fn export_milp(model: &ConstraintModel, claim: Option<(&Claim, ClaimMode)>) -> String {
    let constraints = all_constraints(model, claim);
    let n_rows = model.n_rows();
    let d = model.schema().width();

    let mut text = String::new();
    let _ = writeln!(
        text,
        "\\ integer feasibility model: N={} d={} queries={} M={}",
        n_rows,
        d,
        model.queries().len(),
        model.big_m()
    );
    let _ = writeln!(text, "\\ seed={}", model.seed());
    if let Some((c, mode)) = claim {
        let _ = writeln!(
            text,
            "\\ claim: cols={} m={} mode={}",
            c.num_cols(),
            c.multiplicity,
            match mode {
                ClaimMode::NotEqual => "not-equal",
                ClaimMode::Equal => "equal",
            }
        );
    }
    text.push_str("Minimize\n obj: 0 X_0_0\nSubject To\n");
    let mut binaries: Vec<String> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for c in &constraints {
        let _ = write!(text, " {}:", c.name);
        for (i, &(coeff, var)) in c.terms.iter().enumerate() {
            let name = var.name();
            if seen.insert(var) {
                binaries.push(name.clone());
            }
            if coeff >= 0 {
                let _ = write!(
                    text,
                    " {}{} {}",
                    if i == 0 { "" } else { "+ " },
                    coeff,
                    name
                );
            } else {
                let _ = write!(text, " - {} {}", -coeff, name);
            }
        }
        let sense = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(text, " {} {}", sense, c.rhs);
    }
    text.push_str("Binary\n");
    for name in &binaries {
        let _ = writeln!(text, " {}", name);
    }
    text.push_str("End\n");
    text
}

/// Result of evaluating the emitted constraint system on a concrete dataset.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub satisfied: bool,
    pub violations: Vec<String>,
}

/// Returns the dataset with rows reordered to satisfy the hash-order
/// constraint of `model`.
pub fn hash_sorted(model: &ConstraintModel, dataset: &Dataset) -> Dataset {
    let mut rows = dataset.rows().to_vec();
    rows.sort_by_key(|r| (model.row_hash(r), r.clone()));
    Dataset::new(dataset.schema().clone(), rows)
}

/// Evaluates every emitted constraint on `dataset`, deriving W, T, U, P, S,
/// and Y from X by their defining logic. Rows are checked in the order given;
/// shuffling a feasible dataset out of hash order trips only the
/// `hashorder_*` constraints.
pub fn check_assignment(
    model: &ConstraintModel,
    dataset: &Dataset,
    claim: Option<(&Claim, ClaimMode)>,
) -> Result<CheckReport> {
    if dataset.len() != model.n_rows() {
        return Err(Error::Dimension(format!(
            "dataset has {} rows, model expects {}",
            dataset.len(),
            model.n_rows()
        )));
    }
    if dataset.schema().as_ref() != model.schema().as_ref() {
        return Err(Error::Dimension(
            "dataset and model use different schemas".into(),
        ));
    }

    let rows = dataset.rows();
    let w: Vec<Vec<i64>> = model
        .queries()
        .queries()
        .iter()
        .map(|q| rows.iter().map(|r| q.satisfied(r) as i64).collect())
        .collect();

    let (t_val, s_val, y_val) = match claim {
        Some((c, mode)) => {
            let bits = c.attributes.onehot_indices(model.schema());
            let t: Vec<Vec<(usize, i64)>> = rows
                .iter()
                .map(|r| bits.iter().map(|&b| (b, r.bits()[b] as i64)).collect())
                .collect();
            let s: Vec<i64> = t
                .iter()
                .map(|row| row.iter().all(|&(_, v)| v == 1) as i64)
                .collect();
            let total: i64 = s.iter().sum();
            let y = match mode {
                // pick the Y branch consistent with the actual match count;
                // when the count equals m neither branch can hold
                ClaimMode::NotEqual => (total > c.multiplicity as i64) as i64,
                ClaimMode::Equal => 0,
            };
            (t, s, y)
        }
        None => (Vec::new(), Vec::new(), 0),
    };

    let value = |var: Var| -> i64 {
        match var {
            Var::X { row, bit } => rows[row].bits()[bit] as i64,
            Var::W { query, row } => w[query][row],
            Var::T { row, bit } => t_val[row]
                .iter()
                .find(|&&(b, _)| b == bit)
                .map(|&(_, v)| v)
                .unwrap_or(1),
            // T = 0 forces U = 1 (the claim bit exceeds X); U is free when
            // T = 1 and we pin it to 0, giving P = (1 - T) * U = 1 - T
            Var::U { row, bit } | Var::P { row, bit } => {
                1 - t_val[row]
                    .iter()
                    .find(|&&(b, _)| b == bit)
                    .map(|&(_, v)| v)
                    .unwrap_or(1)
            }
            Var::S { row } => s_val[row],
            Var::Y => y_val,
        }
    };

    let violations: Vec<String> = all_constraints(model, claim)
        .iter()
        .filter(|c| !c.holds(value))
        .map(|c| c.name.clone())
        .collect();
    Ok(CheckReport {
        satisfied: violations.is_empty(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::claims::Claim;
    use crate::domain::{Dataset, PartialAssignment};
    use crate::model::build_generation_model;
    use crate::query::compile_queries;
    use crate::test_support::*;

    fn toy_model() -> crate::model::ConstraintModel {
        let schema = Arc::new(toy_schema());
        let qs = compile_queries(&toy_query_defs(), &schema).unwrap();
        build_generation_model(&qs, &[2, 1, 1, 2, 0], 3, 7).unwrap()
    }

    #[test]
    fn toy_constraint_counts() {
        let model = toy_model();
        let cs = generation_constraints(&model);
        // one-hot: N*k, Eq6: n*N (all 1-way), Eq7: n*N, Eq8: n, Eq17: N-1
        let onehot = cs.iter().filter(|c| c.name.starts_with("onehot")).count();
        let sat_ub = cs.iter().filter(|c| c.name.starts_with("sat_ub")).count();
        let sat_lb = cs.iter().filter(|c| c.name.starts_with("sat_lb")).count();
        let count = cs.iter().filter(|c| c.name.starts_with("count_")).count();
        let order = cs
            .iter()
            .filter(|c| c.name.starts_with("hashorder"))
            .count();
        assert_eq!((onehot, sat_ub, sat_lb, count, order), (6, 15, 15, 5, 2));
        assert_eq!(cs.len(), 43);
    }

    #[test]
    fn feasible_dataset_satisfies_emitted_model() {
        let schema = Arc::new(toy_schema());
        let model = toy_model();
        for d in [toy_dataset(&schema), toy_alternative_dataset(&schema)] {
            let report = check_assignment(&model, &hash_sorted(&model, &d), None).unwrap();
            assert!(report.satisfied, "violations: {:?}", report.violations);
        }
    }

    #[test]
    fn wrong_marginal_violates_count_constraint() {
        let schema = Arc::new(toy_schema());
        let model = toy_model();
        let bad = dataset_from_indices(&schema, &[(0, 0), (0, 0), (1, 1)]);
        let report = check_assignment(&model, &hash_sorted(&model, &bad), None).unwrap();
        assert!(!report.satisfied);
        assert!(report.violations.iter().any(|v| v.starts_with("count_")));
    }

    #[test]
    fn shuffled_rows_violate_only_hash_order() {
        let schema = Arc::new(toy_schema());
        let model = toy_model();
        let sorted = hash_sorted(&model, &toy_dataset(&schema));
        let mut rows = sorted.rows().to_vec();
        rows.reverse();
        let shuffled = Dataset::new(schema.clone(), rows);
        let report = check_assignment(&model, &shuffled, None).unwrap();
        if !report.satisfied {
            assert!(report.violations.iter().all(|v| v.starts_with("hashorder")));
        }
        let repaired = hash_sorted(&model, &shuffled);
        assert!(check_assignment(&model, &repaired, None).unwrap().satisfied);
    }

    #[test]
    fn claim_constraints_respect_disequality() {
        let schema = Arc::new(toy_schema());
        let model = toy_model();
        let a = PartialAssignment::from_pairs([("A", "a0"), ("B", "b0")], &schema).unwrap();
        let claim = Claim::new(a, 1);
        // alternative dataset has zero (a0,b0) rows: count != m, satisfiable
        let alt = hash_sorted(&model, &toy_alternative_dataset(&schema));
        let report = check_assignment(&model, &alt, Some((&claim, ClaimMode::NotEqual))).unwrap();
        assert!(report.satisfied, "violations: {:?}", report.violations);
        // private dataset has exactly one: both Y branches fail
        let private = hash_sorted(&model, &toy_dataset(&schema));
        let report =
            check_assignment(&model, &private, Some((&claim, ClaimMode::NotEqual))).unwrap();
        assert!(!report.satisfied);
        assert!(report.violations.iter().any(|v| v.starts_with("claim_ne")));
        // equal mode flips both outcomes
        let report = check_assignment(&model, &private, Some((&claim, ClaimMode::Equal))).unwrap();
        assert!(report.satisfied);
        let report = check_assignment(&model, &alt, Some((&claim, ClaimMode::Equal))).unwrap();
        assert!(!report.satisfied);
    }

    #[test]
    fn full_column_claim_spans_k_bits() {
        let schema = Arc::new(toy_schema());
        let a = PartialAssignment::from_pairs([("A", "a1"), ("B", "b1")], &schema).unwrap();
        assert_eq!(a.onehot_indices(&schema).len(), 2);
    }

    #[test]
    fn lp_text_is_deterministic_and_well_formed() {
        let model = toy_model();
        let t1 = export_milp(&model, None);
        let t2 = export_milp(&model, None);
        assert_eq!(t1, t2);
        assert!(t1.starts_with("\\ integer feasibility model"));
        assert!(t1.contains("Minimize"));
        assert!(t1.contains("Subject To"));
        assert!(t1.contains("Binary"));
        assert!(t1.ends_with("End\n"));
        assert!(t1.contains("X_0_0"));
        assert!(t1.contains("W_0_0"));
        // claim model adds T/U/P/S/Y
        let schema = Arc::new(toy_schema());
        let a = PartialAssignment::from_pairs([("A", "a0")], &schema).unwrap();
        let claim = Claim::new(a, 1);
        let tc = export_milp(&model, Some((&claim, ClaimMode::NotEqual)));
        for v in ["T_0_0", "U_0_0", "P_0_0", "S_0", " Y"] {
            assert!(tc.contains(v), "missing {}", v);
        }
    }
}
