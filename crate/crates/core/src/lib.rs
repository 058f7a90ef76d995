//! Verified partial reconstruction of discrete tabular datasets from
//! published marginal counting statistics.
//!
//! The attack pipeline is generate-then-verify: solve an integer feasibility
//! problem for a pool of candidate datasets consistent with the published
//! counts, intersect the claims those datasets agree on, then prove each
//! surviving claim by showing that no consistent dataset can violate it. A
//! brute-force oracle and binomial baselines back the whole thing up.

pub mod baseline;
pub mod claims;
pub mod domain;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod milp;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod query;
pub mod solver;
pub mod verifier;

#[doc(hidden)]
pub mod test_support;

pub use error::{Error, Result};
