//! Graphical Nadaraya-Watson regression on latent position model graphs.
//!
//! A query node at latent position `x` predicts the label average of its graph
//! neighbors. This crate samples such graphs, computes the estimator and its
//! classical kernel counterpart, evaluates the analytic quantities that govern
//! its risk (local connection parameter, smoothed value, expectation, variance
//! and concentration bounds, risk bounds) and estimates the same quantities by
//! replicated simulation.

// Negated comparisons are how inputs reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod stats;
pub mod theory;

pub use config::{
    parse_config, DeclaredConstants, Query, RunSettings, ScenarioConfig, SCHEMA_VERSION,
};
pub use error::{GnwError, Result};
pub use estimators::{gnw_predict, nw_predict, Prediction};
pub use graph::{
    decoupling_selftest, r_subset, sample_full_graph, sample_neighborhood, FullGraph,
    QueryNeighborhood, SelftestReport, SubsetIndex,
};
pub use model::{
    assumption_audit, AssumptionAudit, BaseKernel, DensitySpec, HolderDecl, KernelSpec, NoiseSpec,
    Point, RegressionFunction, RegressionSpec,
};
pub use montecarlo::{
    estimate_integrated_risk, estimate_moments, estimate_pointwise_risk, estimate_tail,
    exact_small_n_oracle, run_replications, MCReport, OracleResult,
};
pub use theory::{theory_report, RiskBoundReport, TheoryReport};
