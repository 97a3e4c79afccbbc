//! Scenario configuration: everything needed to reproduce one experiment.
//!
//! Configurations are JSON documents with a `schema_version` key. Unknown keys
//! are rejected with the list of valid keys, and every constraint violation
//! names the offending field.

use crate::error::{GnwError, Result};
use crate::model::{DensitySpec, KernelSpec, NoiseSpec, Point, RegressionSpec};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// Where the estimator is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Query {
    /// Fixed query latent positions.
    Points(Vec<Point>),
    /// Query position drawn from the latent density (integrated risk).
    Integrated,
}

/// Scenario constants that parametrize the assumptions of the risk bounds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredConstants {
    /// Measure-retaining radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    /// Measure-retaining fraction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    /// Lower bound on the density near query points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<f64>,
    /// Hölder exponent of the density.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

/// Replication counts and check parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSettings {
    /// Deviation thresholds for tail-probability checks.
    pub deltas: Vec<f64>,
    /// Replications for tail-probability checks.
    pub tail_replications: u64,
    /// Decreasing bandwidths for the degree-ratio check.
    pub h_sequence: Vec<f64>,
    /// Outer (query point) draws for integrated risk.
    pub outer_replications: u64,
    /// Inner replications per query point for integrated risk.
    pub inner_replications: u64,
    /// Latent draws averaged by the exact small-n oracle.
    pub oracle_draws: u64,
    /// Largest number of node pairs sampled for a full graph.
    pub edge_budget: u64,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            deltas: vec![0.25, 0.5, 1.0],
            tail_replications: 1_000_000,
            h_sequence: vec![0.1, 0.01, 0.001],
            outer_replications: 200,
            inner_replications: 50,
            oracle_draws: 1000,
            edge_budget: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub dimension: usize,
    pub n: usize,
    pub density: DensitySpec,
    pub kernel: KernelSpec,
    pub regression: RegressionSpec,
    pub noise: NoiseSpec,
    #[serde(default)]
    pub constants: DeclaredConstants,
    pub query: Query,
    pub replications: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub run: RunSettings,
}

impl ScenarioConfig {
    /// One-dimensional uniform scenario with an indicator kernel; the common
    /// starting point for tests and examples.
    pub fn uniform_interval(n: usize, alpha: f64, h: f64, regression: RegressionSpec) -> Self {
        ScenarioConfig {
            schema_version: SCHEMA_VERSION,
            dimension: 1,
            n,
            density: DensitySpec::unit_interval(),
            kernel: KernelSpec::indicator(alpha, h),
            regression,
            noise: NoiseSpec::None,
            constants: DeclaredConstants {
                r0: Some(1.0),
                c0: Some(0.5),
                p0: Some(1.0),
                beta: None,
            },
            query: Query::Points(vec![Point::scalar(0.5)]),
            replications: 100_000,
            master_seed: 1,
            run: RunSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: GnwError| match e {
            GnwError::InvalidInput(m) => GnwError::Config(m),
            other => other,
        };
        if self.schema_version != SCHEMA_VERSION {
            return Err(GnwError::Config(format!(
                "schema_version = {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.dimension == 0 {
            return Err(GnwError::Config("dimension must be >= 1".into()));
        }
        if self.n == 0 {
            return Err(GnwError::Config("n must be >= 1".into()));
        }
        if self.replications == 0 {
            return Err(GnwError::Config("replications must be >= 1".into()));
        }
        self.density.validate().map_err(cfg)?;
        if self.density.dim() != self.dimension {
            return Err(GnwError::Config(format!(
                "density has dimension {}, expected dimension = {}",
                self.density.dim(),
                self.dimension
            )));
        }
        self.kernel.validate().map_err(cfg)?;
        self.regression.validate(self.dimension).map_err(cfg)?;
        self.noise.validate().map_err(cfg)?;
        let c = &self.constants;
        for (name, v) in [("r0", c.r0), ("c0", c.c0), ("p0", c.p0), ("beta", c.beta)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(GnwError::Config(format!(
                        "constants.{name} = {v} must be > 0"
                    )));
                }
            }
        }
        if let Some(c0) = c.c0 {
            if c0 > 1.0 {
                return Err(GnwError::Config("constants.c0 must lie in (0, 1]".into()));
            }
        }
        if let Query::Points(points) = &self.query {
            if points.is_empty() {
                return Err(GnwError::Config("query.points must not be empty".into()));
            }
            for p in points {
                if p.dim() != self.dimension {
                    return Err(GnwError::Config(
                        "query point has the wrong dimension".into(),
                    ));
                }
                if !self.density.contains(p.coords()) {
                    return Err(GnwError::Config(format!(
                        "query point {:?} lies outside the support Q",
                        p.coords()
                    )));
                }
            }
        }
        if self.run.deltas.iter().any(|d| !(*d > 0.0)) {
            return Err(GnwError::Config("run.deltas must be positive".into()));
        }
        if self.run.h_sequence.windows(2).any(|w| !(w[1] < w[0]))
            || self.run.h_sequence.iter().any(|h| !(*h > 0.0))
        {
            return Err(GnwError::Config(
                "run.h_sequence must be positive and strictly decreasing".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| GnwError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Query points, or an error for integrated scenarios.
    pub fn query_points(&self) -> Option<&[Point]> {
        match &self.query {
            Query::Points(p) => Some(p),
            Query::Integrated => None,
        }
    }
}

/// Reads and validates a scenario file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| GnwError::Config(format!("{}: {e}", path.display())))?;
    ScenarioConfig::from_json(&text).map_err(|e| match e {
        GnwError::Config(m) => GnwError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema_version": 1,
        "dimension": 1,
        "n": 100,
        "density": {"uniform_cube": {"lo": [0.0], "hi": [1.0]}},
        "kernel": {"base": "indicator", "alpha": 1.0, "h": 0.1, "m1": 1.0, "m2": 1.0},
        "regression": {"function": {"constant": {"value": 1.0}}, "bound": 1.0},
        "noise": "none",
        "query": {"points": [[0.5]]},
        "replications": 1000,
        "master_seed": 7
    }"#;

    #[test]
    fn minimal_config_parses() {
        let cfg = ScenarioConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.n, 100);
        assert_eq!(cfg.run, RunSettings::default());
    }

    #[test]
    fn alpha_out_of_range_is_rejected() {
        let text = MINIMAL.replace("\"alpha\": 1.0", "\"alpha\": 1.5");
        let err = ScenarioConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("alpha in (0, 1]"), "{err}");
    }

    #[test]
    fn unknown_key_lists_valid_keys() {
        let text = MINIMAL.replace("\"n\": 100", "\"n\": 100, \"bogus\": 3");
        let err = ScenarioConfig::from_json(&text).unwrap_err().to_string();
        assert!(
            err.contains("bogus") && err.contains("master_seed"),
            "{err}"
        );
    }

    #[test]
    fn round_trip_is_lossless() {
        let cfg = ScenarioConfig::from_json(MINIMAL).unwrap();
        let again = ScenarioConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
        let mut rich =
            ScenarioConfig::uniform_interval(50, 0.3, 0.05, RegressionSpec::identity(1.0));
        rich.noise = NoiseSpec::Gaussian { stddev: 0.7 };
        rich.query = Query::Integrated;
        assert_eq!(ScenarioConfig::from_json(&rich.to_json()).unwrap(), rich);
    }

    #[test]
    fn query_outside_support_is_rejected() {
        let text = MINIMAL.replace("[[0.5]]", "[[1.5]]");
        assert!(ScenarioConfig::from_json(&text).is_err());
    }
}
