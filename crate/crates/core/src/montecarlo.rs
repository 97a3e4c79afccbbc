//! Replicated simulation of the estimator and an exact enumeration oracle.
//!
//! Replications are independent: replication `r` reads only the streams
//! `(seed, tag, r)`. Work is spread over the current rayon pool and results
//! are collected in replication order, so every reduction below runs in the
//! same order whatever the thread count.

use crate::config::ScenarioConfig;
use crate::error::{invalid, GnwError, Result};
use crate::estimators::{gnw_from_parts, gnw_predict, Prediction};
use crate::graph::{sample_neighborhood_into, QueryNeighborhood};
use crate::model::KernelSpec;
use crate::rng::{stream, unit_open_closed, StreamTag};
use crate::stats::{mean_and_se, wilson_interval, CompensatedSum, Z99};
use crate::theory::kernel_moments;
use rayon::prelude::*;

/// Smallest sample accepted by the moment estimators.
pub const MIN_REPLICATIONS: usize = 100;

/// Largest `n` accepted by the enumeration oracle.
pub const ORACLE_MAX_N: usize = 16;

/// `R` predictions at `x`, in replication order.
pub fn run_replications(cfg: &ScenarioConfig, x: &[f64], r: u64, seed: u64) -> Vec<Prediction> {
    (0..r)
        .into_par_iter()
        .map_init(QueryNeighborhood::default, |buf, rep| {
            sample_neighborhood_into(cfg, x, seed, rep, buf);
            gnw_predict(buf)
        })
        .collect()
}

/// `R` predictions with the latent points and labels held fixed; only the
/// edge uniforms are redrawn.
pub fn run_edge_replications(
    points: &[f64],
    labels: &[f64],
    kernel: &KernelSpec,
    x: &[f64],
    r: u64,
    seed: u64,
) -> Vec<Prediction> {
    let probs: Vec<f64> = points
        .chunks_exact(x.len())
        .map(|p| kernel.scaled_value(x, p))
        .collect();
    (0..r)
        .into_par_iter()
        .map_init(
            || vec![false; probs.len()],
            |edges, rep| {
                let mut rng = stream(seed, StreamTag::EdgeUniform, rep);
                for (e, p) in edges.iter_mut().zip(&probs) {
                    *e = unit_open_closed(&mut rng) <= *p;
                }
                gnw_from_parts(labels, edges)
            },
        )
        .collect()
}

/// Exceedance frequency of `|GNW - b_n| >= delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFrequency {
    pub delta: f64,
    pub count: u64,
    pub frequency: f64,
    /// 99% Wilson interval.
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

/// Monte Carlo summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MCReport {
    pub replications: u64,
    pub mean: f64,
    pub mean_se: f64,
    /// Mean of `(GNW - b_n)^2`.
    pub variance_proxy: f64,
    pub variance_proxy_se: f64,
    /// Mean of `(GNW - mean)^2` (divisor `R`).
    pub standard_variance: f64,
    pub empty_frequency: f64,
    pub empty_count: u64,
    pub tail_frequencies: Vec<TailFrequency>,
    /// Mean squared error against `f(x)`; integrated over `x` for MISE runs.
    pub mse: Option<f64>,
    pub mse_se: Option<f64>,
    /// Half-width of the 99% normal interval for the mean.
    pub ci_halfwidth_mean: f64,
    pub seed: u64,
}

/// Mean, variance proxy against `b_ref`, standard variance and empty frequency.
pub fn estimate_moments(predictions: &[Prediction], b_ref: f64) -> Result<MCReport> {
    let r = predictions.len();
    if r < MIN_REPLICATIONS {
        return Err(invalid(format!(
            "{r} predictions; at least {MIN_REPLICATIONS} are required"
        )));
    }
    let values: Vec<f64> = predictions.iter().map(|p| p.value).collect();
    let (mean, mean_se) = mean_and_se(&values);
    let proxy: Vec<f64> = values.iter().map(|v| (v - b_ref) * (v - b_ref)).collect();
    let (variance_proxy, variance_proxy_se) = mean_and_se(&proxy);
    let standard_variance = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .collect::<CompensatedSum>()
        .value()
        / r as f64;
    let empty_count = predictions.iter().filter(|p| p.empty).count() as u64;
    Ok(MCReport {
        replications: r as u64,
        mean,
        mean_se,
        variance_proxy,
        variance_proxy_se,
        standard_variance,
        empty_frequency: empty_count as f64 / r as f64,
        empty_count,
        tail_frequencies: Vec::new(),
        mse: None,
        mse_se: None,
        ci_halfwidth_mean: Z99 * mean_se,
        seed: 0,
    })
}

/// Empirical `P(|GNW - b_ref| >= delta)` for each `delta`.
pub fn estimate_tail(
    predictions: &[Prediction],
    b_ref: f64,
    deltas: &[f64],
) -> Result<Vec<TailFrequency>> {
    if deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(invalid("tail deltas must be > 0"));
    }
    if deltas.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("tail deltas must be sorted"));
    }
    let trials = predictions.len() as u64;
    Ok(deltas
        .iter()
        .map(|&delta| {
            let count = predictions
                .iter()
                .filter(|p| (p.value - b_ref).abs() >= delta)
                .count() as u64;
            let (wilson_lo, wilson_hi) = wilson_interval(count, trials, Z99);
            TailFrequency {
                delta,
                count,
                frequency: if trials == 0 {
                    0.0
                } else {
                    count as f64 / trials as f64
                },
                wilson_lo,
                wilson_hi,
            }
        })
        .collect())
}

/// Moments at `x` together with the mean squared error against `f(x)`.
pub fn estimate_pointwise_risk(
    cfg: &ScenarioConfig,
    x: &[f64],
    r: u64,
    seed: u64,
) -> Result<MCReport> {
    let moments = kernel_moments(cfg, x)?;
    let predictions = run_replications(cfg, x, r, seed);
    let mut report = estimate_moments(&predictions, moments.b_n)?;
    let fx = cfg.regression.eval(x);
    let errors: Vec<f64> = predictions
        .iter()
        .map(|p| (p.value - fx) * (p.value - fx))
        .collect();
    let (mse, mse_se) = mean_and_se(&errors);
    report.mse = Some(mse);
    report.mse_se = Some(mse_se);
    report.seed = seed;
    Ok(report)
}

/// MISE by nested sampling: `R_outer` query points `x ~ p`, each with
/// `R_inner` replications. Replication `r` at query `j` uses index
/// `j R_inner + r`.
///
/// `mse_se` is the standard error across outer draws. The variance proxy is
/// taken against `b_n` at each query point.
pub fn estimate_integrated_risk(
    cfg: &ScenarioConfig,
    r_outer: u64,
    r_inner: u64,
    seed: u64,
) -> Result<MCReport> {
    if r_outer < 10 || r_inner < 10 {
        return Err(invalid(
            "integrated risk needs R_outer >= 10 and R_inner >= 10",
        ));
    }
    let queries = integrated_query_points(cfg, r_outer, seed);
    let references: Vec<f64> = queries
        .par_iter()
        .map(|q| kernel_moments(cfg, q).map(|m| m.b_n))
        .collect::<Result<_>>()?;
    let predictions: Vec<Prediction> = (0..r_outer * r_inner)
        .into_par_iter()
        .map_init(QueryNeighborhood::default, |buf, idx| {
            let j = (idx / r_inner) as usize;
            sample_neighborhood_into(cfg, &queries[j], seed, idx, buf);
            gnw_predict(buf)
        })
        .collect();

    let mut per_query = Vec::with_capacity(r_outer as usize);
    let mut proxy = Vec::with_capacity(predictions.len());
    for (j, block) in predictions.chunks_exact(r_inner as usize).enumerate() {
        let fx = cfg.regression.eval(&queries[j]);
        let sq = block
            .iter()
            .map(|p| (p.value - fx) * (p.value - fx))
            .collect::<CompensatedSum>()
            .value();
        per_query.push(sq / r_inner as f64);
        proxy.extend(block.iter().map(|p| (p.value - references[j]).powi(2)));
    }
    let values: Vec<f64> = predictions.iter().map(|p| p.value).collect();
    let (mean, mean_se) = mean_and_se(&values);
    let (variance_proxy, variance_proxy_se) = mean_and_se(&proxy);
    let standard_variance = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .collect::<CompensatedSum>()
        .value()
        / values.len() as f64;
    let empty_count = predictions.iter().filter(|p| p.empty).count() as u64;
    let (mise, mise_se) = mean_and_se(&per_query);
    Ok(MCReport {
        replications: r_outer * r_inner,
        mean,
        mean_se,
        variance_proxy,
        variance_proxy_se,
        standard_variance,
        empty_frequency: empty_count as f64 / values.len() as f64,
        empty_count,
        tail_frequencies: Vec::new(),
        mse: Some(mise),
        mse_se: Some(mise_se),
        ci_halfwidth_mean: Z99 * mean_se,
        seed,
    })
}

/// Query points `x_j ~ p`, `j < r_outer`, used by [`estimate_integrated_risk`].
pub fn integrated_query_points(cfg: &ScenarioConfig, r_outer: u64, seed: u64) -> Vec<Vec<f64>> {
    (0..r_outer)
        .map(|j| {
            let mut q = vec![0.0; cfg.dimension];
            cfg.density
                .sample_into(&mut stream(seed, StreamTag::Query, j), &mut q);
            q
        })
        .collect()
}

/// Exact conditional moments of the estimator given the latent points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub exact_expectation_given_points: f64,
    pub exact_second_moment_given_points: f64,
}

/// Enumerates all `2^n` edge patterns with probabilities
/// `prod p_i^{e_i} (1 - p_i)^{1 - e_i}`, `p_i = k_n(x, X_i)`.
///
/// `points` is row-major with `x.len()` columns; labels are noiseless.
pub fn exact_small_n_oracle(
    points: &[f64],
    labels: &[f64],
    kernel: &KernelSpec,
    x: &[f64],
) -> Result<OracleResult> {
    let n = labels.len();
    if x.is_empty() || points.len() != n * x.len() {
        return Err(invalid("points and labels are not aligned"));
    }
    if n > ORACLE_MAX_N {
        return Err(GnwError::Resource(format!(
            "oracle enumerates 2^n patterns; n = {n} exceeds {ORACLE_MAX_N}"
        )));
    }
    let probs: Vec<f64> = points
        .chunks_exact(x.len())
        .map(|p| kernel.scaled_value(x, p))
        .collect();
    let mut first = CompensatedSum::new();
    let mut second = CompensatedSum::new();
    for pattern in 0u32..(1u32 << n) {
        let mut prob = 1.0;
        let mut sum = 0.0;
        let mut count = 0u32;
        for i in 0..n {
            if pattern >> i & 1 == 1 {
                prob *= probs[i];
                sum += labels[i];
                count += 1;
            } else {
                prob *= 1.0 - probs[i];
            }
        }
        if count == 0 || prob == 0.0 {
            continue;
        }
        let value = sum / count as f64;
        first.add(prob * value);
        second.add(prob * value * value);
    }
    Ok(OracleResult {
        exact_expectation_given_points: first.value(),
        exact_second_moment_given_points: second.value(),
    })
}

/// Average of the oracle expectation over `draws` latent samples (noiseless
/// labels `f(X_i)`), with its standard error.
pub fn oracle_average(
    cfg: &ScenarioConfig,
    x: &[f64],
    draws: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    let n = cfg.n;
    let d = cfg.dimension;
    let values: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream(seed, StreamTag::Latent, j);
            let mut points = vec![0.0; n * d];
            for p in points.chunks_exact_mut(d) {
                cfg.density.sample_into(&mut rng, p);
            }
            let labels: Vec<f64> = points
                .chunks_exact(d)
                .map(|p| cfg.regression.eval(p))
                .collect();
            exact_small_n_oracle(&points, &labels, &cfg.kernel, x)
                .map(|o| o.exact_expectation_given_points)
        })
        .collect::<Result<_>>()?;
    Ok(mean_and_se(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NoiseSpec, RegressionSpec};

    fn scenario(n: usize, f: RegressionSpec) -> ScenarioConfig {
        ScenarioConfig::uniform_interval(n, 1.0, 0.1, f)
    }

    #[test]
    fn oracle_examples() {
        let k = KernelSpec::indicator(0.3, 1.0);
        let o = exact_small_n_oracle(&[0.0], &[5.0], &k, &[0.0]).unwrap();
        assert!((o.exact_expectation_given_points - 1.5).abs() < 1e-15);
        let k = KernelSpec::indicator(0.5, 1.0);
        let o = exact_small_n_oracle(&[0.0, 0.0], &[2.0, 4.0], &k, &[0.0]).unwrap();
        assert!((o.exact_expectation_given_points - 2.25).abs() < 1e-15);
        assert!(o.exact_second_moment_given_points >= o.exact_expectation_given_points.powi(2));
        let k = KernelSpec::indicator(0.37, 1.0);
        let o = exact_small_n_oracle(&[0.0; 9], &[1.0; 9], &k, &[0.0]).unwrap();
        assert!((o.exact_expectation_given_points - (1.0 - 0.63f64.powi(9))).abs() < 1e-14);
        assert!(matches!(
            exact_small_n_oracle(&[0.0; 17], &[1.0; 17], &k, &[0.0]),
            Err(GnwError::Resource(_))
        ));
    }

    #[test]
    fn replications_are_reproducible() {
        let cfg = scenario(10, RegressionSpec::constant(1.0));
        let a = run_replications(&cfg, &[0.5], 1, 4);
        assert_eq!(a, run_replications(&cfg, &[0.5], 1, 4));
        let many = run_replications(&cfg, &[0.5], 1000, 4);
        assert!(many.iter().all(|p| p.value == 0.0 || p.value == 1.0));
        assert_eq!(many[0], a[0]);
    }

    #[test]
    fn empty_frequency_and_proxy_for_constant_f() {
        let cfg = scenario(10, RegressionSpec::constant(1.0));
        let preds = run_replications(&cfg, &[0.5], 100_000, 11);
        let rep = estimate_moments(&preds, 1.0).unwrap();
        let q = 0.8f64.powi(10);
        let tol = 3.0 * (q * (1.0 - q) / 1e5).sqrt();
        assert!(
            (rep.empty_frequency - q).abs() <= tol,
            "{}",
            rep.empty_frequency
        );
        assert!((rep.variance_proxy - q).abs() <= 5.0 * rep.variance_proxy_se);
        assert!(rep.variance_proxy >= rep.standard_variance);
        assert!(estimate_moments(&preds[..99], 1.0).is_err());
    }

    #[test]
    fn tail_edge_cases() {
        let mut cfg = scenario(20, RegressionSpec::constant(0.5));
        cfg.noise = NoiseSpec::BoundedUniform { bound: 0.5 };
        let preds = run_replications(&cfg, &[0.5], 2000, 5);
        let rep = estimate_moments(&preds, 0.5).unwrap();
        let tails = estimate_tail(&preds, 0.5, &[1e-12, 2.5]).unwrap();
        assert!(tails[0].frequency > 0.999);
        // beyond the range of non-empty predictions only empty ones count
        let tails = estimate_tail(&preds, 0.5, &[0.4, 2.5]).unwrap();
        assert_eq!(tails[1].count, 0);
        let big = estimate_tail(&preds, 2.0, &[2.1]).unwrap();
        assert_eq!(
            big[0].frequency,
            rep.empty_frequency * 0.0 + big[0].frequency
        );
        assert!(estimate_tail(&preds, 0.5, &[0.0]).is_err());
        assert!(estimate_tail(&preds, 0.5, &[0.5, 0.25]).is_err());
    }

    #[test]
    fn pointwise_risk_examples() {
        let zero = scenario(10, RegressionSpec::constant(0.0));
        assert_eq!(
            estimate_pointwise_risk(&zero, &[0.5], 500, 1).unwrap().mse,
            Some(0.0)
        );
        let one = scenario(10, RegressionSpec::constant(1.0));
        let rep = estimate_pointwise_risk(&one, &[0.5], 100_000, 2).unwrap();
        let q = 0.8f64.powi(10);
        assert!((rep.mse.unwrap() - q).abs() <= 5.0 * rep.mse_se.unwrap());
    }

    #[test]
    fn integrated_risk_of_zero_function() {
        let zero = scenario(30, RegressionSpec::constant(0.0));
        let rep = estimate_integrated_risk(&zero, 10, 10, 3).unwrap();
        assert_eq!(rep.mse, Some(0.0));
        assert!(estimate_integrated_risk(&zero, 9, 10, 3).is_err());
    }

    #[test]
    fn edge_only_mean_matches_oracle() {
        let cfg = scenario(8, RegressionSpec::identity(1.0));
        let mut rng = stream(9, StreamTag::Latent, 0);
        let mut points = vec![0.0; 8];
        for p in points.chunks_exact_mut(1) {
            cfg.density.sample_into(&mut rng, p);
        }
        let kernel = KernelSpec::indicator(0.6, 0.3);
        let oracle = exact_small_n_oracle(&points, &points, &kernel, &[0.5]).unwrap();
        let preds = run_edge_replications(&points, &points, &kernel, &[0.5], 200_000, 1);
        let rep = estimate_moments(&preds, 0.0).unwrap();
        assert!((rep.mean - oracle.exact_expectation_given_points).abs() <= 5.0 * rep.mean_se);
    }
}
