//! One-parameter sweeps of the integrated risk against the closed-form bounds.

use crate::error::CliError;
use crate::output::{csv_text, fmt_f64};
use crate::verify::risk_params;
use gnw_core::montecarlo::{estimate_integrated_risk, integrated_query_points};
use gnw_core::stats::Z99;
use gnw_core::theory::{bias_uniform_bound, kernel_moments, pointwise_risk_bound};
use gnw_core::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    /// Kernel bandwidth.
    H,
    /// Sparsity, with `n alpha` held at the configured value.
    Alpha,
    /// Number of nodes.
    N,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::H => "h",
            SweepParam::Alpha => "alpha",
            SweepParam::N => "n",
        }
    }

    /// The configuration with this parameter set to `value`.
    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig, CliError> {
        let mut out = cfg.clone();
        match self {
            SweepParam::H => out.kernel.h = value,
            SweepParam::Alpha => {
                let n_alpha = cfg.n as f64 * cfg.kernel.alpha;
                out.kernel.alpha = value;
                out.n = (n_alpha / value).round() as usize;
            }
            SweepParam::N => {
                if value.fract() != 0.0 {
                    return Err(CliError::Usage(format!("n = {value} is not an integer")));
                }
                out.n = value as usize;
            }
        }
        out.validate()?;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: &'static str,
    pub value: f64,
    pub mise: f64,
    /// Half-width of the 99% interval of `mise`.
    pub mise_ci: f64,
    /// `NaN` when the constants or preconditions of the bound are missing.
    pub pointwise_bound: f64,
    pub integrated_bound: f64,
    pub bias_bound: f64,
    /// `(261 B^2 + 65 sigma^2) / d_n_min`.
    pub variance_bound: f64,
    /// Smallest `d_n(x)` over the sampled query points.
    pub d_n_min: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    csv_text(
        &[
            "param",
            "value",
            "mise",
            "mise_ci",
            "pointwise_bound",
            "integrated_bound",
            "bias_bound",
            "variance_bound",
            "d_n_min",
        ],
        rows.iter().map(|r| {
            vec![
                r.param.to_string(),
                fmt_f64(r.value),
                fmt_f64(r.mise),
                fmt_f64(r.mise_ci),
                fmt_f64(r.pointwise_bound),
                fmt_f64(r.integrated_bound),
                fmt_f64(r.bias_bound),
                fmt_f64(r.variance_bound),
                fmt_f64(r.d_n_min),
            ]
        }),
    )
}

/// One row per value: MISE from `run.outer_replications x run.inner_replications`
/// nested draws, and the bounds at the same parameters.
pub fn run_sweep(
    cfg: &ScenarioConfig,
    param: SweepParam,
    values: &[f64],
) -> Result<Vec<SweepRow>, CliError> {
    if values.is_empty() {
        return Err(CliError::Usage("sweep needs at least one value".into()));
    }
    if values.iter().any(|v| !(*v > 0.0)) || values.windows(2).any(|w| w[1] < w[0]) {
        return Err(CliError::Usage(
            "sweep values must be positive and sorted".into(),
        ));
    }
    let (outer, inner) = (cfg.run.outer_replications, cfg.run.inner_replications);
    values
        .iter()
        .map(|&value| {
            let c = param.apply(cfg, value)?;
            let rep = estimate_integrated_risk(&c, outer, inner, c.master_seed)?;
            let bound = risk_params(&c)
                .ok()
                .and_then(|p| pointwise_risk_bound(&p).ok())
                .unwrap_or(f64::NAN);
            let bias_bound = c.regression.holder.map_or(f64::NAN, |hd| {
                bias_uniform_bound(hd.l, hd.a, c.kernel.m2, c.kernel.h)
            });
            let mut d_n_min = f64::INFINITY;
            for q in integrated_query_points(&c, outer, c.master_seed) {
                d_n_min = d_n_min.min(c.n as f64 * kernel_moments(&c, &q)?.c_n);
            }
            let b = c.regression.bound;
            let variance_bound = (261.0 * b * b + 65.0 * c.noise.variance()) / d_n_min;
            Ok(SweepRow {
                param: param.name(),
                value,
                mise: rep.mse.unwrap_or(f64::NAN),
                mise_ci: Z99 * rep.mse_se.unwrap_or(f64::NAN),
                pointwise_bound: bound,
                integrated_bound: bound,
                bias_bound,
                variance_bound,
                d_n_min,
            })
        })
        .collect()
}
