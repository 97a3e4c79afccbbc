//! Verification suites: each row pairs an analytic value with its simulated
//! or enumerated counterpart and a one-sided or two-sided tolerance.

use crate::error::CliError;
use crate::output::{csv_text, fmt_f64};
use gnw_core::graph::decoupling_selftest;
use gnw_core::montecarlo::{
    estimate_integrated_risk, estimate_pointwise_risk, estimate_tail, oracle_average,
};
use gnw_core::stats::wilson_upper_slack;
use gnw_core::theory::{
    concentration_envelope, degree_ratio_check, integrated_risk_bound, kernel_moments,
    lebesgue_bracket, pointwise_risk_bound, proxy_gap, theory_report, DensityVariant, RiskParams,
};
use gnw_core::{estimate_moments, run_replications, HolderDecl, Point, ScenarioConfig};

/// Standard errors allowed on two-sided equality checks.
pub const EQUALITY_SE: f64 = 5.0;
/// Standard errors allowed on the empirical side of dominance checks.
pub const DOMINANCE_SE: f64 = 3.0;
/// Relative tolerance of the degree-ratio bracket at the smallest bandwidth.
pub const DEGREE_RATIO_TOL: f64 = 0.05;
/// Largest accepted relative quadrature error in the bias suite.
pub const BIAS_QUADRATURE_TOL: f64 = 1e-6;
/// Largest `n` for which the expectation suite adds the enumeration oracle.
pub const ORACLE_N: usize = 12;
/// Largest `n` enumerated by the decoupling suite.
pub const DECOUPLING_N: usize = 16;
/// Points in the bias grid over a one-dimensional support.
pub const BIAS_GRID: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Expectation,
    Variance,
    Concentration,
    Bias,
    Risk,
    Decoupling,
    #[value(name = "degree_ratio")]
    DegreeRatio,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationRow {
    pub check_name: String,
    pub theory_value: f64,
    pub empirical_value: f64,
    pub slack: f64,
    pub pass: bool,
}

impl VerificationRow {
    /// `|empirical - theory| <= slack`.
    pub fn equal(name: String, theory: f64, empirical: f64, slack: f64) -> Self {
        let pass = (empirical - theory).abs() <= slack;
        Self::new(name, theory, empirical, slack, pass)
    }

    /// `empirical - slack <= theory`.
    pub fn at_most(name: String, theory: f64, empirical: f64, slack: f64) -> Self {
        let pass = empirical - slack <= theory;
        Self::new(name, theory, empirical, slack, pass)
    }

    /// `empirical + slack >= theory`.
    pub fn at_least(name: String, theory: f64, empirical: f64, slack: f64) -> Self {
        let pass = empirical + slack >= theory;
        Self::new(name, theory, empirical, slack, pass)
    }

    fn new(
        check_name: String,
        theory_value: f64,
        empirical_value: f64,
        slack: f64,
        pass: bool,
    ) -> Self {
        VerificationRow {
            check_name,
            theory_value,
            empirical_value,
            slack,
            pass,
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.pass {
            "pass"
        } else {
            "fail"
        }
    }
}

pub fn verification_csv(rows: &[VerificationRow]) -> String {
    csv_text(
        &[
            "check_name",
            "theory_value",
            "empirical_value",
            "slack",
            "verdict",
        ],
        rows.iter().map(|r| {
            vec![
                r.check_name.clone(),
                fmt_f64(r.theory_value),
                fmt_f64(r.empirical_value),
                fmt_f64(r.slack),
                r.verdict().to_string(),
            ]
        }),
    )
}

pub fn all_pass(rows: &[VerificationRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

fn label(x: &[f64]) -> String {
    x.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(";")
}

fn query_points<'a>(cfg: &'a ScenarioConfig, suite: &str) -> Result<&'a [Point], CliError> {
    cfg.query_points()
        .ok_or_else(|| CliError::Usage(format!("the {suite} suite needs fixed query points")))
}

fn holder(cfg: &ScenarioConfig, suite: &str) -> Result<HolderDecl, CliError> {
    cfg.regression
        .holder
        .ok_or_else(|| CliError::Usage(format!("the {suite} suite needs regression.holder")))
}

fn require(value: Option<f64>, key: &str, suite: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("the {suite} suite needs constants.{key}")))
}

/// Runs one suite on `cfg` with its seed and replication count.
pub fn run_suite(cfg: &ScenarioConfig, suite: Suite) -> Result<Vec<VerificationRow>, CliError> {
    match suite {
        Suite::Expectation => expectation(cfg),
        Suite::Variance => variance(cfg),
        Suite::Concentration => concentration(cfg),
        Suite::Bias => bias(cfg),
        Suite::Risk => risk(cfg),
        Suite::Decoupling => run_selftest(cfg.n.min(DECOUPLING_N)),
        Suite::DegreeRatio => degree_ratio(cfg),
    }
}

fn expectation(cfg: &ScenarioConfig) -> Result<Vec<VerificationRow>, CliError> {
    let mut rows = Vec::new();
    let r = cfg.replications;
    for x in query_points(cfg, "expectation")? {
        let x = x.coords();
        let report = theory_report(cfg, x)?;
        let preds = run_replications(cfg, x, r, cfg.master_seed);
        let mc = estimate_moments(&preds, report.b_n)?;
        let at = label(x);
        let q = report.empty_prob;
        // E[GNW | non-empty] = b_n, so Var(GNW) >= b_n^2 q (1 - q); this floors
        // the standard error when rare empty neighborhoods were not observed.
        let se_floor = report.b_n.abs() * (q * (1.0 - q) / r as f64).sqrt();
        rows.push(VerificationRow::equal(
            format!("expectation[x={at}]"),
            report.expectation_gnw,
            mc.mean,
            EQUALITY_SE * mc.mean_se.max(se_floor),
        ));
        rows.push(VerificationRow::equal(
            format!("empty_frequency[x={at}]"),
            q,
            mc.empty_frequency,
            EQUALITY_SE * (q * (1.0 - q) / r as f64).sqrt(),
        ));
        if cfg.n <= ORACLE_N {
            let (mean, se) = oracle_average(cfg, x, cfg.run.oracle_draws, cfg.master_seed)?;
            rows.push(VerificationRow::equal(
                format!("expectation_oracle[x={at}]"),
                report.expectation_gnw,
                mean,
                EQUALITY_SE * se,
            ));
        }
    }
    Ok(rows)
}

fn variance(cfg: &ScenarioConfig) -> Result<Vec<VerificationRow>, CliError> {
    let mut rows = Vec::new();
    let sigma_sq = cfg.noise.variance();
    for x in query_points(cfg, "variance")? {
        let x = x.coords();
        let report = theory_report(cfg, x)?;
        let (Some(upper), Some(lower)) = (report.variance_upper, report.variance_lower) else {
            return Err(CliError::Usage(format!(
                "d_n = 0 at x = {}; the variance bounds need d_n > 0",
                label(x)
            )));
        };
        let preds = run_replications(cfg, x, cfg.replications, cfg.master_seed);
        let mc = estimate_moments(&preds, report.b_n)?;
        let at = label(x);
        rows.push(VerificationRow::at_most(
            format!("variance_upper[x={at}]"),
            upper,
            mc.variance_proxy,
            DOMINANCE_SE * mc.variance_proxy_se,
        ));
        if sigma_sq > 0.0 {
            rows.push(VerificationRow::at_least(
                format!("variance_lower[x={at}]"),
                lower,
                mc.variance_proxy,
                DOMINANCE_SE * mc.variance_proxy_se,
            ));
        }
        // (mean - b_n)^2 estimates b_n^2 (1 - c_n)^{2n}; delta-method error
        // plus the se^2 bias of a squared mean.
        let gap_se = 2.0 * (mc.mean - report.b_n).abs() * mc.mean_se + mc.mean_se * mc.mean_se;
        rows.push(VerificationRow::equal(
            format!("proxy_gap[x={at}]"),
            proxy_gap(report.b_n, report.c_n, cfg.n as f64),
            mc.variance_proxy - mc.standard_variance,
            EQUALITY_SE * gap_se,
        ));
    }
    Ok(rows)
}

fn concentration(cfg: &ScenarioConfig) -> Result<Vec<VerificationRow>, CliError> {
    let sigma_bound = cfg
        .noise
        .bound()
        .ok_or_else(|| CliError::Usage("the concentration suite needs bounded noise".into()))?;
    let b = cfg.regression.bound;
    let trials = cfg.run.tail_replications;
    let mut rows = Vec::new();
    for x in query_points(cfg, "concentration")? {
        let x = x.coords();
        let m = kernel_moments(cfg, x)?;
        let d_n = cfg.n as f64 * m.c_n;
        let preds = run_replications(cfg, x, trials, cfg.master_seed);
        let tails = estimate_tail(&preds, m.b_n, &cfg.run.deltas)?;
        for t in tails {
            let (bound, _) = concentration_envelope(t.delta, b, sigma_bound, d_n)?;
            rows.push(VerificationRow::at_most(
                format!("concentration[x={};delta={}]", label(x), fmt_f64(t.delta)),
                bound,
                t.frequency,
                wilson_upper_slack(t.count, trials, DOMINANCE_SE),
            ));
        }
    }
    Ok(rows)
}

fn bias_grid(cfg: &ScenarioConfig) -> Result<Vec<Vec<f64>>, CliError> {
    if cfg.dimension == 1 && cfg.density.is_compact() {
        let (lo, hi) = cfg.density.bounding_box();
        let grid: Vec<Vec<f64>> = (0..BIAS_GRID)
            .map(|i| vec![lo[0] + (hi[0] - lo[0]) * i as f64 / (BIAS_GRID - 1) as f64])
            .filter(|x| cfg.density.contains(x))
            .collect();
        return Ok(grid);
    }
    Ok(query_points(cfg, "bias")?
        .iter()
        .map(|p| p.coords().to_vec())
        .collect())
}

fn bias(cfg: &ScenarioConfig) -> Result<Vec<VerificationRow>, CliError> {
    let hd = holder(cfg, "bias")?;
    let bound = gnw_core::theory::bias_uniform_bound(hd.l, hd.a, cfg.kernel.m2, cfg.kernel.h);
    let mut rows = Vec::new();
    let mut worst_error = 0.0f64;
    for x in bias_grid(cfg)? {
        let m = kernel_moments(cfg, &x)?;
        worst_error = worst_error.max(m.relative_error());
        rows.push(VerificationRow::at_most(
            format!("bias[x={}]", label(&x)),
            bound,
            (m.b_n - cfg.regression.eval(&x)).abs(),
            m.b_error(),
        ));
    }
    rows.push(VerificationRow::at_most(
        "bias_quadrature_error".into(),
        BIAS_QUADRATURE_TOL,
        worst_error,
        0.0,
    ));
    Ok(rows)
}

pub(crate) fn risk_params(cfg: &ScenarioConfig) -> Result<RiskParams, CliError> {
    let hd = holder(cfg, "risk")?;
    let c = &cfg.constants;
    Ok(RiskParams {
        l: hd.l,
        a: hd.a,
        m1: cfg.kernel.m1,
        m2: cfg.kernel.m2,
        b: cfg.regression.bound,
        sigma_sq: cfg.noise.variance(),
        c0: require(c.c0, "c0", "risk")?,
        r0: require(c.r0, "r0", "risk")?,
        p0: require(c.p0, "p0", "risk")?,
        dim: cfg.dimension,
        n: cfg.n as f64,
        alpha: cfg.kernel.alpha,
        h: cfg.kernel.h,
    })
}

fn risk(cfg: &ScenarioConfig) -> Result<Vec<VerificationRow>, CliError> {
    let params = risk_params(cfg)?;
    let mut rows = Vec::new();
    match cfg.query_points() {
        Some(points) => {
            let bound = pointwise_risk_bound(&params)?;
            for x in points {
                let x = x.coords();
                let rep = estimate_pointwise_risk(cfg, x, cfg.replications, cfg.master_seed)?;
                let (mse, se) = (rep.mse.unwrap_or(f64::NAN), rep.mse_se.unwrap_or(f64::NAN));
                let at = label(x);
                rows.push(VerificationRow::at_most(
                    format!("pointwise_risk[x={at}]"),
                    bound,
                    mse,
                    DOMINANCE_SE * se,
                ));
                let b_n = kernel_moments(cfg, x)?.b_n;
                let bias = b_n - cfg.regression.eval(x);
                rows.push(VerificationRow::at_most(
                    format!("risk_decomposition[x={at}]"),
                    2.0 * (rep.variance_proxy + bias * bias),
                    mse,
                    DOMINANCE_SE * (se + 2.0 * rep.variance_proxy_se),
                ));
            }
        }
        None => {
            let report = integrated_risk_bound(DensityVariant::Uniform, &params, None)?;
            let rep = estimate_integrated_risk(
                cfg,
                cfg.run.outer_replications,
                cfg.run.inner_replications,
                cfg.master_seed,
            )?;
            rows.push(VerificationRow::at_most(
                "integrated_risk".into(),
                report.integrated_bound,
                rep.mse.unwrap_or(f64::NAN),
                DOMINANCE_SE * rep.mse_se.unwrap_or(f64::NAN),
            ));
        }
    }
    Ok(rows)
}

fn degree_ratio(cfg: &ScenarioConfig) -> Result<Vec<VerificationRow>, CliError> {
    let mut rows = Vec::new();
    for x in query_points(cfg, "degree_ratio")? {
        let x = x.coords();
        let ratios = degree_ratio_check(cfg, x, &cfg.run.h_sequence)?;
        let Some(&(h, ratio)) = ratios.last() else {
            return Err(CliError::Usage("run.h_sequence is empty".into()));
        };
        let (lo, hi) = lebesgue_bracket(cfg, x);
        let at = format!("x={};h={}", label(x), fmt_f64(h));
        rows.push(VerificationRow::at_least(
            format!("degree_ratio_lower[{at}]"),
            lo,
            ratio,
            DEGREE_RATIO_TOL * lo,
        ));
        rows.push(VerificationRow::at_most(
            format!("degree_ratio_upper[{at}]"),
            hi,
            ratio,
            DEGREE_RATIO_TOL * hi,
        ));
    }
    Ok(rows)
}

/// Exhaustive decoupling checks for every `n` in `1..=max_n`; the empirical
/// value is the number of violations found.
pub fn run_selftest(max_n: usize) -> Result<Vec<VerificationRow>, CliError> {
    if max_n == 0 {
        return Err(CliError::Usage("selftest needs n >= 1".into()));
    }
    (1..=max_n)
        .map(|n| {
            let report = decoupling_selftest(n)?;
            let violations = if report.passed() { 0.0 } else { 1.0 };
            Ok(VerificationRow::equal(
                format!("decoupling[n={n}]"),
                0.0,
                violations,
                0.0,
            ))
        })
        .collect()
}
