//! Analytic quantities at a query point: the local connection parameter
//! `c_n(x)`, the local degree, the smoothed value `b_n(f, x)`, the expectation
//! of the estimator, and the bounds of [`bounds`].

pub mod bounds;
pub mod geometry;

pub use bounds::{
    bandwidth_admissible_range, bias_uniform_bound, concentration_constant, concentration_envelope,
    degree_concentration_bound, degree_lower_bound, integrated_risk_bound, pointwise_risk_bound,
    proxy_gap, unit_ball_volume, variance_lower_bound, variance_upper_bound, AdmissibleBandwidth,
    DensityVariant, RiskBoundReport, RiskParams, TradeoffCurve,
};
pub use geometry::{ball_ball_volume, ball_box_volume, measure_retaining_estimate, RatioEstimate};

use crate::config::ScenarioConfig;
use crate::error::{invalid, Result};
use crate::model::{chord_half_width, distance, BaseKernel, DensitySpec, Point};
use crate::quadrature::{integrate, qmc_integrate, Estimate, QuadOptions, Sections};

/// Target relative accuracy of the kernel integrals.
pub const QUAD_REL_TOL: f64 = 1e-10;
const QMC_LOG2_POINTS: u32 = 16;

/// `c_n(x)`, `T_{k_n}(f, x)` and `b_n(f, x)` with integration error estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMoments {
    pub c_n: f64,
    pub t_f: f64,
    pub b_n: f64,
    /// Absolute error estimate of `c_n` (zero for closed forms).
    pub c_error: f64,
    /// Absolute error estimate of `T_f`.
    pub t_error: f64,
    /// `T_{k_n}(|f|, x)`, the scale for the error of `T_f`.
    pub t_magnitude: f64,
}

impl KernelMoments {
    /// Largest relative error of `c_n` and `T_f`.
    pub fn relative_error(&self) -> f64 {
        let rel = |v: f64, e: f64| if v == 0.0 { e } else { e / v.abs() };
        rel(self.c_n, self.c_error).max(rel(self.t_magnitude, self.t_error))
    }

    /// Error bound of `b_n = T_f / c_n` from first-order propagation.
    pub fn b_error(&self) -> f64 {
        if self.c_n == 0.0 {
            return 0.0;
        }
        (self.t_error + self.b_n.abs() * self.c_error) / self.c_n
    }
}

/// Iterated sections of `B(x, R) n box(Q)`, with cuts at kernel breakpoint
/// radii and at the non-smooth points of `p` and `f`.
struct KernelWindow<'a> {
    cfg: &'a ScenarioConfig,
    x: &'a [f64],
    radius: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Sections for KernelWindow<'_> {
    fn dim(&self) -> usize {
        self.x.len()
    }

    fn section(&self, prefix: &[f64], cuts: &mut Vec<f64>) -> Option<(f64, f64)> {
        let k = prefix.len();
        let w = chord_half_width(self.x, self.radius, prefix)?;
        let lo = (self.x[k] - w).max(self.lo[k]);
        let hi = (self.x[k] + w).min(self.hi[k]);
        if !(hi > lo) {
            return None;
        }
        for r in self.cfg.kernel.scaled_breakpoints() {
            if let Some(w) = chord_half_width(self.x, r, prefix) {
                cuts.push(self.x[k] - w);
                cuts.push(self.x[k] + w);
            }
        }
        self.cfg.density.section_cuts(prefix, cuts);
        self.cfg.regression.section_cuts(prefix, cuts);
        Some((lo, hi))
    }
}

fn kernel_radius(cfg: &ScenarioConfig) -> f64 {
    cfg.kernel.scaled_breakpoints().fold(0.0, f64::max)
}

/// Closed-form `c_n` for the indicator kernel on uniform densities.
fn closed_form_connection(cfg: &ScenarioConfig, x: &[f64]) -> Option<f64> {
    if cfg.kernel.base != BaseKernel::Indicator {
        return None;
    }
    let h = cfg.kernel.h;
    let d = x.len();
    match &cfg.density {
        DensitySpec::UniformCube { lo, hi } => {
            let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
            ball_box_volume(x, h, lo, hi).map(|v| cfg.kernel.alpha * v / vol)
        }
        DensitySpec::UniformBall { center, radius } => {
            let vol = unit_ball_volume(d) * radius.powi(d as i32);
            ball_ball_volume(d, h, *radius, distance(x, center.coords()))
                .map(|v| cfg.kernel.alpha * v / vol)
        }
        _ => None,
    }
}

fn check_query(cfg: &ScenarioConfig, x: &[f64]) -> Result<()> {
    if x.len() != cfg.dimension {
        return Err(invalid(format!(
            "query point has dimension {}, expected {}",
            x.len(),
            cfg.dimension
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(invalid("query point must be finite"));
    }
    Ok(())
}

/// Computes `c_n`, `T_f` and `b_n` at `x`.
///
/// The indicator kernel on uniform densities uses closed-form intersection
/// volumes for `c_n`; a constant `f` gives `T_f = f c_n` and `b_n = f`.
/// Everything else is integrated over the kernel window: adaptive
/// Gauss-Legendre for `d <= 3`, Halton quasi-Monte Carlo above.
pub fn kernel_moments(cfg: &ScenarioConfig, x: &[f64]) -> Result<KernelMoments> {
    check_query(cfg, x)?;
    let closed = closed_form_connection(cfg, x);
    let constant = cfg.regression.is_constant();
    if let (Some(c_n), Some(v)) = (closed, constant) {
        return Ok(KernelMoments {
            c_n,
            t_f: v * c_n,
            b_n: if c_n > 0.0 { v } else { 0.0 },
            c_error: 0.0,
            t_error: 0.0,
            t_magnitude: v.abs() * c_n,
        });
    }

    let integrand = |z: &[f64]| {
        let kp = cfg.kernel.scaled_value(x, z) * cfg.density.value(z);
        [kp, kp * cfg.regression.eval(z)]
    };
    let radius = kernel_radius(cfg);
    let (blo, bhi) = cfg.density.bounding_box();
    let est = if x.len() <= 3 {
        let window = KernelWindow {
            cfg,
            x,
            radius,
            lo: blo,
            hi: bhi,
        };
        integrate(
            &window,
            integrand,
            QuadOptions {
                rel_tol: QUAD_REL_TOL,
                abs_tol: 1e-300,
            },
        )?
    } else {
        let lo: Vec<f64> = x
            .iter()
            .zip(&blo)
            .map(|(c, b)| (c - radius).max(*b))
            .collect();
        let hi: Vec<f64> = x
            .iter()
            .zip(&bhi)
            .map(|(c, b)| (c + radius).min(*b))
            .collect();
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            Estimate {
                value: [0.0; 2],
                error: [0.0; 2],
                magnitude: [0.0; 2],
            }
        } else {
            qmc_integrate(&lo, &hi, integrand, QMC_LOG2_POINTS)
        }
    };

    let (c_n, c_error) = match closed {
        Some(c) => (c, 0.0),
        None => (est.value[0], est.error[0]),
    };
    let (t_f, t_error, t_magnitude) = match constant {
        Some(v) => (v * c_n, v.abs() * c_error, v.abs() * c_n),
        None => (est.value[1], est.error[1], est.magnitude[1]),
    };
    let b_n = if c_n > 0.0 {
        constant.unwrap_or((t_f / c_n).clamp(-cfg.regression.bound, cfg.regression.bound))
    } else {
        0.0
    };
    Ok(KernelMoments {
        c_n,
        t_f,
        b_n,
        c_error,
        t_error,
        t_magnitude,
    })
}

/// `(c_n(x), estimated absolute error)`.
pub fn local_connection(cfg: &ScenarioConfig, x: &[f64]) -> Result<(f64, f64)> {
    let m = kernel_moments(cfg, x)?;
    Ok((m.c_n, m.c_error))
}

/// `d_n(x) = n c_n(x)`.
pub fn local_degree(cfg: &ScenarioConfig, x: &[f64], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    Ok(n as f64 * local_connection(cfg, x)?.0)
}

/// `b_n(f, x) = T_{k_n}(f, x) / c_n(x)`, or `0` when `c_n(x) = 0`.
pub fn smoothed_value(cfg: &ScenarioConfig, x: &[f64]) -> Result<f64> {
    Ok(kernel_moments(cfg, x)?.b_n)
}

/// `b_n (1 - (1 - c_n)^n)` from precomputed quantities.
pub fn expectation_from(b_n: f64, c_n: f64, n: usize) -> f64 {
    b_n * (1.0 - (1.0 - c_n).powf(n as f64))
}

/// `E[GNW(x)] = b_n(f, x) (1 - (1 - c_n(x))^n)`.
pub fn expectation_gnw(cfg: &ScenarioConfig, x: &[f64], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    let m = kernel_moments(cfg, x)?;
    Ok(expectation_from(m.b_n, m.c_n, n))
}

/// Analytic quantities at one query point for the scenario's `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryReport {
    pub x: Point,
    pub c_n: f64,
    pub d_n: f64,
    pub t_f: f64,
    pub b_n: f64,
    /// `b_n - f(x)`.
    pub bias_proxy: f64,
    pub expectation_gnw: f64,
    /// `None` when `d_n = 0`.
    pub variance_upper: Option<f64>,
    /// `None` when `d_n = 0`.
    pub variance_lower: Option<f64>,
    /// Present when the regression function declares a Hölder class.
    pub bias_bound: Option<f64>,
    /// `(1 - c_n)^n`.
    pub empty_prob: f64,
    /// Estimated relative integration error.
    pub quadrature_error: f64,
}

pub fn theory_report(cfg: &ScenarioConfig, x: &[f64]) -> Result<TheoryReport> {
    let m = kernel_moments(cfg, x)?;
    let n = cfg.n;
    let d_n = n as f64 * m.c_n;
    let b = cfg.regression.bound;
    let sigma_sq = cfg.noise.variance();
    let (variance_upper, variance_lower) = if d_n > 0.0 {
        (
            Some(variance_upper_bound(b, sigma_sq, d_n)?),
            Some(variance_lower_bound(sigma_sq, d_n)?),
        )
    } else {
        (None, None)
    };
    Ok(TheoryReport {
        x: Point::from(x.to_vec()),
        c_n: m.c_n,
        d_n,
        t_f: m.t_f,
        b_n: m.b_n,
        bias_proxy: m.b_n - cfg.regression.eval(x),
        expectation_gnw: expectation_from(m.b_n, m.c_n, n),
        variance_upper,
        variance_lower,
        bias_bound: cfg
            .regression
            .holder
            .map(|hd| bias_uniform_bound(hd.l, hd.a, cfg.kernel.m2, cfg.kernel.h)),
        empty_prob: (1.0 - m.c_n).powf(n as f64),
        quadrature_error: m.relative_error(),
    })
}

/// `(h, c_n(x) / (alpha h^d))` for each bandwidth, i.e. `d_n / (n alpha h^d)`.
pub fn degree_ratio_check(
    cfg: &ScenarioConfig,
    x: &[f64],
    h_sequence: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if h_sequence.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("h_sequence must be strictly decreasing"));
    }
    let mut scaled = cfg.clone();
    let d = cfg.dimension as i32;
    h_sequence
        .iter()
        .map(|&h| {
            if !(h > 0.0) {
                return Err(invalid(format!("h = {h} violates h > 0")));
            }
            scaled.kernel.h = h;
            let (c_n, _) = local_connection(&scaled, x)?;
            Ok((h, c_n / (cfg.kernel.alpha * h.powi(d))))
        })
        .collect()
}

/// Limits `[v_d M1^d p(x) / 2, v_d M2^d p(x)]` of the degree ratio as `h -> 0`.
pub fn lebesgue_bracket(cfg: &ScenarioConfig, x: &[f64]) -> (f64, f64) {
    let d = cfg.dimension;
    let v = unit_ball_volume(d) * cfg.density.value(x);
    (
        0.5 * v * cfg.kernel.m1.powi(d as i32),
        v * cfg.kernel.m2.powi(d as i32),
    )
}

/// `int p^{1/2}` with its estimated absolute error.
pub fn integral_sqrt_density(density: &DensitySpec) -> Result<(f64, f64)> {
    let (lo, hi) = density.bounding_box();
    let d = lo.len();
    let integrand = |z: &[f64]| [density.value(z).sqrt()];
    let est = if d <= 3 {
        let domain = DensityBox { density, lo, hi };
        integrate(&domain, integrand, QuadOptions::default())?
    } else {
        qmc_integrate(&lo, &hi, integrand, QMC_LOG2_POINTS)
    };
    Ok((est.value[0], est.error[0]))
}

/// `int p` over its bounding box; `1` up to integration error.
pub fn density_mass(density: &DensitySpec) -> Result<(f64, f64)> {
    let (lo, hi) = density.bounding_box();
    let domain = DensityBox { density, lo, hi };
    let est = integrate(&domain, |z| [density.value(z)], QuadOptions::default())?;
    Ok((est.value[0], est.error[0]))
}

struct DensityBox<'a> {
    density: &'a DensitySpec,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Sections for DensityBox<'_> {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn section(&self, prefix: &[f64], cuts: &mut Vec<f64>) -> Option<(f64, f64)> {
        let k = prefix.len();
        self.density.section_cuts(prefix, cuts);
        Some((self.lo[k], self.hi[k]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{KernelSpec, RegressionSpec};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn uniform(alpha: f64, h: f64, f: RegressionSpec) -> ScenarioConfig {
        ScenarioConfig::uniform_interval(10, alpha, h, f)
    }

    #[test]
    fn connection_examples() {
        let cfg = uniform(1.0, 0.1, RegressionSpec::constant(1.0));
        assert_relative_eq!(
            local_connection(&cfg, &[0.5]).unwrap().0,
            0.2,
            max_relative = 1e-15
        );
        let half = uniform(0.5, 0.1, RegressionSpec::constant(1.0));
        assert_relative_eq!(
            local_connection(&half, &[0.5]).unwrap().0,
            0.1,
            max_relative = 1e-15
        );
        assert_eq!(local_connection(&cfg, &[3.0]).unwrap().0, 0.0);
        assert_relative_eq!(
            local_degree(&half, &[0.5], 1000).unwrap(),
            100.0,
            max_relative = 1e-14
        );
        assert!(local_connection(&cfg, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn smoothed_examples() {
        let id = uniform(1.0, 0.1, RegressionSpec::identity(1.0));
        assert_relative_eq!(
            smoothed_value(&id, &[0.5]).unwrap(),
            0.5,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            smoothed_value(&id, &[0.0]).unwrap(),
            0.05,
            max_relative = 1e-12
        );
        let one = uniform(1.0, 0.1, RegressionSpec::constant(1.0));
        assert_eq!(smoothed_value(&one, &[0.37]).unwrap(), 1.0);
        assert_eq!(smoothed_value(&one, &[7.0]).unwrap(), 0.0);
    }

    #[test]
    fn expectation_examples() {
        let one = uniform(1.0, 0.1, RegressionSpec::constant(1.0));
        assert!((expectation_gnw(&one, &[0.5], 10).unwrap() - 0.8926258176).abs() < 1e-10);
        let id = uniform(1.0, 0.1, RegressionSpec::identity(1.0));
        assert!((expectation_gnw(&id, &[0.5], 10).unwrap() - 0.4463129088).abs() < 1e-10);
        assert_eq!(expectation_gnw(&one, &[5.0], 10).unwrap(), 0.0);
        let c = uniform(1.0, 0.1, RegressionSpec::constant(0.3));
        let (c_n, _) = local_connection(&c, &[0.2]).unwrap();
        assert_eq!(
            expectation_gnw(&c, &[0.2], 7).unwrap(),
            0.3 * (1.0 - (1.0 - c_n).powf(7.0))
        );
    }

    #[test]
    fn triangle_window_by_quadrature() {
        let mut cfg = uniform(1.0, 0.1, RegressionSpec::identity(1.0));
        cfg.kernel = KernelSpec::new(BaseKernel::Triangle, 1.0, 0.1);
        let m = kernel_moments(&cfg, &[0.5]).unwrap();
        assert_relative_eq!(m.c_n, 0.15, max_relative = 1e-10);
        assert_relative_eq!(m.b_n * m.c_n, m.t_f, max_relative = 1e-12);
        assert!(m.relative_error() < 1e-8);
    }

    #[test]
    fn half_plateau_on_disc_matches_lens_volumes() {
        let mut cfg = uniform(1.0, 0.1, RegressionSpec::constant(1.0));
        cfg.dimension = 2;
        cfg.density = DensitySpec::UniformBall {
            center: Point::from(vec![0.0, 0.0]),
            radius: 1.0,
        };
        cfg.kernel = KernelSpec::new(BaseKernel::HalfPlateau, 0.8, 0.1);
        let x = [0.95, 0.0];
        let want = 0.8
            * 0.5
            * (ball_ball_volume(2, 0.05, 1.0, 0.95).unwrap()
                + ball_ball_volume(2, 0.1, 1.0, 0.95).unwrap())
            / PI;
        let (c_n, err) = local_connection(&cfg, &x).unwrap();
        assert_relative_eq!(c_n, want, max_relative = 1e-8);
        assert!(err / c_n < 1e-6);
    }

    #[test]
    fn cube_corner_quadrature_matches_quarter_disc() {
        let mut cfg = uniform(1.0, 0.1, RegressionSpec::identity(1.0));
        cfg.dimension = 2;
        cfg.density = DensitySpec::unit_cube(2);
        cfg.regression = RegressionSpec {
            function: crate::model::RegressionFunction::Linear {
                slope: vec![1.0, 0.0],
                intercept: 0.0,
            },
            bound: 1.0,
            holder: None,
        };
        cfg.kernel = KernelSpec::new(BaseKernel::HalfPlateau, 1.0, 0.2);
        let m = kernel_moments(&cfg, &[0.0, 0.0]).unwrap();
        let want = 0.5 * (PI * 0.01 + PI * 0.04) / 4.0;
        assert_relative_eq!(m.c_n, want, max_relative = 1e-8);
        // first moment of a quarter disc of radius r: r^3 / 3
        let t = 0.5 * (0.1f64.powi(3) + 0.2f64.powi(3)) / 3.0;
        assert_relative_eq!(m.t_f, t, max_relative = 1e-8);
    }

    #[test]
    fn degree_ratio_examples() {
        let cfg = uniform(1.0, 0.1, RegressionSpec::constant(1.0));
        let r = degree_ratio_check(&cfg, &[0.5], &[0.1, 0.01]).unwrap();
        assert_relative_eq!(r[1].1, 2.0, max_relative = 1e-12);
        let r = degree_ratio_check(&cfg, &[0.0], &[0.01]).unwrap();
        assert_relative_eq!(r[0].1, 1.0, max_relative = 1e-12);
        assert!(degree_ratio_check(&cfg, &[0.5], &[0.01, 0.1]).is_err());

        let mut g = cfg.clone();
        g.density = DensitySpec::standard_gaussian(1);
        let r = degree_ratio_check(&g, &[0.0], &[0.1, 0.01, 0.001]).unwrap();
        let target = 2.0 / (2.0 * PI).sqrt();
        assert!((r[2].1 / target - 1.0).abs() < 0.01);
        let (lo, hi) = lebesgue_bracket(&g, &[0.0]);
        assert_relative_eq!(lo, 0.5 * target, max_relative = 1e-14);
        assert_relative_eq!(hi, target, max_relative = 1e-14);
    }

    #[test]
    fn sqrt_density_of_standard_gaussian() {
        let (v, err) = integral_sqrt_density(&DensitySpec::standard_gaussian(1)).unwrap();
        let exact = 2f64.powf(0.75) * PI.powf(0.25);
        assert_relative_eq!(v, exact, max_relative = 1e-9);
        assert!(err < 1e-6);
    }

    #[test]
    fn densities_have_unit_mass() {
        let specs = [
            DensitySpec::unit_interval(),
            DensitySpec::unit_cube(3),
            DensitySpec::standard_gaussian(2),
            DensitySpec::UniformBall {
                center: Point::from(vec![0.5, -1.0, 2.0]),
                radius: 0.7,
            },
            DensitySpec::Mixture(vec![
                (0.3, DensitySpec::unit_interval()),
                (
                    0.7,
                    DensitySpec::Gaussian {
                        mean: Point::scalar(2.0),
                        stddev: 0.5,
                    },
                ),
            ]),
        ];
        for p in &specs {
            let (mass, _) = density_mass(p).unwrap();
            assert!((mass - 1.0).abs() < 1e-6, "{p:?}: {mass}");
        }
    }

    #[test]
    fn report_fields_are_consistent() {
        let mut cfg = uniform(0.7, 0.05, RegressionSpec::identity(1.0));
        cfg.n = 40;
        cfg.noise = crate::model::NoiseSpec::Gaussian { stddev: 0.5 };
        let r = theory_report(&cfg, &[0.3]).unwrap();
        assert_relative_eq!(r.d_n, 40.0 * r.c_n, max_relative = 1e-15);
        assert_relative_eq!(r.b_n * r.c_n, r.t_f, max_relative = 1e-12);
        assert!(r.variance_lower.unwrap() <= r.variance_upper.unwrap());
        assert!((0.0..=1.0).contains(&r.empty_prob));
        assert_relative_eq!(r.bias_bound.unwrap(), 0.1, max_relative = 1e-14);
        let far = theory_report(&cfg, &[9.0]).unwrap();
        assert!(far.variance_upper.is_none());
        assert_eq!(far.empty_prob, 1.0);
    }
}
