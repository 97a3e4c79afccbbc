//! Closed-form bounds. Probability bounds are clamped to `[0, 1]`; risk
//! bounds are never clamped.

use crate::error::{invalid, Result};
use std::f64::consts::PI;

/// Volume `v_d` of the Euclidean unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // v_d = v_{d-2} * 2 pi / d
    let (mut v, start) = if d % 2 == 0 { (1.0, 2) } else { (2.0, 3) };
    let mut k = start;
    while k <= d {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

/// `(261 B^2 + 65 sigma^2) / d_n`.
pub fn variance_upper_bound(b: f64, sigma_sq: f64, d_n: f64) -> Result<f64> {
    if !(d_n > 0.0) {
        return Err(invalid(format!("d_n = {d_n} violates d_n > 0")));
    }
    Ok((261.0 * b * b + 65.0 * sigma_sq) / d_n)
}

/// `sigma^2 (1 - e^{-d_n})^2 / d_n`.
pub fn variance_lower_bound(sigma_sq: f64, d_n: f64) -> Result<f64> {
    if !(d_n > 0.0) {
        return Err(invalid(format!("d_n = {d_n} violates d_n > 0")));
    }
    if !(sigma_sq >= 0.0) {
        return Err(invalid(format!(
            "sigma^2 = {sigma_sq} violates sigma^2 >= 0"
        )));
    }
    Ok(sigma_sq * (-(-d_n).exp_m1()).powi(2) / d_n)
}

/// Exponent `C(delta, B, sigma)` of the concentration envelope.
///
/// The noise term is dropped when `sigma_bound == 0`.
pub fn concentration_constant(delta: f64, b: f64, sigma_bound: f64) -> f64 {
    let mut c = (3.0 / 14.0_f64).min(6.0 * delta * delta / (192.0 * b * b + delta * b));
    if sigma_bound > 0.0 {
        c = c.min(3.0 * delta * delta / (32.0 * sigma_bound + 96.0 * sigma_bound * sigma_bound));
    }
    c
}

/// `(min(6 exp(-C d_n), 1), C)`: bound on `P(|GNW - b_n| >= delta)` under
/// noise bounded by `sigma_bound` and `|f| <= B`.
pub fn concentration_envelope(
    delta: f64,
    b: f64,
    sigma_bound: f64,
    d_n: f64,
) -> Result<(f64, f64)> {
    if !(delta > 0.0 && b > 0.0 && sigma_bound >= 0.0 && d_n >= 0.0) {
        return Err(invalid(
            "concentration envelope needs delta > 0, B > 0, sigma >= 0, d_n >= 0",
        ));
    }
    let c = concentration_constant(delta, b, sigma_bound);
    Ok(((6.0 * (-c * d_n).exp()).min(1.0), c))
}

/// `min(2 exp(-3 d_n / 14), 1)`: bound on the relative deviation of the
/// empirical degree.
pub fn degree_concentration_bound(d_n: f64) -> f64 {
    (2.0 * (-3.0 * d_n / 14.0).exp()).min(1.0)
}

/// `2 L M2^a h^a`: uniform bound on `|b_n(f, x) - f(x)|` for `f` in the Hölder class.
pub fn bias_uniform_bound(l: f64, a: f64, m2: f64, h: f64) -> f64 {
    2.0 * l * m2.powf(a) * h.powf(a)
}

/// `c0 v_d M1^d n alpha h^d p0 / 2`: guaranteed lower bound on `d_n(x)` under
/// the measure-retaining property (caller ensures `M1 h < r0`).
pub fn degree_lower_bound(
    c0: f64,
    d: usize,
    m1: f64,
    n: f64,
    alpha: f64,
    h: f64,
    p0: f64,
) -> Result<f64> {
    if !(c0 > 0.0 && m1 > 0.0 && n > 0.0 && alpha > 0.0 && h > 0.0 && p0 > 0.0) || d == 0 {
        return Err(invalid(
            "degree lower bound needs c0, M1, n, alpha, h, p0 > 0 and d >= 1",
        ));
    }
    let di = d as i32;
    Ok(c0 * unit_ball_volume(d) * m1.powi(di) * n * alpha * h.powi(di) * p0 / 2.0)
}

/// `b_n^2 (1 - c_n)^{2n}`: the gap between the proxies and the standard
/// variance and squared bias.
pub fn proxy_gap(b_n: f64, c_n: f64, n: f64) -> f64 {
    b_n * b_n * (1.0 - c_n).powf(2.0 * n)
}

/// Constants of one risk bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskParams {
    /// Hölder constant of `f`.
    pub l: f64,
    /// Hölder exponent of `f`.
    pub a: f64,
    pub m1: f64,
    pub m2: f64,
    /// Sup-norm bound of `f`.
    pub b: f64,
    /// Noise variance.
    pub sigma_sq: f64,
    pub c0: f64,
    pub r0: f64,
    pub p0: f64,
    pub dim: usize,
    pub n: f64,
    pub alpha: f64,
    pub h: f64,
}

impl RiskParams {
    fn check(&self) -> Result<()> {
        if !(self.c0 > 0.0
            && self.m1 > 0.0
            && self.n > 0.0
            && self.alpha > 0.0
            && self.h > 0.0
            && self.p0 > 0.0)
            || self.dim == 0
        {
            return Err(invalid(
                "risk bound needs c0, M1, n, alpha, h, p0 > 0 and d >= 1",
            ));
        }
        if !(self.m1 * self.h < self.r0) {
            return Err(invalid(format!(
                "M1 * h = {} violates M1 * h < r0 = {}",
                self.m1 * self.h,
                self.r0
            )));
        }
        Ok(())
    }

    fn noise_numerator(&self) -> f64 {
        1044.0 * self.b * self.b + 260.0 * self.sigma_sq
    }

    /// `4 L^2 M2^{2a}`.
    pub fn bias_constant(&self) -> f64 {
        4.0 * self.l * self.l * self.m2.powf(2.0 * self.a)
    }

    /// `(1044 B^2 + 260 sigma^2) / (c0 v_d M1^d p0)`.
    pub fn variance_constant(&self) -> f64 {
        self.noise_numerator()
            / (self.c0 * unit_ball_volume(self.dim) * self.m1.powi(self.dim as i32) * self.p0)
    }
}

/// `4 L^2 M2^{2a} h^{2a} + (1044 B^2 + 260 sigma^2) / (c0 v_d M1^d n alpha h^d p0)`.
pub fn pointwise_risk_bound(p: &RiskParams) -> Result<f64> {
    p.check()?;
    let di = p.dim as i32;
    let bias = 4.0 * p.l * p.l * p.m2.powf(2.0 * p.a) * p.h.powf(2.0 * p.a);
    let denom =
        p.c0 * unit_ball_volume(p.dim) * p.m1.powi(di) * p.n * p.alpha * p.h.powi(di) * p.p0;
    Ok(bias + p.noise_numerator() / denom)
}

/// Density assumption behind the integrated risk bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityVariant {
    /// Density bounded below by `p0` on a measure-retaining support.
    Uniform,
    /// Density in a Hölder class of exponent `beta`; `sqrt_density_integral`
    /// is `int p^{1/2}`.
    Holder {
        beta: f64,
        sqrt_density_integral: f64,
    },
}

/// `F(h) = C1 h^gamma + C2 / (n alpha h^Delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffCurve {
    pub c1: f64,
    pub c2: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl TradeoffCurve {
    pub fn eval(&self, h: f64, n_alpha: f64) -> f64 {
        self.c1 * h.powf(self.gamma) + self.c2 / (n_alpha * h.powf(self.delta))
    }
}

/// Bounds reported for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskBoundReport {
    pub pointwise_bound: f64,
    pub integrated_bound: f64,
    pub holder_integrated_bound: Option<f64>,
    pub curve: TradeoffCurve,
    pub bandwidth_interval: Option<(f64, f64)>,
    pub rate_bound: Option<f64>,
}

/// Integrated risk bound for the chosen density variant, and, when `epsilon`
/// is given, the bandwidths that guarantee risk at most `epsilon`.
pub fn integrated_risk_bound(
    variant: DensityVariant,
    p: &RiskParams,
    epsilon: Option<f64>,
) -> Result<RiskBoundReport> {
    let pointwise = pointwise_risk_bound(p)?;
    let (curve, holder) = match variant {
        DensityVariant::Uniform => (
            TradeoffCurve {
                c1: p.bias_constant(),
                c2: p.variance_constant(),
                gamma: 2.0 * p.a,
                delta: p.dim as f64,
            },
            None,
        ),
        DensityVariant::Holder {
            beta,
            sqrt_density_integral,
        } => {
            let limit = (p.r0 / p.m1).min(1.0);
            if !(p.h < limit) {
                return Err(invalid(format!(
                    "h = {} violates h < min(r0 / M1, 1) = {limit}",
                    p.h
                )));
            }
            if !(beta > 0.0) {
                return Err(invalid(format!("beta = {beta} violates beta > 0")));
            }
            if !(sqrt_density_integral.is_finite() && sqrt_density_integral > 0.0) {
                return Err(invalid("int p^(1/2) must be finite and positive"));
            }
            if !(p.l > 0.0) {
                return Err(invalid("the density-Hölder bound needs L > 0"));
            }
            let di = p.dim as f64;
            let c1 = p
                .bias_constant()
                .max(4.0 * p.b * p.b * p.l.sqrt() * p.m1.powf(beta / 2.0) * sqrt_density_integral);
            let c2 =
                p.noise_numerator() / (p.c0 * unit_ball_volume(p.dim) * p.l * p.m1.powf(di + beta));
            let curve = TradeoffCurve {
                c1,
                c2,
                gamma: (2.0 * p.a).min(beta / 2.0),
                delta: di + beta,
            };
            let value = curve.eval(p.h, p.n * p.alpha);
            (curve, Some(value))
        }
    };
    let (bandwidth_interval, rate_bound) = match epsilon {
        Some(eps) => {
            let range = bandwidth_admissible_range(curve, p.n * p.alpha, eps)?;
            (range.interval, Some(range.rate_bound))
        }
        None => (None, None),
    };
    Ok(RiskBoundReport {
        pointwise_bound: pointwise,
        integrated_bound: pointwise,
        holder_integrated_bound: holder,
        curve,
        bandwidth_interval,
        rate_bound,
    })
}

/// Admissible bandwidths for a target risk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleBandwidth {
    /// `[lo, hi]` with `F(h) <= epsilon` throughout, or `None` when empty.
    pub interval: Option<(f64, f64)>,
    /// `2 C1^{Delta/(Delta+gamma)} C2^{gamma/(Delta+gamma)} / (n alpha)^{gamma/(Delta+gamma)}`.
    pub rate_bound: f64,
}

/// Relative gap below which `lo > hi` is treated as rounding and the
/// interval is reported as the single point `hi`.
const DEGENERATE_TOLERANCE: f64 = 1e-12;

/// `lo = (2 C2 / (n alpha eps))^{1/Delta}`, `hi = (eps / (2 C1))^{1/gamma}`.
pub fn bandwidth_admissible_range(
    curve: TradeoffCurve,
    n_alpha: f64,
    epsilon: f64,
) -> Result<AdmissibleBandwidth> {
    let TradeoffCurve {
        c1,
        c2,
        gamma,
        delta,
    } = curve;
    if !(c1 > 0.0 && c2 > 0.0 && gamma > 0.0 && delta > 0.0 && n_alpha > 0.0 && epsilon > 0.0) {
        return Err(invalid(
            "bandwidth range needs C1, C2, gamma, Delta, n alpha, epsilon > 0",
        ));
    }
    let lo = (2.0 * c2 / (n_alpha * epsilon)).powf(1.0 / delta);
    let hi = (epsilon / (2.0 * c1)).powf(1.0 / gamma);
    let interval = if lo <= hi {
        Some((lo, hi))
    } else if (lo - hi) <= DEGENERATE_TOLERANCE * hi {
        Some((hi, hi))
    } else {
        None
    };
    let s = delta + gamma;
    let rate_bound = 2.0 * c1.powf(delta / s) * c2.powf(gamma / s) / n_alpha.powf(gamma / s);
    Ok(AdmissibleBandwidth {
        interval,
        rate_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(0), 1.0);
        assert_eq!(unit_ball_volume(1), 2.0);
        assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-15);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn variance_examples() {
        assert_eq!(variance_upper_bound(1.0, 1.0, 1.0).unwrap(), 326.0);
        assert_eq!(variance_upper_bound(1.0, 0.0, 261.0).unwrap(), 1.0);
        assert_eq!(variance_upper_bound(0.0, 0.0, 5.0).unwrap(), 0.0);
        assert!(variance_upper_bound(1.0, 1.0, 0.0).is_err());
        let exact = (1.0 - (-5.0f64).exp()).powi(2) / 5.0;
        assert_relative_eq!(
            variance_lower_bound(1.0, 5.0).unwrap(),
            exact,
            max_relative = 1e-14
        );
        assert!((variance_lower_bound(1.0, 5.0).unwrap() - 0.1973146).abs() < 1e-6);
        assert_eq!(variance_lower_bound(0.0, 5.0).unwrap(), 0.0);
        assert!((variance_lower_bound(1.0, 100.0).unwrap() - 0.01).abs() < 1e-6);
        assert!(variance_lower_bound(1.0, -1.0).is_err());
    }

    #[test]
    fn concentration_examples() {
        let (_, c) = concentration_envelope(0.5, 1.0, 0.5, 10.0).unwrap();
        assert_relative_eq!(c, 6.0 * 0.25 / (192.0 + 0.5), max_relative = 1e-15);
        assert!((c - 0.00779221).abs() < 1e-8);
        assert_eq!(concentration_envelope(0.5, 1.0, 0.5, 0.0).unwrap().0, 1.0);
        // huge delta, tiny B: every branch above 3/14
        let (p, c) = concentration_envelope(100.0, 1e-3, 0.0, 14.0).unwrap();
        assert_eq!(c, 3.0 / 14.0);
        assert_relative_eq!(p, 6.0 * (-3.0f64).exp(), max_relative = 1e-14);
        assert!((p - 0.2987224).abs() < 1e-7);
    }

    #[test]
    fn degree_concentration_examples() {
        assert_eq!(degree_concentration_bound(0.0), 1.0);
        assert_relative_eq!(
            degree_concentration_bound(14.0 / 3.0),
            2.0 * (-1.0f64).exp(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            degree_concentration_bound(140.0),
            2.0 * (-30.0f64).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn bias_and_degree_examples() {
        assert_relative_eq!(
            bias_uniform_bound(1.0, 1.0, 1.0, 0.05),
            0.1,
            max_relative = 1e-15
        );
        assert_eq!(bias_uniform_bound(0.0, 1.0, 1.0, 0.05), 0.0);
        assert_relative_eq!(
            bias_uniform_bound(1.0, 0.5, 1.0, 0.04),
            0.4,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            degree_lower_bound(1.0, 1, 1.0, 1000.0, 1.0, 0.05, 1.0).unwrap(),
            50.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            degree_lower_bound(1.0, 1, 1.0, 1000.0, 0.5, 0.05, 1.0).unwrap(),
            25.0,
            max_relative = 1e-14
        );
        assert!(degree_lower_bound(0.0, 1, 1.0, 1000.0, 0.5, 0.05, 1.0).is_err());
    }

    #[test]
    fn proxy_gap_examples() {
        assert_relative_eq!(
            proxy_gap(1.0, 0.2, 10.0),
            0.8f64.powi(20),
            max_relative = 1e-14
        );
        assert!((proxy_gap(1.0, 0.2, 10.0) - 0.0115292).abs() < 1e-7);
        assert_eq!(proxy_gap(1.0, 1.0, 10.0), 0.0);
        assert_eq!(proxy_gap(0.0, 0.3, 10.0), 0.0);
    }

    fn example_params(h: f64) -> RiskParams {
        RiskParams {
            l: 1.0,
            a: 1.0,
            m1: 1.0,
            m2: 1.0,
            b: 1.0,
            sigma_sq: 1.0,
            c0: 1.0,
            r0: 1.0,
            p0: 1.0,
            dim: 1,
            n: 1000.0,
            alpha: 1.0,
            h,
        }
    }

    #[test]
    fn pointwise_examples() {
        assert_relative_eq!(
            pointwise_risk_bound(&example_params(0.1)).unwrap(),
            6.56,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            pointwise_risk_bound(&example_params(0.01)).unwrap(),
            65.2004,
            max_relative = 1e-14
        );
        let zero = RiskParams {
            l: 0.0,
            b: 0.0,
            sigma_sq: 0.0,
            ..example_params(0.1)
        };
        assert_eq!(pointwise_risk_bound(&zero).unwrap(), 0.0);
        let err = pointwise_risk_bound(&example_params(2.0)).unwrap_err();
        assert!(err.to_string().contains("M1 * h"));
    }

    #[test]
    fn integrated_examples() {
        let rep =
            integrated_risk_bound(DensityVariant::Uniform, &example_params(0.1), None).unwrap();
        assert_relative_eq!(rep.integrated_bound, 6.56, max_relative = 1e-14);
        assert!(rep.holder_integrated_bound.is_none());
        let holder = DensityVariant::Holder {
            beta: 1.0,
            sqrt_density_integral: 1.0,
        };
        let rep = integrated_risk_bound(holder, &example_params(0.1), Some(10.0)).unwrap();
        let curve = rep.curve;
        assert_eq!(curve.gamma, 0.5);
        assert_eq!(curve.delta, 2.0);
        assert_relative_eq!(curve.c1, 4.0, max_relative = 1e-15);
        assert_relative_eq!(curve.c2, 1304.0 / 2.0, max_relative = 1e-15);
        assert_relative_eq!(
            rep.holder_integrated_bound.unwrap(),
            curve.eval(0.1, 1000.0),
            max_relative = 1e-15
        );
        assert!(rep.rate_bound.is_some());
        let err = integrated_risk_bound(
            holder,
            &RiskParams {
                r0: 10.0,
                ..example_params(1.5)
            },
            None,
        )
        .unwrap_err();
        assert!(err.to_string().contains("min(r0 / M1, 1)"));
    }

    #[test]
    fn bandwidth_examples() {
        let curve = TradeoffCurve {
            c1: 1.0,
            c2: 1.0,
            gamma: 1.0,
            delta: 1.0,
        };
        let r = bandwidth_admissible_range(curve, 100.0, 0.4).unwrap();
        let (lo, hi) = r.interval.unwrap();
        assert_relative_eq!(lo, 0.05, max_relative = 1e-14);
        assert_relative_eq!(hi, 0.2, max_relative = 1e-14);
        assert_relative_eq!(curve.eval(0.1, 100.0), 0.2, max_relative = 1e-14);
        assert_relative_eq!(r.rate_bound, 0.2, max_relative = 1e-14);
        assert!(bandwidth_admissible_range(curve, 100.0, 0.19)
            .unwrap()
            .interval
            .is_none());
        let (lo, hi) = bandwidth_admissible_range(curve, 100.0, 0.2)
            .unwrap()
            .interval
            .unwrap();
        assert_eq!(lo, hi);
        assert_relative_eq!(lo, 0.1, max_relative = 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn lower_below_upper(b in 0.0f64..5.0, s in 0.0f64..5.0, d in 1e-3f64..1e4) {
            prop_assert!(variance_lower_bound(s, d).unwrap() <= variance_upper_bound(b, s, d).unwrap());
        }

        #[test]
        fn envelope_monotone(delta in 0.01f64..3.0, b in 0.1f64..3.0, s in 0.0f64..2.0,
                             d in 0.0f64..500.0, dd in 0.0f64..100.0, shrink in 0.1f64..1.0) {
            let (p, _) = concentration_envelope(delta, b, s, d).unwrap();
            let (p_more, _) = concentration_envelope(delta, b, s, d + dd).unwrap();
            let (p_small, _) = concentration_envelope(delta * shrink, b, s, d).unwrap();
            prop_assert!(p_more <= p);
            prop_assert!(p_small >= p);
        }

        #[test]
        fn admissible_bandwidths_meet_target(c1 in 0.01f64..10.0, c2 in 0.01f64..10.0,
                                             gamma in 0.1f64..2.0, delta in 0.5f64..4.0,
                                             log_na in 1.0f64..8.0, eps in 0.01f64..5.0) {
            let curve = TradeoffCurve { c1, c2, gamma, delta };
            let na = 10f64.powf(log_na);
            let r = bandwidth_admissible_range(curve, na, eps).unwrap();
            if let Some((lo, hi)) = r.interval {
                for h in [lo, hi, 0.5 * (lo + hi)] {
                    prop_assert!(curve.eval(h, na) <= eps * (1.0 + 1e-12));
                }
                prop_assert!(r.rate_bound <= eps * (1.0 + 1e-12));
            } else {
                prop_assert!(r.rate_bound > eps * (1.0 - 1e-9));
            }
        }

        #[test]
        fn pointwise_matches_composition(l in 0.0f64..3.0, a in 0.05f64..1.0, m1 in 0.1f64..1.0,
                                         extra in 0.0f64..1.0, b in 0.0f64..3.0, s in 0.0f64..3.0,
                                         c0 in 0.05f64..1.0, dim in 1usize..4, n in 1.0f64..1e5,
                                         alpha in 0.01f64..1.0, h in 1e-3f64..0.5, p0 in 0.05f64..2.0) {
            let p = RiskParams { l, a, m1, m2: m1 + extra, b, sigma_sq: s, c0, r0: 1.0, p0, dim, n, alpha, h };
            let direct = pointwise_risk_bound(&p).unwrap();
            let d_low = degree_lower_bound(c0, dim, m1, n, alpha, h, p0).unwrap();
            let composed = bias_uniform_bound(l, a, p.m2, h).powi(2) + 2.0 * variance_upper_bound(b, s, d_low).unwrap();
            prop_assert!((direct - composed).abs() <= 1e-12 * direct.abs().max(1e-300));
        }
    }
}
