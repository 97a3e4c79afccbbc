use super::{distance, Point};
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Built-in regression functions `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RegressionFunction {
    Constant {
        value: f64,
    },
    /// `slope . x + intercept`.
    Linear {
        slope: Vec<f64>,
        intercept: f64,
    },
    /// `amplitude * sin(2 pi frequency x_1 + phase)`.
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// `min(l * |x - center|^a, B)`.
    HolderCusp {
        l: f64,
        a: f64,
        center: Point,
    },
}

/// Declared Hölder regularity `|f(x) - f(z)| <= l |x - z|^a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderDecl {
    pub a: f64,
    pub l: f64,
}

/// Regression function with its declared sup-norm bound `B` and optional Hölder class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionSpec {
    pub function: RegressionFunction,
    pub bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder: Option<HolderDecl>,
}

impl RegressionSpec {
    pub fn constant(value: f64) -> Self {
        RegressionSpec {
            function: RegressionFunction::Constant { value },
            bound: value.abs().max(f64::MIN_POSITIVE),
            holder: Some(HolderDecl { a: 1.0, l: 0.0 }),
        }
    }

    /// `f(x) = x` in one dimension, bounded by `bound` on the domain of interest.
    pub fn identity(bound: f64) -> Self {
        RegressionSpec {
            function: RegressionFunction::Linear {
                slope: vec![1.0],
                intercept: 0.0,
            },
            bound,
            holder: Some(HolderDecl { a: 1.0, l: 1.0 }),
        }
    }

    /// `A sin(2 pi omega x_1 + phi)`, Lipschitz with constant `2 pi |A| omega`.
    pub fn sinusoid(amplitude: f64, frequency: f64, phase: f64) -> Self {
        RegressionSpec {
            function: RegressionFunction::Sinusoid {
                amplitude,
                frequency,
                phase,
            },
            bound: amplitude.abs(),
            holder: Some(HolderDecl {
                a: 1.0,
                l: 2.0 * PI * amplitude.abs() * frequency.abs(),
            }),
        }
    }

    pub fn holder_cusp(l: f64, a: f64, center: Point, bound: f64) -> Self {
        RegressionSpec {
            function: RegressionFunction::HolderCusp { l, a, center },
            bound,
            holder: Some(HolderDecl { a, l }),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.bound > 0.0 && self.bound.is_finite()) {
            return Err(invalid("regression.bound must be > 0"));
        }
        if let Some(h) = self.holder {
            if !(h.a > 0.0 && h.a <= 1.0) || !(h.l >= 0.0) {
                return Err(invalid("regression.holder requires a in (0, 1] and l >= 0"));
            }
        }
        match &self.function {
            RegressionFunction::Linear { slope, .. } if slope.len() != dim => {
                Err(invalid(format!(
                    "regression linear slope has length {}, expected {dim}",
                    slope.len()
                )))
            }
            RegressionFunction::HolderCusp { center, a, l } => {
                if center.dim() != dim {
                    return Err(invalid("regression holder_cusp center has wrong dimension"));
                }
                if !(*a > 0.0 && *a <= 1.0) || !(*l >= 0.0) {
                    return Err(invalid(
                        "regression holder_cusp requires a in (0, 1] and l >= 0",
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `f(x)`.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.function {
            RegressionFunction::Constant { value } => *value,
            RegressionFunction::Linear { slope, intercept } => {
                slope.iter().zip(x).map(|(s, v)| s * v).sum::<f64>() + intercept
            }
            RegressionFunction::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => amplitude * (2.0 * PI * frequency * x[0] + phase).sin(),
            RegressionFunction::HolderCusp { l, a, center } => {
                (l * distance(x, center.coords()).powf(*a)).min(self.bound)
            }
        }
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self.function {
            RegressionFunction::Constant { value } => Some(value),
            _ => None,
        }
    }

    /// Cut points along coordinate `prefix.len()` where `f` is not smooth.
    pub(crate) fn section_cuts(&self, prefix: &[f64], out: &mut Vec<f64>) {
        if let RegressionFunction::HolderCusp { l, a, center } = &self.function {
            let k = prefix.len();
            out.push(center.coords()[k]);
            if *l > 0.0 {
                let clamp_radius = (self.bound / l).powf(1.0 / a);
                if let Some(w) =
                    super::density::chord_half_width(center.coords(), clamp_radius, prefix)
                {
                    out.push(center.coords()[k] - w);
                    out.push(center.coords()[k] + w);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(RegressionSpec::constant(1.0).eval(&[3.0]), 1.0);
        assert_eq!(RegressionSpec::identity(1.0).eval(&[0.25]), 0.25);
        let cusp = RegressionSpec::holder_cusp(1.0, 0.5, Point::scalar(0.0), 1.0);
        assert!((cusp.eval(&[0.04]) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn cusp_clamps_at_bound() {
        let cusp = RegressionSpec::holder_cusp(10.0, 1.0, Point::scalar(0.0), 2.0);
        assert_eq!(cusp.eval(&[5.0]), 2.0);
    }

    #[test]
    fn validate_checks_dimensions() {
        let f = RegressionSpec::identity(1.0);
        assert!(f.validate(1).is_ok());
        assert!(f.validate(2).is_err());
    }
}
