use crate::error::{invalid, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Centered label noise.
///
/// Two different scales matter: the almost-sure bound (used by the
/// concentration envelope) and the second moment (used by the variance
/// bounds). They are exposed separately by [`NoiseSpec::bound`] and
/// [`NoiseSpec::variance`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    None,
    /// Uniform on `[-bound, bound]`.
    BoundedUniform {
        bound: f64,
    },
    /// `+-scale` with probability 1/2 each.
    Rademacher {
        scale: f64,
    },
    Gaussian {
        stddev: f64,
    },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        let v = match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::BoundedUniform { bound } => bound,
            NoiseSpec::Rademacher { scale } => scale,
            NoiseSpec::Gaussian { stddev } => stddev,
        };
        if !(v >= 0.0 && v.is_finite()) {
            return Err(invalid("noise scale must be finite and >= 0"));
        }
        Ok(())
    }

    /// Almost-sure bound on `|eps|`, present for the bounded variants.
    pub fn bound(&self) -> Option<f64> {
        match *self {
            NoiseSpec::None => Some(0.0),
            NoiseSpec::BoundedUniform { bound } => Some(bound),
            NoiseSpec::Rademacher { scale } => Some(scale),
            NoiseSpec::Gaussian { .. } => None,
        }
    }

    /// Second moment `E[eps^2]`.
    pub fn variance(&self) -> f64 {
        match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::BoundedUniform { bound } => bound * bound / 3.0,
            NoiseSpec::Rademacher { scale } => scale * scale,
            NoiseSpec::Gaussian { stddev } => stddev * stddev,
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::BoundedUniform { bound } => bound * (2.0 * rng.random::<f64>() - 1.0),
            NoiseSpec::Rademacher { scale } => {
                if rng.random::<bool>() {
                    scale
                } else {
                    -scale
                }
            }
            NoiseSpec::Gaussian { stddev } => {
                let g: f64 = rng.sample(StandardNormal);
                stddev * g
            }
        }
    }
}
