use super::{check_dim, distance, Point};
use crate::error::{invalid, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Number of standard deviations kept when a Gaussian is truncated for quadrature.
pub(crate) const GAUSSIAN_TRUNCATION: f64 = 12.0;

/// Density `p` of the latent positions; its support is `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    /// Uniform on the box `[lo, hi]`.
    UniformCube { lo: Vec<f64>, hi: Vec<f64> },
    /// Uniform on the closed Euclidean ball.
    UniformBall { center: Point, radius: f64 },
    /// Isotropic Gaussian.
    Gaussian { mean: Point, stddev: f64 },
    /// Finite mixture; weights are positive and sum to one.
    Mixture(Vec<(f64, DensitySpec)>),
}

impl DensitySpec {
    pub fn unit_interval() -> Self {
        DensitySpec::UniformCube {
            lo: vec![0.0],
            hi: vec![1.0],
        }
    }

    pub fn unit_cube(d: usize) -> Self {
        DensitySpec::UniformCube {
            lo: vec![0.0; d],
            hi: vec![1.0; d],
        }
    }

    pub fn standard_gaussian(d: usize) -> Self {
        DensitySpec::Gaussian {
            mean: Point::from(vec![0.0; d]),
            stddev: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DensitySpec::UniformCube { lo, .. } => lo.len(),
            DensitySpec::UniformBall { center, .. } => center.dim(),
            DensitySpec::Gaussian { mean, .. } => mean.dim(),
            DensitySpec::Mixture(parts) => parts.first().map_or(0, |(_, p)| p.dim()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DensitySpec::UniformCube { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(invalid(
                        "uniform_cube: lo and hi must be nonempty and of equal length",
                    ));
                }
                if lo
                    .iter()
                    .zip(hi)
                    .any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite())
                {
                    return Err(invalid("uniform_cube: requires lo < hi componentwise"));
                }
            }
            DensitySpec::UniformBall { center, radius } => {
                Point::new(center.coords().to_vec())?;
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(invalid("uniform_ball: radius must be > 0"));
                }
            }
            DensitySpec::Gaussian { mean, stddev } => {
                Point::new(mean.coords().to_vec())?;
                if !(*stddev > 0.0 && stddev.is_finite()) {
                    return Err(invalid("gaussian: stddev must be > 0"));
                }
            }
            DensitySpec::Mixture(parts) => {
                if parts.is_empty() {
                    return Err(invalid("mixture: needs at least one component"));
                }
                let d = parts[0].1.dim();
                let mut total = 0.0;
                for (w, p) in parts {
                    if !(*w > 0.0) {
                        return Err(invalid("mixture: weights must be positive"));
                    }
                    p.validate()?;
                    if p.dim() != d {
                        return Err(invalid("mixture: components must share a dimension"));
                    }
                    total += w;
                }
                if (total - 1.0).abs() > 1e-9 {
                    return Err(invalid(format!(
                        "mixture: weights sum to {total}, expected 1"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Draws one point into `out` (length `dim()`).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            DensitySpec::UniformCube { lo, hi } => {
                for ((o, a), b) in out.iter_mut().zip(lo).zip(hi) {
                    *o = a + (b - a) * rng.random::<f64>();
                }
            }
            DensitySpec::UniformBall { center, radius } => {
                let d = out.len();
                if d == 1 {
                    out[0] = center.coords()[0] + radius * (2.0 * rng.random::<f64>() - 1.0);
                    return;
                }
                let mut norm2 = 0.0;
                while norm2 == 0.0 {
                    norm2 = 0.0;
                    for o in out.iter_mut() {
                        let g: f64 = rng.sample(StandardNormal);
                        *o = g;
                        norm2 += g * g;
                    }
                }
                let scale = radius * rng.random::<f64>().powf(1.0 / d as f64) / norm2.sqrt();
                for (o, c) in out.iter_mut().zip(center.coords()) {
                    *o = c + scale * *o;
                }
            }
            DensitySpec::Gaussian { mean, stddev } => {
                for (o, m) in out.iter_mut().zip(mean.coords()) {
                    let g: f64 = rng.sample(StandardNormal);
                    *o = m + stddev * g;
                }
            }
            DensitySpec::Mixture(parts) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let last = parts.len() - 1;
                for (i, (w, p)) in parts.iter().enumerate() {
                    acc += w;
                    if u < acc || i == last {
                        p.sample_into(rng, out);
                        return;
                    }
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let mut out = vec![0.0; self.dim()];
        self.sample_into(rng, &mut out);
        Point::from(out)
    }

    /// `p(x)` without dimension checks.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            DensitySpec::UniformCube { lo, hi } => {
                let mut vol = 1.0;
                for ((v, a), b) in x.iter().zip(lo).zip(hi) {
                    if v < a || v > b {
                        return 0.0;
                    }
                    vol *= b - a;
                }
                1.0 / vol
            }
            DensitySpec::UniformBall { center, radius } => {
                if distance(x, center.coords()) <= *radius {
                    1.0 / (crate::theory::unit_ball_volume(x.len()) * radius.powi(x.len() as i32))
                } else {
                    0.0
                }
            }
            DensitySpec::Gaussian { mean, stddev } => {
                let d = x.len() as f64;
                let r2 = distance(x, mean.coords()).powi(2);
                (2.0 * PI * stddev * stddev).powf(-d / 2.0) * (-r2 / (2.0 * stddev * stddev)).exp()
            }
            DensitySpec::Mixture(parts) => parts.iter().map(|(w, p)| w * p.value(x)).sum(),
        }
    }

    /// `p(x)`; zero outside `Q` for the compactly supported variants.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim("density argument", x.len(), self.dim())?;
        Ok(self.value(x))
    }

    /// Membership in the closed support `Q`.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            DensitySpec::UniformCube { lo, hi } => {
                x.iter().zip(lo).zip(hi).all(|((v, a), b)| v >= a && v <= b)
            }
            DensitySpec::UniformBall { center, radius } => distance(x, center.coords()) <= *radius,
            DensitySpec::Gaussian { .. } => true,
            DensitySpec::Mixture(parts) => parts.iter().any(|(_, p)| p.contains(x)),
        }
    }

    /// Whether `Q` is bounded.
    pub fn is_compact(&self) -> bool {
        match self {
            DensitySpec::Gaussian { .. } => false,
            DensitySpec::Mixture(parts) => parts.iter().all(|(_, p)| p.is_compact()),
            _ => true,
        }
    }

    /// Axis-aligned box containing `Q` (Gaussians truncated at 12 standard deviations).
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            DensitySpec::UniformCube { lo, hi } => (lo.clone(), hi.clone()),
            DensitySpec::UniformBall { center, radius } => (
                center.coords().iter().map(|c| c - radius).collect(),
                center.coords().iter().map(|c| c + radius).collect(),
            ),
            DensitySpec::Gaussian { mean, stddev } => {
                let w = GAUSSIAN_TRUNCATION * stddev;
                (
                    mean.coords().iter().map(|c| c - w).collect(),
                    mean.coords().iter().map(|c| c + w).collect(),
                )
            }
            DensitySpec::Mixture(parts) => {
                let d = self.dim();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for (_, p) in parts {
                    let (a, b) = p.bounding_box();
                    for k in 0..d {
                        lo[k] = lo[k].min(a[k]);
                        hi[k] = hi[k].max(b[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Appends the endpoints of the support's section along coordinate
    /// `prefix.len()` given the preceding coordinates.
    ///
    /// For a mixture every component contributes its own endpoints, so the
    /// density is smooth between consecutive cut points.
    pub(crate) fn section_cuts(&self, prefix: &[f64], out: &mut Vec<f64>) {
        let k = prefix.len();
        match self {
            DensitySpec::UniformCube { lo, hi } => {
                if prefix
                    .iter()
                    .zip(lo)
                    .zip(hi)
                    .all(|((v, a), b)| v >= a && v <= b)
                {
                    out.push(lo[k]);
                    out.push(hi[k]);
                }
            }
            DensitySpec::UniformBall { center, radius } => {
                if let Some(w) = chord_half_width(center.coords(), *radius, prefix) {
                    out.push(center.coords()[k] - w);
                    out.push(center.coords()[k] + w);
                }
            }
            DensitySpec::Gaussian { mean, stddev } => {
                let w = GAUSSIAN_TRUNCATION * stddev;
                out.push(mean.coords()[k] - w);
                out.push(mean.coords()[k] + w);
            }
            DensitySpec::Mixture(parts) => {
                for (_, p) in parts {
                    p.section_cuts(prefix, out);
                }
            }
        }
    }
}

/// Half-width of the section of the ball `B(center, radius)` along the next
/// coordinate, given the leading coordinates `prefix`.
pub(crate) fn chord_half_width(center: &[f64], radius: f64, prefix: &[f64]) -> Option<f64> {
    let used: f64 = prefix
        .iter()
        .zip(center)
        .map(|(z, c)| (z - c) * (z - c))
        .sum();
    let rem = radius * radius - used;
    if rem > 0.0 {
        Some(rem.sqrt())
    } else {
        None
    }
}
