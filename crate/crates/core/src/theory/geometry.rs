//! Intersection volumes and the measure-retaining estimate.

use super::bounds::unit_ball_volume;
use crate::error::{invalid, Result};
use crate::model::DensitySpec;
use crate::rng::{stream, StreamTag};
use crate::stats::{wilson_interval, Z99};
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// Volume of `B(x, r)` intersected with the box `[lo, hi]`, when it is
/// available in closed form: any box in `d = 1`, and in higher dimension the
/// ball inside the box or disjoint from it.
pub fn ball_box_volume(x: &[f64], r: f64, lo: &[f64], hi: &[f64]) -> Option<f64> {
    if x.len() == 1 {
        return Some(((x[0] + r).min(hi[0]) - (x[0] - r).max(lo[0])).max(0.0));
    }
    let inside = x
        .iter()
        .zip(lo)
        .zip(hi)
        .all(|((c, a), b)| c - r >= *a && c + r <= *b);
    if inside {
        return Some(unit_ball_volume(x.len()) * r.powi(x.len() as i32));
    }
    let gap2: f64 = x
        .iter()
        .zip(lo)
        .zip(hi)
        .map(|((c, a), b)| {
            let g = (a - c).max(c - b).max(0.0);
            g * g
        })
        .sum();
    if gap2 >= r * r {
        return Some(0.0);
    }
    None
}

/// Volume of the intersection of two balls whose centers are `dist` apart,
/// in dimensions 1 to 3 (and the nested or disjoint cases in any dimension).
pub fn ball_ball_volume(d: usize, r1: f64, r2: f64, dist: f64) -> Option<f64> {
    if dist >= r1 + r2 {
        return Some(0.0);
    }
    if dist <= (r1 - r2).abs() {
        return Some(unit_ball_volume(d) * r1.min(r2).powi(d as i32));
    }
    match d {
        1 => Some(r1 + r2 - dist),
        2 => {
            let a1 = ((dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist * r1))
                .clamp(-1.0, 1.0)
                .acos();
            let a2 = ((dist * dist + r2 * r2 - r1 * r1) / (2.0 * dist * r2))
                .clamp(-1.0, 1.0)
                .acos();
            let k = ((-dist + r1 + r2) * (dist + r1 - r2) * (dist - r1 + r2) * (dist + r1 + r2))
                .max(0.0);
            Some(r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * k.sqrt())
        }
        3 => {
            let s = r1 + r2 - dist;
            Some(
                PI * s
                    * s
                    * (dist * dist + 2.0 * dist * r2 - 3.0 * r2 * r2
                        + 2.0 * dist * r1
                        + 6.0 * r1 * r2
                        - 3.0 * r1 * r1)
                    / (12.0 * dist),
            )
        }
        _ => None,
    }
}

/// Monte Carlo estimate of a volume fraction with a 99% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub lo: f64,
    pub hi: f64,
    pub samples: u64,
}

/// Estimates `m(Q n B(x, r)) / m(B(x, r))` by sampling uniformly in `B(x, r)`.
pub fn measure_retaining_estimate(
    density: &DensitySpec,
    x: &[f64],
    r: f64,
    sample_count: u64,
    seed: u64,
) -> Result<RatioEstimate> {
    if sample_count < 100 {
        return Err(invalid(format!(
            "sample_count = {sample_count} violates sample_count >= 100"
        )));
    }
    if !(r > 0.0) {
        return Err(invalid(format!("r = {r} violates r > 0")));
    }
    if x.len() != density.dim() {
        return Err(invalid("query point dimension does not match the density"));
    }
    let d = x.len();
    let mut rng = stream(seed, StreamTag::Auxiliary, 0);
    let mut z = vec![0.0; d];
    let mut hits = 0u64;
    for _ in 0..sample_count {
        let mut n2: f64 = 0.0;
        for v in z.iter_mut() {
            *v = rng.sample::<f64, _>(StandardNormal);
            n2 += *v * *v;
        }
        let radius = r * rng.random::<f64>().powf(1.0 / d as f64) / n2.sqrt();
        for (v, c) in z.iter_mut().zip(x) {
            *v = c + *v * radius;
        }
        if density.contains(&z) {
            hits += 1;
        }
    }
    let (lo, hi) = wilson_interval(hits, sample_count, Z99);
    Ok(RatioEstimate {
        ratio: hits as f64 / sample_count as f64,
        lo,
        hi,
        samples: sample_count,
    })
}
