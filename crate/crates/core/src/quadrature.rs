//! Numerical integration over sections of `R^d`.
//!
//! Low dimensions (`d <= 3`) use iterated adaptive Gauss-Legendre rules. The
//! caller describes the domain one coordinate at a time: given the leading
//! coordinates it returns the integration range for the next coordinate and
//! the interior points where the integrand is not smooth (kernel radii,
//! support boundaries, cusps). Between cut points the integrand is smooth, so
//! the rule converges quickly; error estimates from every level are carried
//! up and integrated alongside the value.
//!
//! Higher dimensions fall back to a Halton quasi-Monte Carlo rule with a
//! block-jackknife error estimate.

use crate::error::{GnwError, Result};
use std::sync::OnceLock;

const RULE_ORDER: usize = 10;
const MAX_DEPTH: u32 = 40;

/// Requested accuracy for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Target relative error.
    pub rel_tol: f64,
    /// Absolute error floor per unit length.
    pub abs_tol: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-15,
        }
    }
}

/// Integral estimate for a `K`-component integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const K: usize> {
    pub value: [f64; K],
    pub error: [f64; K],
    /// Estimate of the integral of the absolute integrand.
    pub magnitude: [f64; K],
}

impl<const K: usize> Estimate<K> {
    fn zero() -> Self {
        Estimate {
            value: [0.0; K],
            error: [0.0; K],
            magnitude: [0.0; K],
        }
    }

    /// Largest component-wise error relative to the magnitude (absolute when
    /// the integrand vanishes).
    pub fn relative_error(&self) -> f64 {
        self.magnitude
            .iter()
            .zip(&self.error)
            .map(|(m, e)| if *m == 0.0 { *e } else { e / m })
            .fold(0.0, f64::max)
    }
}

/// Domain description for iterated integration.
pub trait Sections {
    fn dim(&self) -> usize;

    /// Range for coordinate `prefix.len()` given `prefix`, plus interior cut
    /// points appended to `cuts`. `None` means the section is empty.
    fn section(&self, prefix: &[f64], cuts: &mut Vec<f64>) -> Option<(f64, f64)>;
}

fn gauss_legendre() -> &'static ([f64; RULE_ORDER], [f64; RULE_ORDER]) {
    static RULE: OnceLock<([f64; RULE_ORDER], [f64; RULE_ORDER])> = OnceLock::new();
    RULE.get_or_init(gauss_legendre_rule::<RULE_ORDER>)
}

/// Nodes and weights of the `N`-point Gauss-Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre_rule<const N: usize>() -> ([f64; N], [f64; N]) {
    let mut nodes = [0.0; N];
    let mut weights = [0.0; N];
    let n = N as f64;
    for i in 0..N {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=N {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

struct Integrator<'a, const K: usize, S, F> {
    domain: &'a S,
    integrand: &'a F,
    opts: QuadOptions,
    exhausted: bool,
}

impl<'a, const K: usize, S, F> Integrator<'a, K, S, F>
where
    S: Sections,
    F: Fn(&[f64]) -> [f64; K],
{
    fn point(&mut self, prefix: &mut Vec<f64>) -> Estimate<K> {
        if prefix.len() == self.domain.dim() {
            let value = (self.integrand)(prefix);
            Estimate {
                value,
                error: [0.0; K],
                magnitude: value.map(f64::abs),
            }
        } else {
            self.level(prefix)
        }
    }

    fn rule(&mut self, a: f64, b: f64, prefix: &mut Vec<f64>) -> Estimate<K> {
        let (nodes, weights) = gauss_legendre();
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut out = Estimate::zero();
        for (t, w) in nodes.iter().zip(weights) {
            prefix.push(mid + half * t);
            let inner = self.point(prefix);
            prefix.pop();
            for k in 0..K {
                out.value[k] += w * half * inner.value[k];
                out.error[k] += w * half.abs() * inner.error[k];
                out.magnitude[k] += w * half.abs() * inner.magnitude[k];
            }
        }
        out
    }

    fn adapt(
        &mut self,
        a: f64,
        b: f64,
        whole: Estimate<K>,
        tol_per_length: &[f64; K],
        depth: u32,
        prefix: &mut Vec<f64>,
    ) -> Estimate<K> {
        let mid = 0.5 * (a + b);
        let left = self.rule(a, mid, prefix);
        let right = self.rule(mid, b, prefix);
        let mut fine = Estimate::zero();
        let mut done = true;
        for k in 0..K {
            fine.value[k] = left.value[k] + right.value[k];
            let diff = (fine.value[k] - whole.value[k]).abs();
            fine.error[k] = diff + left.error[k] + right.error[k];
            fine.magnitude[k] = left.magnitude[k] + right.magnitude[k];
            if diff > tol_per_length[k] * (b - a) {
                done = false;
            }
        }
        if done {
            return fine;
        }
        if depth >= MAX_DEPTH {
            self.exhausted = true;
            return fine;
        }
        let l = self.adapt(a, mid, left, tol_per_length, depth + 1, prefix);
        let r = self.adapt(mid, b, right, tol_per_length, depth + 1, prefix);
        let mut out = Estimate::zero();
        for k in 0..K {
            out.value[k] = l.value[k] + r.value[k];
            out.error[k] = l.error[k] + r.error[k];
            out.magnitude[k] = l.magnitude[k] + r.magnitude[k];
        }
        out
    }

    fn level(&mut self, prefix: &mut Vec<f64>) -> Estimate<K> {
        let mut cuts = Vec::new();
        let Some((lo, hi)) = self.domain.section(prefix, &mut cuts) else {
            return Estimate::zero();
        };
        if !(hi > lo) {
            return Estimate::zero();
        }
        let mut knots = vec![lo];
        knots.extend(cuts.into_iter().filter(|c| *c > lo && *c < hi));
        knots.push(hi);
        knots.sort_by(f64::total_cmp);
        knots.dedup();

        let segments: Vec<(f64, f64, Estimate<K>)> = knots
            .windows(2)
            .map(|w| (w[0], w[1], self.rule(w[0], w[1], prefix)))
            .collect();
        let length = hi - lo;
        let mut tol = [0.0; K];
        for k in 0..K {
            let scale: f64 = segments.iter().map(|s| s.2.magnitude[k]).sum();
            tol[k] = (self.opts.rel_tol * scale).max(self.opts.abs_tol * length) / length;
        }
        let mut total = Estimate::zero();
        for (a, b, whole) in segments {
            let seg = self.adapt(a, b, whole, &tol, 0, prefix);
            for k in 0..K {
                total.value[k] += seg.value[k];
                total.error[k] += seg.error[k];
                total.magnitude[k] += seg.magnitude[k];
            }
        }
        total
    }
}

/// Iterated adaptive Gauss-Legendre integration of a `K`-component integrand.
///
/// Returns a numeric error when subdivision is exhausted and the estimated
/// relative error is still above `1e3 * rel_tol`.
pub fn integrate<const K: usize, S, F>(
    domain: &S,
    integrand: F,
    opts: QuadOptions,
) -> Result<Estimate<K>>
where
    S: Sections,
    F: Fn(&[f64]) -> [f64; K],
{
    let mut integrator = Integrator {
        domain,
        integrand: &integrand,
        opts,
        exhausted: false,
    };
    let mut prefix = Vec::with_capacity(domain.dim());
    let est = integrator.level(&mut prefix);
    if integrator.exhausted {
        let worst = est
            .magnitude
            .iter()
            .zip(&est.error)
            .map(|(m, e)| e / m.max(opts.abs_tol.max(f64::MIN_POSITIVE)))
            .fold(0.0, f64::max);
        if worst > 1e3 * opts.rel_tol {
            return Err(GnwError::Numeric {
                message: "adaptive quadrature exhausted its subdivision budget".into(),
                estimate: est.value[0],
                error: est.error[0],
            });
        }
    }
    Ok(est)
}

/// Component `k` (0-based) of the Halton point with the given index, using
/// the `k`-th prime base.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut factor = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * factor;
        index /= base;
        factor *= inv;
    }
    out
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Fills `out` with the Halton point of the given index (dimension <= 16).
pub fn halton(index: u64, out: &mut [f64]) {
    for (k, o) in out.iter_mut().enumerate() {
        *o = radical_inverse(index, PRIMES[k % PRIMES.len()]);
    }
}

/// Quasi-Monte Carlo integral over the box `[lo, hi]` with `2^log2_points`
/// Halton points. The error is the block-jackknife standard error over 16
/// contiguous blocks.
pub fn qmc_integrate<const K: usize, F>(
    lo: &[f64],
    hi: &[f64],
    integrand: F,
    log2_points: u32,
) -> Estimate<K>
where
    F: Fn(&[f64]) -> [f64; K],
{
    const BLOCKS: usize = 16;
    let d = lo.len();
    let total = 1usize << log2_points;
    let per_block = total / BLOCKS;
    let volume: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let mut block_sums = [[0.0; K]; BLOCKS];
    let mut abs_sums = [0.0; K];
    let mut u = vec![0.0; d];
    let mut x = vec![0.0; d];
    for (b, sums) in block_sums.iter_mut().enumerate() {
        for i in 0..per_block {
            halton((b * per_block + i + 1) as u64, &mut u);
            for k in 0..d {
                x[k] = lo[k] + (hi[k] - lo[k]) * u[k];
            }
            let v = integrand(&x);
            for k in 0..K {
                sums[k] += v[k];
                abs_sums[k] += v[k].abs();
            }
        }
    }
    let mut out = Estimate::zero();
    let n = (per_block * BLOCKS) as f64;
    for k in 0..K {
        let all: f64 = block_sums.iter().map(|s| s[k]).sum();
        out.value[k] = volume * all / n;
        out.magnitude[k] = volume * abs_sums[k] / n;
        let leave_one: Vec<f64> = block_sums
            .iter()
            .map(|s| volume * (all - s[k]) / (n - per_block as f64))
            .collect();
        let mean = leave_one.iter().sum::<f64>() / BLOCKS as f64;
        let var = leave_one.iter().map(|v| (v - mean).powi(2)).sum::<f64>() * (BLOCKS - 1) as f64
            / BLOCKS as f64;
        out.error[k] = var.sqrt();
    }
    out
}

/// Axis-aligned box as a [`Sections`] domain.
#[derive(Debug, Clone)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Extra cut points per coordinate.
    pub cuts: Vec<Vec<f64>>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        let d = lo.len();
        BoxDomain {
            lo,
            hi,
            cuts: vec![Vec::new(); d],
        }
    }
}

impl Sections for BoxDomain {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn section(&self, prefix: &[f64], cuts: &mut Vec<f64>) -> Option<(f64, f64)> {
        let k = prefix.len();
        cuts.extend_from_slice(&self.cuts[k]);
        Some((self.lo[k], self.hi[k]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre_rule::<RULE_ORDER>();
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        // degree 18 is exact for the 10-point rule
        let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert_relative_eq!(approx, 2.0 / 19.0, epsilon = 1e-14);
    }

    #[test]
    fn smooth_one_dimensional() {
        let dom = BoxDomain::new(vec![0.0], vec![std::f64::consts::PI]);
        let est = integrate(&dom, |x| [x[0].sin()], QuadOptions::default()).unwrap();
        assert_relative_eq!(est.value[0], 2.0, epsilon = 1e-12);
        assert!(est.error[0] < 1e-8);
    }

    #[test]
    fn sqrt_endpoint_singularity_converges() {
        let dom = BoxDomain::new(vec![0.0], vec![1.0]);
        let est = integrate(&dom, |x| [x[0].sqrt()], QuadOptions::default()).unwrap();
        assert_relative_eq!(est.value[0], 2.0 / 3.0, epsilon = 1e-9);
    }

    struct Disc(f64);

    impl Sections for Disc {
        fn dim(&self) -> usize {
            2
        }
        fn section(&self, prefix: &[f64], _cuts: &mut Vec<f64>) -> Option<(f64, f64)> {
            let used: f64 = prefix.iter().map(|v| v * v).sum();
            let rem = self.0 * self.0 - used;
            (rem > 0.0).then(|| (-rem.sqrt(), rem.sqrt()))
        }
    }

    #[test]
    fn disc_area_by_iterated_sections() {
        let est = integrate(&Disc(0.5), |_| [1.0], QuadOptions::default()).unwrap();
        assert_relative_eq!(
            est.value[0],
            std::f64::consts::PI * 0.25,
            max_relative = 1e-8
        );
        assert!(est.relative_error() < 1e-6);
    }

    #[test]
    fn discontinuity_at_cut_point() {
        let mut dom = BoxDomain::new(vec![0.0], vec![1.0]);
        dom.cuts[0].push(1.0 / 3.0);
        let est = integrate(
            &dom,
            |x| [if x[0] < 1.0 / 3.0 { 1.0 } else { 0.0 }],
            QuadOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(est.value[0], 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn qmc_matches_volume() {
        let est = qmc_integrate(&[0.0; 4], &[1.0; 4], |x| [x.iter().sum::<f64>()], 14);
        assert!((est.value[0] - 2.0).abs() < 1e-3);
        assert!(est.error[0] < 1e-2);
    }

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }
}
