use super::{distance, DensitySpec, KernelSpec, RegressionSpec};
use crate::quadrature::halton;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `K(z) >= 1/2` on `|z| <= M1` fails.
    K1,
    /// `K(z) <= 1(|z| <= M2)` fails.
    K2,
    /// Declared Hölder condition fails.
    F1,
    /// `|f| <= B` fails on `Q`.
    SupNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Radius for kernel checks; the offending point(s) for function checks.
    pub witness: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AssumptionAudit {
    pub violations: Vec<Violation>,
}

impl AssumptionAudit {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn of_kind(&self, kind: ViolationKind) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.kind == kind)
    }
}

/// Samples the kernel and regression assumptions.
///
/// Kernel checks run on `grid_size` radii spread over `[0, 2 M2]`; the Hölder
/// check runs on all `grid_size^2` ordered pairs of a deterministic
/// low-discrepancy point set in `Q` (Gaussian supports are restricted to
/// four standard deviations). `grid_size` below 2 is raised to 2.
pub fn assumption_audit(
    kernel: &KernelSpec,
    f: &RegressionSpec,
    density: &DensitySpec,
    grid_size: usize,
) -> AssumptionAudit {
    let grid_size = grid_size.max(2);
    let mut violations = Vec::new();

    let top = 2.0 * kernel.m2;
    let mut radii: Vec<f64> = (0..grid_size)
        .map(|i| top * i as f64 / (grid_size - 1) as f64)
        .collect();
    radii.push(kernel.m1);
    for r in radii {
        let k = kernel.base.profile(r);
        if r <= kernel.m1 && k < 0.5 {
            violations.push(Violation {
                kind: ViolationKind::K1,
                witness: vec![r],
                detail: format!("K = {k} < 1/2 at |z| = {r} <= M1 = {}", kernel.m1),
            });
        }
        let cap = if r <= kernel.m2 { 1.0 } else { 0.0 };
        if k > cap {
            violations.push(Violation {
                kind: ViolationKind::K2,
                witness: vec![r],
                detail: format!("K = {k} > {cap} at |z| = {r} (M2 = {})", kernel.m2),
            });
        }
    }

    let points = points_in_support(density, grid_size);
    for x in &points {
        let fx = f.eval(x);
        if fx.abs() > f.bound * (1.0 + 1e-12) {
            violations.push(Violation {
                kind: ViolationKind::SupNorm,
                witness: x.clone(),
                detail: format!("|f| = {} > B = {}", fx.abs(), f.bound),
            });
        }
    }
    if let Some(holder) = f.holder {
        'pairs: for x in &points {
            for z in &points {
                let lhs = (f.eval(x) - f.eval(z)).abs();
                let rhs = holder.l * distance(x, z).powf(holder.a);
                if lhs > rhs * (1.0 + 1e-9) + 1e-12 {
                    let mut witness = x.clone();
                    witness.extend_from_slice(z);
                    violations.push(Violation {
                        kind: ViolationKind::F1,
                        witness,
                        detail: format!("|f(x) - f(z)| = {lhs} > L |x - z|^a = {rhs}"),
                    });
                    break 'pairs;
                }
            }
        }
    }

    AssumptionAudit { violations }
}

fn points_in_support(density: &DensitySpec, count: usize) -> Vec<Vec<f64>> {
    let d = density.dim();
    let (mut lo, mut hi) = density.bounding_box();
    if let DensitySpec::Gaussian { mean, stddev } = density {
        for k in 0..d {
            lo[k] = mean.coords()[k] - 4.0 * stddev;
            hi[k] = mean.coords()[k] + 4.0 * stddev;
        }
    }
    let mut out = Vec::with_capacity(count);
    let mut u = vec![0.0; d];
    for i in 0..count * 100 {
        if out.len() == count {
            break;
        }
        halton(i as u64 + 1, &mut u);
        let x: Vec<f64> = (0..d).map(|k| lo[k] + (hi[k] - lo[k]) * u[k]).collect();
        if density.contains(&x) {
            out.push(x);
        }
    }
    out
}
