use super::{check_dim, distance, norm};
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Radial base kernels `K: R^d -> [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKernel {
    /// `K(z) = 1(|z| <= 1)`; the random geometric graph.
    Indicator,
    /// `K(z) = clamp(2 - 2|z|, 0, 1)`.
    Triangle,
    /// `K(z) = 1(|z| <= 1/2) + 1/2 * 1(1/2 < |z| <= 1)`.
    HalfPlateau,
}

impl BaseKernel {
    /// Profile as a function of the radius `r = |z|`.
    #[inline]
    pub fn profile(self, r: f64) -> f64 {
        match self {
            BaseKernel::Indicator => {
                if r <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            BaseKernel::Triangle => (2.0 - 2.0 * r).clamp(0.0, 1.0),
            BaseKernel::HalfPlateau => {
                if r <= 0.5 {
                    1.0
                } else if r <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }

    /// Radii (in units of `|z|`) where the profile is discontinuous or has a kink.
    pub fn radial_breakpoints(self) -> &'static [f64] {
        match self {
            BaseKernel::Indicator => &[1.0],
            BaseKernel::Triangle | BaseKernel::HalfPlateau => &[0.5, 1.0],
        }
    }

    /// Largest `M1` with `K(z) >= 1/2` on `|z| <= M1`, and smallest `M2` with `K = 0` beyond.
    pub fn natural_constants(self) -> (f64, f64) {
        match self {
            BaseKernel::Indicator => (1.0, 1.0),
            BaseKernel::Triangle => (0.75, 1.0),
            BaseKernel::HalfPlateau => (1.0, 1.0),
        }
    }
}

/// Base kernel together with sparsity `alpha` and bandwidth `h`, defining
/// `k_n(x, z) = alpha * K((x - z) / h)`.
///
/// `m1` and `m2` are the declared support constants; they are audited, not
/// inferred (see [`crate::model::assumption_audit`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub base: BaseKernel,
    pub alpha: f64,
    pub h: f64,
    pub m1: f64,
    pub m2: f64,
}

impl KernelSpec {
    /// Kernel with the base kernel's natural `M1`, `M2`.
    pub fn new(base: BaseKernel, alpha: f64, h: f64) -> Self {
        let (m1, m2) = base.natural_constants();
        KernelSpec {
            base,
            alpha,
            h,
            m1,
            m2,
        }
    }

    pub fn indicator(alpha: f64, h: f64) -> Self {
        Self::new(BaseKernel::Indicator, alpha, h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(invalid(format!(
                "kernel.alpha = {} violates alpha in (0, 1]",
                self.alpha
            )));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(invalid(format!("kernel.h = {} violates h > 0", self.h)));
        }
        if !(self.m1 > 0.0 && self.m2 > 0.0) {
            return Err(invalid("kernel.m1 and kernel.m2 must be > 0"));
        }
        if self.m1 > self.m2 {
            return Err(invalid(format!(
                "kernel.m1 = {} violates m1 <= m2 = {}",
                self.m1, self.m2
            )));
        }
        Ok(())
    }

    /// Base kernel value `K(z)` (no dimension check).
    #[inline]
    pub fn base_value(&self, z: &[f64]) -> f64 {
        self.base.profile(norm(z))
    }

    /// `K(z)` with the scenario dimension enforced.
    pub fn base_eval(&self, z: &[f64], dim: usize) -> Result<f64> {
        check_dim("kernel argument", z.len(), dim)?;
        Ok(self.base_value(z))
    }

    /// `alpha * K((x - z) / h)` without dimension checks; used on hot paths.
    #[inline]
    pub fn scaled_value(&self, x: &[f64], z: &[f64]) -> f64 {
        let value = self.base.profile(distance(x, z) / self.h);
        if value == 0.0 {
            0.0
        } else {
            self.alpha * value
        }
    }

    /// `k_n(x, z) = alpha * K((x - z) / h)`. Symmetric in `(x, z)`.
    pub fn scaled_eval(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        check_dim("kernel arguments", z.len(), x.len())?;
        Ok(self.scaled_value(x, z))
    }

    /// Radius `M2 * h` outside of which `k_n(x, .)` vanishes.
    pub fn support_radius(&self) -> f64 {
        self.m2 * self.h
    }

    /// Radii where `k_n(x, .)` has breakpoints, scaled by `h`, capped to the kernel support.
    pub fn scaled_breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.base
            .radial_breakpoints()
            .iter()
            .map(move |r| r * self.h)
    }
}
