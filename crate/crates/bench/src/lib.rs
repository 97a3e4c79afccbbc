//! Scenarios shared by the benchmarks.

use gnw_core::{BaseKernel, DensitySpec, KernelSpec, NoiseSpec, RegressionSpec, ScenarioConfig};

/// One-dimensional uniform scenario with sinusoidal `f` and Gaussian noise.
pub fn sinusoid_scenario(n: usize, h: f64) -> ScenarioConfig {
    let mut cfg =
        ScenarioConfig::uniform_interval(n, 1.0, h, RegressionSpec::sinusoid(1.0, 1.0, 0.0));
    cfg.noise = NoiseSpec::Gaussian { stddev: 1.0 };
    cfg
}

/// Two-dimensional Gaussian scenario with a triangle kernel, which forces
/// the quadrature path for `c_n`.
pub fn gaussian_plane(h: f64) -> ScenarioConfig {
    let mut cfg = sinusoid_scenario(100, h);
    cfg.dimension = 2;
    cfg.density = DensitySpec::standard_gaussian(2);
    cfg.kernel = KernelSpec::new(BaseKernel::Triangle, 0.5, h);
    cfg
}
