use gnw_core::graph::sample_full_graph;
use gnw_core::montecarlo::{
    estimate_moments, exact_small_n_oracle, run_edge_replications, run_replications,
};
use gnw_core::rng::{stream, unit_open_closed, StreamTag};
use gnw_core::stats::mean_and_se;
use gnw_core::theory::{kernel_moments, proxy_gap};
use gnw_core::{
    gnw_predict, nw_predict, sample_neighborhood, DensitySpec, KernelSpec, RegressionSpec,
    ScenarioConfig,
};
use rand::Rng;

/// Mean area of `B(x, h) n [0,1]^2` for `x` uniform in the square, `h <= 1/2`.
fn mean_window_area(h: f64) -> f64 {
    std::f64::consts::PI * h * h - 8.0 / 3.0 * h.powi(3) + h.powi(4) / 2.0
}

#[test]
fn rgg_mean_degree_tracks_log_n() {
    let n = 1000usize;
    let target = (n as f64).ln();
    let (mut lo, mut hi) = (1e-4, 0.5);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if (n - 1) as f64 * mean_window_area(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut cfg = ScenarioConfig::uniform_interval(n, 1.0, lo, RegressionSpec::constant(1.0));
    cfg.dimension = 2;
    cfg.density = DensitySpec::unit_cube(2);
    for seed in 0..20 {
        let g = sample_full_graph(&cfg, n, seed).unwrap();
        let rel = (g.mean_degree() - target).abs() / target;
        assert!(rel < 0.15, "seed {seed}: mean degree {}", g.mean_degree());
    }
}

#[test]
fn edges_are_conditionally_independent() {
    let kernel = KernelSpec::indicator(0.5, 1.0);
    let x = [0.0];
    let (p, q) = (
        kernel.scaled_value(&x, &[0.2]),
        kernel.scaled_value(&x, &[-0.4]),
    );
    let reps = 100_000u64;
    let mut products = Vec::with_capacity(reps as usize);
    for rep in 0..reps {
        let mut rng = stream(21, StreamTag::EdgeUniform, rep);
        let a = f64::from(u8::from(unit_open_closed(&mut rng) <= p));
        let b = f64::from(u8::from(unit_open_closed(&mut rng) <= q));
        products.push((a - p) * (b - q));
    }
    let (cov, se) = mean_and_se(&products);
    assert!(cov.abs() <= 4.0 * se, "covariance {cov} (se {se})");
}

#[test]
fn edge_only_replications_match_oracle() {
    for (n, seed) in [(4usize, 1u64), (12, 2)] {
        let mut rng = stream(seed, StreamTag::Auxiliary, 0);
        let points: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let labels: Vec<f64> = points.iter().map(|p| (6.0 * p).sin()).collect();
        let kernel = KernelSpec::indicator(0.7, 0.35);
        let oracle = exact_small_n_oracle(&points, &labels, &kernel, &[0.5]).unwrap();
        let preds = run_edge_replications(&points, &labels, &kernel, &[0.5], 1_000_000, seed);
        let rep = estimate_moments(&preds, 0.0).unwrap();
        let gap = (rep.mean - oracle.exact_expectation_given_points).abs();
        assert!(
            gap <= 5.0 * rep.mean_se,
            "n = {n}: gap {gap}, se {}",
            rep.mean_se
        );
        let second: f64 = preds.iter().map(|p| p.value * p.value).sum::<f64>() / preds.len() as f64;
        assert!((second - oracle.exact_second_moment_given_points).abs() < 0.01);
    }
}

#[test]
fn proxy_gap_identity_for_constant_f() {
    let cfg = ScenarioConfig::uniform_interval(10, 1.0, 0.1, RegressionSpec::constant(1.0));
    let m = kernel_moments(&cfg, &[0.5]).unwrap();
    let preds = run_replications(&cfg, &[0.5], 100_000, 3);
    let rep = estimate_moments(&preds, m.b_n).unwrap();
    let gap = proxy_gap(m.b_n, m.c_n, 10.0);
    let observed = rep.variance_proxy - rep.standard_variance;
    let se = 2.0 * (rep.mean - m.b_n).abs() * rep.mean_se;
    assert!(
        (observed - gap).abs() <= 5.0 * se,
        "{observed} vs {gap} (se {se})"
    );
    assert!(((rep.mean - m.b_n).powi(2) - gap).abs() <= 5.0 * se);
}

#[test]
fn gnw_and_nw_coincide_for_rgg() {
    let mut rng = stream(99, StreamTag::Auxiliary, 0);
    for s in 0..200u64 {
        let n = rng.random_range(1..300);
        let h = rng.random_range(0.001..0.7);
        let mut cfg =
            ScenarioConfig::uniform_interval(n, 1.0, h, RegressionSpec::sinusoid(1.3, 2.0, 0.4));
        cfg.noise = gnw_core::NoiseSpec::Gaussian { stddev: 0.7 };
        cfg.master_seed = s;
        let x = [rng.random::<f64>()];
        let nb = sample_neighborhood(&cfg, &x, s);
        let g = gnw_predict(&nb);
        let k = nw_predict(&x, nb.points_flat(), nb.labels(), &cfg.kernel);
        assert_eq!(g.value.to_bits(), k.value.to_bits());
        assert_eq!(g.empty, k.empty);
    }
}

#[test]
fn variance_proxy_scales_as_inverse_degree() {
    // c_n = 0.2 at x = 0.5; d_n doubles with n
    let mut scaled = Vec::new();
    for n in [100, 200, 400, 800] {
        let mut cfg =
            ScenarioConfig::uniform_interval(n, 1.0, 0.1, RegressionSpec::sinusoid(1.0, 1.0, 0.0));
        cfg.noise = gnw_core::NoiseSpec::Gaussian { stddev: 1.0 };
        let m = kernel_moments(&cfg, &[0.5]).unwrap();
        let preds = run_replications(&cfg, &[0.5], 20_000, 3);
        let mc = estimate_moments(&preds, m.b_n).unwrap();
        scaled.push(mc.variance_proxy * n as f64 * m.c_n);
    }
    let (lo, hi) = scaled
        .iter()
        .fold((f64::MAX, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    assert!(hi / lo < 1.25, "d_n * v_n across d_n = 20..160: {scaled:?}");
}
