//! Graphical and classical Nadaraya-Watson predictions.

use crate::graph::QueryNeighborhood;
use crate::model::KernelSpec;
use crate::stats::CompensatedSum;

/// Outcome of one prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: f64,
    /// Number of neighbors (GNW) or of points with positive weight (NW).
    pub neighbor_count: usize,
    /// `sum a_i` for GNW, `sum k(x, X_i)` for NW.
    pub weight_total: f64,
    /// Set iff the zero fallback fired.
    pub empty: bool,
}

impl Prediction {
    pub const EMPTY: Prediction = Prediction {
        value: 0.0,
        neighbor_count: 0,
        weight_total: 0.0,
        empty: true,
    };
}

/// Average label over the neighbors of the query node; `0` if it has none.
pub fn gnw_predict(nbhd: &QueryNeighborhood) -> Prediction {
    gnw_from_parts(nbhd.labels(), nbhd.edges())
}

pub(crate) fn gnw_from_parts(labels: &[f64], edges: &[bool]) -> Prediction {
    let mut sum = CompensatedSum::new();
    let mut count = 0usize;
    for (y, e) in labels.iter().zip(edges) {
        if *e {
            sum.add(*y);
            count += 1;
        }
    }
    if count == 0 {
        return Prediction::EMPTY;
    }
    Prediction {
        value: sum.value() / count as f64,
        neighbor_count: count,
        weight_total: count as f64,
        empty: false,
    }
}

/// Kernel-weighted label average with `alpha` forced to 1.
///
/// `points` is row-major with `x.len()` columns. Terms with zero weight are
/// skipped, so with an indicator kernel the accumulation is the same sequence
/// of operations as [`gnw_predict`] on deterministic edges.
pub fn nw_predict(x: &[f64], points: &[f64], labels: &[f64], kernel: &KernelSpec) -> Prediction {
    let d = x.len();
    let kernel = KernelSpec {
        alpha: 1.0,
        ..*kernel
    };
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    let mut count = 0usize;
    for (p, y) in points.chunks_exact(d).zip(labels) {
        let w = kernel.scaled_value(x, p);
        if w > 0.0 {
            if w == 1.0 {
                num.add(*y);
            } else {
                num.add(w * y);
            }
            den.add(w);
            count += 1;
        }
    }
    let total = den.value();
    if total <= 0.0 {
        return Prediction::EMPTY;
    }
    Prediction {
        value: num.value() / total,
        neighbor_count: count,
        weight_total: total,
        empty: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BaseKernel, Point};
    use proptest::prelude::*;

    fn nb(labels: &[f64], edges: &[bool]) -> QueryNeighborhood {
        let pts = (0..labels.len()).map(|i| Point::scalar(i as f64)).collect();
        QueryNeighborhood::from_parts(Point::scalar(0.0), pts, labels.to_vec(), edges.to_vec())
            .unwrap()
    }

    #[test]
    fn gnw_examples() {
        let p = gnw_predict(&nb(&[2.0, 4.0, 6.0], &[true, false, true]));
        assert_eq!(p.value, 4.0);
        assert_eq!(p.neighbor_count, 2);
        assert!(!p.empty);
        let p = gnw_predict(&nb(&[2.0, 4.0, 6.0], &[false; 3]));
        assert_eq!((p.value, p.empty), (0.0, true));
        let p = gnw_predict(&nb(&[0.3; 5], &[true, false, true, true, false]));
        assert_eq!(p.value, 0.3);
    }

    #[test]
    fn nw_examples() {
        let k = KernelSpec::indicator(0.5, 0.1);
        assert_eq!(nw_predict(&[0.5], &[0.55], &[7.0], &k).value, 7.0);
        let p = nw_predict(&[0.5], &[0.9, 0.1], &[1.0, 2.0], &k);
        assert_eq!((p.value, p.empty), (0.0, true));
        let tri = KernelSpec::new(BaseKernel::Triangle, 1.0, 1.0);
        // weights 1 (r = 0.25) and 0.5 (r = 0.75)
        let p = nw_predict(&[0.0], &[0.25, 0.75], &[1.0, 4.0], &tri);
        assert!((p.value - 2.0).abs() < 1e-15);
        assert_eq!(p.weight_total, 1.5);
    }

    proptest! {
        #[test]
        fn equivariance(labels in prop::collection::vec(-5.0f64..5.0, 1..40),
                        mask in prop::collection::vec(any::<bool>(), 40),
                        c in -3.0f64..3.0, s in 0.1f64..4.0) {
            let edges = &mask[..labels.len()];
            let base = gnw_predict(&nb(&labels, edges));
            prop_assume!(!base.empty);
            let lo = labels.iter().zip(edges).filter(|p| *p.1).map(|p| *p.0).fold(f64::INFINITY, f64::min);
            let hi = labels.iter().zip(edges).filter(|p| *p.1).map(|p| *p.0).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(base.value >= lo - 1e-12 && base.value <= hi + 1e-12);
            let shifted: Vec<f64> = labels.iter().map(|y| y + c).collect();
            let scaled: Vec<f64> = labels.iter().map(|y| y * s).collect();
            prop_assert!((gnw_predict(&nb(&shifted, edges)).value - (base.value + c)).abs() < 1e-12);
            prop_assert!((gnw_predict(&nb(&scaled, edges)).value - base.value * s).abs() < 1e-12);
        }
    }
}
