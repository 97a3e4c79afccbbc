//! SVG figures on a fixed 800 x 800 canvas.

use crate::error::CliError;
use gnw_core::graph::{sample_full_graph, sample_neighborhood_into, QueryNeighborhood};
use gnw_core::{gnw_predict, ScenarioConfig};
use std::fmt::Write as _;

pub const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;
/// Query points along the estimator curve of the tradeoff figure.
pub const CURVE_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureKind {
    /// Latent points and the edges of a full graph.
    Rgg,
    /// Noisy samples, the regression function and the estimator curve.
    Tradeoff,
}

/// Affine map from a data range onto the canvas.
struct Axis {
    lo: f64,
    scale: f64,
    flip: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, flip: bool) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !(hi > lo) {
            lo -= 0.5;
            hi = lo + 1.0;
        }
        Axis {
            lo,
            scale: (CANVAS - 2.0 * MARGIN) / (hi - lo),
            flip,
        }
    }

    fn map(&self, v: f64) -> f64 {
        let t = MARGIN + (v - self.lo) * self.scale;
        if self.flip {
            CANVAS - t
        } else {
            t
        }
    }
}

fn open_svg() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{c}\" height=\"{c}\" viewBox=\"0 0 {c} {c}\">\n\
         <rect width=\"{c}\" height=\"{c}\" fill=\"white\"/>\n",
        c = CANVAS
    )
}

fn polyline(out: &mut String, points: &[(f64, f64)], color: &str) {
    out.push_str("<polyline fill=\"none\" stroke=\"");
    out.push_str(color);
    out.push_str("\" stroke-width=\"1.5\" points=\"");
    for (i, (x, y)) in points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:.2},{y:.2}");
    }
    out.push_str("\"/>\n");
}

/// Latent points as radius-2 circles and edges as 0.5-wide segments.
/// One-dimensional positions are drawn on the horizontal midline.
pub fn rgg_svg(cfg: &ScenarioConfig, seed: u64) -> Result<String, CliError> {
    let g = sample_full_graph(cfg, cfg.n, seed)?;
    let coord = |i: usize, k: usize| if k < g.dim() { g.point(i)[k] } else { 0.0 };
    let ax = Axis::fit((0..g.n()).map(|i| coord(i, 0)), false);
    let ay = Axis::fit((0..g.n()).map(|i| coord(i, 1)), true);
    let pos = |i: usize| {
        (
            ax.map(coord(i, 0)),
            if g.dim() > 1 {
                ay.map(coord(i, 1))
            } else {
                CANVAS / 2.0
            },
        )
    };
    let mut out = open_svg();
    out.push_str("<g stroke=\"black\" stroke-width=\"0.5\">\n");
    for (i, j) in g.edges() {
        let ((x1, y1), (x2, y2)) = (pos(i), pos(j));
        let _ = writeln!(
            out,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\"/>"
        );
    }
    out.push_str("</g>\n<g fill=\"steelblue\">\n");
    for i in 0..g.n() {
        let (x, y) = pos(i);
        let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2\"/>");
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// One sample `(X_i, Y_i)` with the regression function and the estimator
/// evaluated along a grid of query positions. The latent points, labels and
/// edge uniforms are shared by every query position.
pub fn tradeoff_svg(cfg: &ScenarioConfig, seed: u64) -> Result<String, CliError> {
    if cfg.dimension != 1 {
        return Err(CliError::Usage(
            "the tradeoff figure needs dimension = 1".into(),
        ));
    }
    let mut nb = QueryNeighborhood::default();
    sample_neighborhood_into(cfg, &[0.0], seed, 0, &mut nb);
    let (lo, hi) = (0..nb.n())
        .map(|i| nb.point(i)[0])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    let grid: Vec<f64> = (0..CURVE_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (CURVE_POINTS - 1) as f64)
        .collect();
    let truth: Vec<f64> = grid.iter().map(|x| cfg.regression.eval(&[*x])).collect();
    let estimate: Vec<f64> = grid
        .iter()
        .map(|x| {
            sample_neighborhood_into(cfg, &[*x], seed, 0, &mut nb);
            gnw_predict(&nb).value
        })
        .collect();
    let ax = Axis::fit(grid.iter().copied(), false);
    let ay = Axis::fit(
        nb.labels().iter().chain(&truth).chain(&estimate).copied(),
        true,
    );
    let mut out = open_svg();
    out.push_str("<g fill=\"gray\" fill-opacity=\"0.6\">\n");
    for i in 0..nb.n() {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\"/>",
            ax.map(nb.point(i)[0]),
            ay.map(nb.labels()[i])
        );
    }
    out.push_str("</g>\n");
    let line = |ys: &[f64]| -> Vec<(f64, f64)> {
        grid.iter()
            .zip(ys)
            .map(|(x, y)| (ax.map(*x), ay.map(*y)))
            .collect()
    };
    polyline(&mut out, &line(&truth), "black");
    polyline(&mut out, &line(&estimate), "crimson");
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn figure_svg(cfg: &ScenarioConfig, kind: FigureKind, seed: u64) -> Result<String, CliError> {
    match kind {
        FigureKind::Rgg => rgg_svg(cfg, seed),
        FigureKind::Tradeoff => tradeoff_svg(cfg, seed),
    }
}
