//! Latent Position Model sampling and the decoupling quantities `R_I(x)`.

use crate::config::ScenarioConfig;
use crate::error::{invalid, GnwError, Result};
use crate::model::Point;
use crate::rng::{stream, unit_open_closed, StreamTag};
use std::fmt::Write as _;

/// Seeds that reproduce a draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SeedRecord {
    pub master_seed: u64,
    pub replication: u64,
}

/// One realization seen from a query node at latent position `x`: latent
/// points, labels, and the indicators of the edges between `x` and each node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueryNeighborhood {
    x: Vec<f64>,
    dim: usize,
    points: Vec<f64>,
    labels: Vec<f64>,
    edges: Vec<bool>,
    seed: SeedRecord,
}

impl QueryNeighborhood {
    /// Assembles a neighborhood from explicit data (points given row-major).
    pub fn from_parts(
        x: Point,
        points: Vec<Point>,
        labels: Vec<f64>,
        edges: Vec<bool>,
    ) -> Result<Self> {
        let n = points.len();
        if n == 0 || labels.len() != n || edges.len() != n {
            return Err(invalid(
                "neighborhood lists must be nonempty and of equal length",
            ));
        }
        let dim = x.dim();
        if points.iter().any(|p| p.dim() != dim) {
            return Err(invalid(
                "neighborhood points must share the query dimension",
            ));
        }
        Ok(QueryNeighborhood {
            x: x.into_inner(),
            dim,
            points: points.into_iter().flat_map(Point::into_inner).collect(),
            labels,
            edges,
            seed: SeedRecord::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Latent points, row-major `n x d`.
    pub fn points_flat(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn edges(&self) -> &[bool] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|e| **e).count()
    }

    pub fn seed(&self) -> SeedRecord {
        self.seed
    }
}

/// Draws the query neighborhood for `replication` with the scenario's master seed.
pub fn sample_neighborhood(cfg: &ScenarioConfig, x: &[f64], replication: u64) -> QueryNeighborhood {
    let mut out = QueryNeighborhood::default();
    sample_neighborhood_into(cfg, x, cfg.master_seed, replication, &mut out);
    out
}

/// Draws into a reusable buffer.
///
/// For node `i`: `X_i` from the latent stream, `U_i` from the edge stream,
/// `eps_i` from the noise stream; the edge is present iff `U_i <= k_n(x, X_i)`.
pub fn sample_neighborhood_into(
    cfg: &ScenarioConfig,
    x: &[f64],
    master_seed: u64,
    replication: u64,
    out: &mut QueryNeighborhood,
) {
    let n = cfg.n;
    let d = cfg.dimension;
    let mut latent = stream(master_seed, StreamTag::Latent, replication);
    let mut uniforms = stream(master_seed, StreamTag::EdgeUniform, replication);
    let mut noise = stream(master_seed, StreamTag::Noise, replication);

    out.x.clear();
    out.x.extend_from_slice(x);
    out.dim = d;
    out.points.resize(n * d, 0.0);
    out.labels.resize(n, 0.0);
    out.edges.resize(n, false);
    out.seed = SeedRecord {
        master_seed,
        replication,
    };
    for i in 0..n {
        let p = &mut out.points[i * d..(i + 1) * d];
        cfg.density.sample_into(&mut latent, p);
        let u = unit_open_closed(&mut uniforms);
        out.edges[i] = u <= cfg.kernel.scaled_value(x, p);
        out.labels[i] = cfg.regression.eval(p) + cfg.noise.sample(&mut noise);
    }
}

/// A full LPM graph on `n` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FullGraph {
    n: usize,
    dim: usize,
    points: Vec<f64>,
    adjacency: Vec<bool>,
}

impl FullGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i * self.n..(i + 1) * self.n]
            .iter()
            .filter(|e| **e)
            .count()
    }

    /// Undirected edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            ((i + 1)..self.n)
                .filter(move |&j| self.is_edge(i, j))
                .map(move |j| (i, j))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.n as f64
    }

    /// Edge list with header `src,dst`, 0-based ids, `src < dst`.
    pub fn edges_csv(&self) -> String {
        let mut s = String::from("src,dst\n");
        for (i, j) in self.edges() {
            let _ = writeln!(s, "{i},{j}");
        }
        s
    }

    /// Latent points with header `node,x0,...,x{d-1}`.
    pub fn points_csv(&self) -> String {
        let mut s = String::from("node");
        for k in 0..self.dim {
            let _ = write!(s, ",x{k}");
        }
        s.push('\n');
        for i in 0..self.n {
            let _ = write!(s, "{i}");
            for v in self.point(i) {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }
}

/// Samples every pair of an `n`-node LPM graph.
///
/// Fails with a resource error when `n (n - 1) / 2` exceeds `cfg.run.edge_budget`.
pub fn sample_full_graph(cfg: &ScenarioConfig, n: usize, seed: u64) -> Result<FullGraph> {
    if n == 0 {
        return Err(invalid("full graph needs n >= 1"));
    }
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    if pairs > cfg.run.edge_budget {
        return Err(GnwError::Resource(format!(
            "{pairs} node pairs exceed the edge budget {}",
            cfg.run.edge_budget
        )));
    }
    let d = cfg.dimension;
    let mut latent = stream(seed, StreamTag::Latent, 0);
    let mut uniforms = stream(seed, StreamTag::PairUniform, 0);
    let mut points = vec![0.0; n * d];
    for p in points.chunks_exact_mut(d) {
        cfg.density.sample_into(&mut latent, p);
    }
    let mut adjacency = vec![false; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let k = cfg
                .kernel
                .scaled_value(&points[i * d..(i + 1) * d], &points[j * d..(j + 1) * d]);
            let e = unit_open_closed(&mut uniforms) <= k;
            adjacency[i * n + j] = e;
            adjacency[j * n + i] = e;
        }
    }
    Ok(FullGraph {
        n,
        dim: d,
        points,
        adjacency,
    })
}

/// A set `I` of 1-based node indices, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubsetIndex(Vec<usize>);

impl SubsetIndex {
    pub fn empty() -> Self {
        SubsetIndex(Vec::new())
    }

    /// Sorts and deduplicates; rejects index 0.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.first() == Some(&0) {
            return Err(invalid("subset indices are 1-based"));
        }
        Ok(SubsetIndex(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn union(&self, other: &SubsetIndex) -> SubsetIndex {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        v.dedup();
        SubsetIndex(v)
    }
}

/// `R_I(x)`: `1 / (|I| + sum_{j not in I} a_j)` for nonempty `I`,
/// `1 / sum a_j` for empty `I` with at least one edge, `0` otherwise.
pub fn r_subset(edges: &[bool], subset: &SubsetIndex) -> Result<f64> {
    let denom = r_denominator(edges, subset)?;
    Ok(if denom == 0 { 0.0 } else { 1.0 / denom as f64 })
}

/// Denominator of `R_I` as an integer; `0` encodes `R_I = 0`.
pub fn r_denominator(edges: &[bool], subset: &SubsetIndex) -> Result<usize> {
    if let Some(&last) = subset.indices().last() {
        if last > edges.len() {
            return Err(invalid(format!(
                "subset index {last} out of range for n = {}",
                edges.len()
            )));
        }
    }
    let outside = edges
        .iter()
        .enumerate()
        .filter(|(j, e)| **e && !subset.contains(j + 1))
        .count();
    Ok(subset.len() + outside)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// First failing identity found by [`decoupling_selftest`].
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub edges: Vec<bool>,
    pub i_set: SubsetIndex,
    pub j_set: SubsetIndex,
    pub lhs: f64,
    pub rhs: f64,
    pub identity: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub n: usize,
    pub patterns: u64,
    pub checks: u64,
    pub counterexample: Option<Counterexample>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn recip(denom: usize) -> f64 {
    if denom == 0 {
        0.0
    } else {
        1.0 / denom as f64
    }
}

pub const SELFTEST_MAX_N: usize = 16;

/// Exhaustively checks the decoupling identities over all `2^n` edge patterns.
///
/// For every singleton `I = {i}` and `J` in `{ {}, {i+1}, {i+1, i+2} }`
/// (indices wrapped modulo `n`, pairs only when `n >= 3`), checks
/// `R_J * prod_I a = R_{I u J} * prod_I a` exactly, and per pattern
/// `sum_i a_i R_{i} = 1(sum a > 0)` exactly. Both identities are checked on
/// the integer denominators of `R`, so no rounding is involved.
pub fn decoupling_selftest(n: usize) -> Result<SelftestReport> {
    if n == 0 {
        return Err(invalid("selftest needs n >= 1"));
    }
    if n > SELFTEST_MAX_N {
        return Err(GnwError::Resource(format!(
            "selftest enumerates 2^n patterns; n = {n} exceeds {SELFTEST_MAX_N}"
        )));
    }
    let wrap = |i: usize| (i % n) + 1;
    let mut checks = 0u64;
    let mut edges = vec![false; n];
    for pattern in 0u64..(1u64 << n) {
        for (k, e) in edges.iter_mut().enumerate() {
            *e = pattern >> k & 1 == 1;
        }
        // sum_i a_i R_{i} as the reduced fraction num / den
        let (mut num, mut den) = (0u64, 1u64);
        for i in 1..=n {
            let singleton = SubsetIndex(vec![i]);
            if edges[i - 1] {
                let q = r_denominator(&edges, &singleton)? as u64;
                (num, den) = (num * q + den, den * q);
                let g = gcd(num, den);
                (num, den) = (num / g, den / g);
            }

            let mut js = vec![SubsetIndex::empty()];
            if n >= 2 {
                js.push(SubsetIndex::new(vec![wrap(i)])?);
            }
            if n >= 3 {
                js.push(SubsetIndex::new(vec![wrap(i), wrap(i + 1)])?);
            }
            for j_set in js {
                checks += 1;
                if !edges[i - 1] {
                    // both sides carry the factor a_i = 0
                    continue;
                }
                let lhs = r_denominator(&edges, &j_set)?;
                let rhs = r_denominator(&edges, &singleton.union(&j_set))?;
                if lhs != rhs {
                    return Ok(SelftestReport {
                        n,
                        patterns: pattern + 1,
                        checks,
                        counterexample: Some(Counterexample {
                            edges: edges.clone(),
                            i_set: singleton,
                            j_set,
                            lhs: recip(lhs),
                            rhs: recip(rhs),
                            identity: "R_J prod a = R_(I u J) prod a",
                        }),
                    });
                }
            }
        }
        let z = u64::from(edges.iter().any(|e| *e));
        checks += 1;
        if !(num == z && (z == 0 || den == 1)) {
            return Ok(SelftestReport {
                n,
                patterns: pattern + 1,
                checks,
                counterexample: Some(Counterexample {
                    edges: edges.clone(),
                    i_set: SubsetIndex::empty(),
                    j_set: SubsetIndex::empty(),
                    lhs: num as f64 / den as f64,
                    rhs: z as f64,
                    identity: "sum_i a_i R_i = Z",
                }),
            });
        }
    }
    Ok(SelftestReport {
        n,
        patterns: 1u64 << n,
        checks,
        counterexample: None,
    })
}
