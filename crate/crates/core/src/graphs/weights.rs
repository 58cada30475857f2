//! Monte-Carlo estimation of graph weights.
//!
//! The weight of a graph of type `(n, m)` with `2n + m - 2` edges is the
//! integral over the configuration space of the wedge of one propagator
//! 1-form per edge, in edge-list order. The integrand at a sampled
//! configuration is the determinant pairing of those forms against the free
//! real coordinates of the gauge slice.
//!
//! Gauge fixing: for m = 2 the two real points are pinned (0 and 1 by
//! default), for m = 1 the real point is pinned at 0 and the first aerial
//! vertex moves on a half-circle, for m = 0 the first aerial vertex is
//! pinned (at i by default). Upper half-plane points are drawn by mapping
//! unit-square samples through `z = (u/(1-u)) e^{i pi v}` with the explicit
//! Jacobian `pi r / (1-u)^2`.
//!
//! Sampling runs in fixed-size batches; batch `b` owns stream `b + 1` of the
//! seeded generator, and batches merge in index order, so estimates are
//! bit-identical for a given seed regardless of thread count.

use num::complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{AdmissibleGraph, MAX_GRAPH_N};
use crate::graphs::propagator::{propagator_value, Propagator};

/// Distance below which a configuration counts as singular and the sample
/// contributes zero.
pub const SINGULAR_GUARD: f64 = 1e-6;

const BATCH_SIZE: u64 = 1 << 14;

/// A Monte-Carlo weight estimate. Reproducible from the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightEstimate {
    pub value: Complex64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub rejected: u64,
}

/// Choice of gauge slice; estimates agree across gauges up to statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Gauge {
    #[default]
    Primary,
    Alternate,
}

enum Column {
    /// d/d(re z) of a vertex.
    X(usize),
    /// d/d(im z) of a vertex.
    Y(usize),
    /// Tangent along a curve at a vertex: entries pair against
    /// `dx * t.0 + dy * t.1`.
    Dir(usize, f64, f64),
}

struct Slice {
    /// Fixed positions by vertex index; `None` means sampled.
    fixed: Vec<Option<Complex64>>,
    /// Half-circle radius for the m = 1 gauge, if used (vertex 0).
    circle_radius: Option<f64>,
}

fn build_slice(graph: &AdmissibleGraph, gauge: Gauge) -> Result<Slice> {
    let n = graph.n();
    let m = graph.m();
    let total = n + m;
    let mut fixed = vec![None; total];
    let mut circle_radius = None;
    match m {
        2 => {
            let (a, b) = match gauge {
                Gauge::Primary => (0.0, 1.0),
                Gauge::Alternate => (-2.0, 3.0),
            };
            fixed[n] = Some(Complex64::new(a, 0.0));
            fixed[n + 1] = Some(Complex64::new(b, 0.0));
        }
        0 => {
            let height = match gauge {
                Gauge::Primary => 1.0,
                Gauge::Alternate => 2.0,
            };
            fixed[0] = Some(Complex64::new(0.0, height));
        }
        1 => {
            fixed[n] = Some(Complex64::new(0.0, 0.0));
            circle_radius = Some(match gauge {
                Gauge::Primary => 1.0,
                Gauge::Alternate => 2.0,
            });
        }
        other => return Err(Error::UnsupportedGauge(other)),
    }
    Ok(Slice {
        fixed,
        circle_radius,
    })
}

fn columns_for(graph: &AdmissibleGraph, slice: &Slice) -> Vec<Column> {
    let mut cols = Vec::new();
    for v in 0..graph.n() {
        if slice.fixed[v].is_some() {
            continue;
        }
        if v == 0 && slice.circle_radius.is_some() {
            // filled per-sample with the actual tangent
            cols.push(Column::Dir(0, 0.0, 0.0));
            continue;
        }
        cols.push(Column::X(v));
        cols.push(Column::Y(v));
    }
    cols
}

/// Complex determinant by Gaussian elimination with partial pivoting.
fn determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                m[a][col]
                    .norm_sqr()
                    .partial_cmp(&m[b][col].norm_sqr())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if m[pivot][col].norm_sqr() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        let inv = m[col][col].inv();
        for row in (col + 1)..n {
            let factor = m[row][col] * inv;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for k in col..n {
                let sub = factor * m[col][k];
                m[row][k] -= sub;
            }
        }
    }
    det
}

struct BatchStats {
    sum: Complex64,
    sum_sq: f64,
    rejected: u64,
}

fn run_batch(
    graph: &AdmissibleGraph,
    p: Propagator,
    slice: &Slice,
    seed: u64,
    stream: u64,
    count: u64,
) -> BatchStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let total = graph.n() + graph.m();
    let mut positions = vec![Complex64::new(0.0, 0.0); total];
    let mut stats = BatchStats {
        sum: Complex64::new(0.0, 0.0),
        sum_sq: 0.0,
        rejected: 0,
    };
    let mut columns = columns_for(graph, slice);

    'outer: for _ in 0..count {
        let mut jacobian = 1.0;
        // draw every random coordinate unconditionally so the stream layout
        // is independent of rejection
        let mut phi_tangent = (0.0, 0.0);
        for v in 0..total {
            match slice.fixed[v] {
                Some(z) => positions[v] = z,
                None => {
                    if v == 0 {
                        if let Some(radius) = slice.circle_radius {
                            let t: f64 = rng.gen();
                            let phi = std::f64::consts::PI * t;
                            positions[0] =
                                Complex64::new(radius * phi.cos(), radius * phi.sin());
                            jacobian *= std::f64::consts::PI;
                            phi_tangent = (-radius * phi.sin(), radius * phi.cos());
                            continue;
                        }
                    }
                    let u: f64 = rng.gen();
                    let t: f64 = rng.gen();
                    if u > 1.0 - 1e-9 {
                        stats.rejected += 1;
                        continue 'outer;
                    }
                    let r = u / (1.0 - u);
                    let phi = std::f64::consts::PI * t;
                    positions[v] = Complex64::new(r * phi.cos(), r * phi.sin());
                    // dx dy = r dr dphi, dr/du = 1/(1-u)^2
                    jacobian *= std::f64::consts::PI * r / ((1.0 - u) * (1.0 - u));
                }
            }
        }
        // singular-locus guard
        for a in 0..total {
            for b in (a + 1)..total {
                if (positions[a] - positions[b]).norm() < SINGULAR_GUARD {
                    stats.rejected += 1;
                    continue 'outer;
                }
            }
        }
        for c in columns.iter_mut() {
            if let Column::Dir(v, tx, ty) = c {
                debug_assert_eq!(*v, 0);
                *tx = phi_tangent.0;
                *ty = phi_tangent.1;
            }
        }
        // rows: one per edge in list order
        let mut matrix = Vec::with_capacity(graph.edges().len());
        let mut singular = false;
        for &(src, tgt) in graph.edges() {
            let comps = match propagator_value(p, positions[src], positions[tgt]) {
                Ok(c) => c,
                Err(_) => {
                    singular = true;
                    break;
                }
            };
            let row: Vec<Complex64> = columns
                .iter()
                .map(|col| match *col {
                    Column::X(v) if v == src => comps.dx1,
                    Column::X(v) if v == tgt => comps.dx2,
                    Column::Y(v) if v == src => comps.dy1,
                    Column::Y(v) if v == tgt => comps.dy2,
                    Column::Dir(v, tx, ty) if v == src => comps.dx1 * tx + comps.dy1 * ty,
                    Column::Dir(v, tx, ty) if v == tgt => comps.dx2 * tx + comps.dy2 * ty,
                    _ => Complex64::new(0.0, 0.0),
                })
                .collect();
            matrix.push(row);
        }
        if singular {
            stats.rejected += 1;
            continue;
        }
        let value = determinant(matrix) * jacobian;
        if !value.re.is_finite() || !value.im.is_finite() {
            stats.rejected += 1;
            continue;
        }
        stats.sum += value;
        stats.sum_sq += value.norm_sqr();
    }
    stats
}

/// Estimates the weight integral of a top-degree graph under the given
/// propagator. Requires `|E| = 2n + m - 2`, `1 <= n <= 3`.
pub fn weight_mc(
    graph: &AdmissibleGraph,
    p: Propagator,
    samples: u64,
    seed: u64,
) -> Result<WeightEstimate> {
    weight_mc_gauged(graph, p, samples, seed, Gauge::Primary)
}

/// [`weight_mc`] with an explicit gauge slice.
pub fn weight_mc_gauged(
    graph: &AdmissibleGraph,
    p: Propagator,
    samples: u64,
    seed: u64,
    gauge: Gauge,
) -> Result<WeightEstimate> {
    if p == Propagator::FourColoredLog {
        return Err(Error::PropagatorDomain(
            "weights over half-plane configurations take the standard or logarithmic propagator"
                .into(),
        ));
    }
    let n = graph.n();
    if n == 0 || n > MAX_GRAPH_N {
        return Err(Error::GraphCapExceeded(n, MAX_GRAPH_N));
    }
    let expected = 2 * n + graph.m() - 2;
    if expected == 0 || graph.edges().len() != expected {
        return Err(Error::EdgeCount {
            edges: graph.edges().len(),
            expected,
        });
    }
    let slice = build_slice(graph, gauge)?;
    let batches = samples.div_ceil(BATCH_SIZE);
    let stats: Vec<BatchStats> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = BATCH_SIZE.min(samples - b * BATCH_SIZE);
            run_batch(graph, p, &slice, seed, b + 1, count)
        })
        .collect();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sum_sq = 0.0;
    let mut rejected = 0;
    for s in &stats {
        sum += s.sum;
        sum_sq += s.sum_sq;
        rejected += s.rejected;
    }
    let nf = samples as f64;
    let mean = sum / nf;
    let variance = ((sum_sq / nf - mean.norm_sqr()) * nf / (nf - 1.0)).max(0.0);
    Ok(WeightEstimate {
        value: mean,
        std_error: (variance / nf).sqrt(),
        samples,
        seed,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_weight_is_one_half() {
        let graph = AdmissibleGraph::new(1, 2, vec![(0, 1), (0, 2)]).unwrap();
        let est = weight_mc(&graph, Propagator::Standard, 200_000, 7).unwrap();
        assert!(est.value.im.abs() < 1e-12);
        assert!(
            (est.value.re - 0.5).abs() < 0.01,
            "estimate {} +- {}",
            est.value.re,
            est.std_error
        );
    }

    #[test]
    fn n1_weight_other_edge_order_is_minus_one_half() {
        let graph = AdmissibleGraph::new(1, 2, vec![(0, 2), (0, 1)]).unwrap();
        let est = weight_mc(&graph, Propagator::Standard, 200_000, 7).unwrap();
        assert!((est.value.re + 0.5).abs() < 0.01);
    }

    #[test]
    fn deterministic_given_seed() {
        let graph = AdmissibleGraph::new(1, 2, vec![(0, 1), (0, 2)]).unwrap();
        let a = weight_mc(&graph, Propagator::Standard, 50_000, 11).unwrap();
        let b = weight_mc(&graph, Propagator::Standard, 50_000, 11).unwrap();
        assert_eq!(a, b);
        let c = weight_mc(&graph, Propagator::Standard, 50_000, 12).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn gauges_agree_on_n1() {
        let graph = AdmissibleGraph::new(1, 2, vec![(0, 1), (0, 2)]).unwrap();
        let a = weight_mc_gauged(&graph, Propagator::Standard, 200_000, 3, Gauge::Primary)
            .unwrap();
        let b = weight_mc_gauged(&graph, Propagator::Standard, 200_000, 3, Gauge::Alternate)
            .unwrap();
        let spread = (a.value - b.value).norm();
        let budget = 3.0 * (a.std_error.hypot(b.std_error));
        assert!(spread < budget.max(0.01), "{spread} vs {budget}");
    }

    #[test]
    fn m1_single_edge_weight_is_one() {
        // one aerial vertex, one ground vertex, one edge: integral of the
        // normalized angle form over the half-circle
        let graph = AdmissibleGraph::new(1, 1, vec![(0, 1)]).unwrap();
        let est = weight_mc(&graph, Propagator::Standard, 100_000, 5).unwrap();
        assert!((est.value.re - 1.0).abs() < 0.01, "{}", est.value);
    }

    #[test]
    fn edge_count_enforced() {
        let graph = AdmissibleGraph::new(2, 2, vec![(0, 2), (0, 3), (1, 2)]).unwrap();
        assert!(matches!(
            weight_mc(&graph, Propagator::Standard, 1000, 1).unwrap_err(),
            Error::EdgeCount {
                edges: 3,
                expected: 4
            }
        ));
    }
}
