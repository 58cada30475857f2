//! Admissible graphs, their multidifferential operators on a linear Poisson
//! structure, propagators, and Monte-Carlo weight integration.
//!
//! Vertices are indexed with the aerial (type-1) vertices first, `0..n`,
//! followed by the ground (type-2) vertices `n..n+m`. Edges depart only from
//! aerial vertices. The edge list order is meaningful twice over: the weight
//! integrand wedges the propagator forms in list order, and for operator
//! assembly the first listed out-edge of a vertex carries the first
//! derivative slot of the bivector. The serialized form uses 1-based vertex
//! numbers.

mod propagator;
mod weights;

pub use propagator::{log_swapped, propagator_value, FormComponents, Propagator};
pub use weights::{weight_mc, weight_mc_gauged, Gauge, WeightEstimate, SINGULAR_GUARD};

use std::collections::BTreeMap;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::ring::Rational;
use crate::sym::{Monomial, Poly};

/// Hard cap on the number of aerial vertices for enumeration and weights.
pub const MAX_GRAPH_N: usize = 3;

/// A directed graph of type `(n, m)`: no edges from ground vertices, no
/// short loops, no repeated directed edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleGraph {
    n: usize,
    m: usize,
    edges: Vec<(usize, usize)>,
}

impl AdmissibleGraph {
    pub fn new(n: usize, m: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let total = n + m;
        let mut seen = std::collections::HashSet::new();
        for &(src, tgt) in &edges {
            if src >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({},{}) departs from a ground vertex",
                    src + 1,
                    tgt + 1
                )));
            }
            if tgt >= total {
                return Err(Error::InvalidGraph(format!(
                    "edge target {} out of range",
                    tgt + 1
                )));
            }
            if src == tgt {
                return Err(Error::InvalidGraph(format!(
                    "short loop at vertex {}",
                    src + 1
                )));
            }
            if !seen.insert((src, tgt)) {
                return Err(Error::InvalidGraph(format!(
                    "repeated edge ({},{})",
                    src + 1,
                    tgt + 1
                )));
            }
        }
        Ok(AdmissibleGraph { n, m, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Out-edges of a vertex, in list order.
    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(s, _))| s == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// In-edges of a vertex, in list order.
    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(_, t))| t == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// The unique admissible graph of type (2,0) with two edges: the
    /// two-cycle whose logarithmic weight vanishes.
    pub fn figure_two_cycle() -> Self {
        AdmissibleGraph {
            n: 2,
            m: 0,
            edges: vec![(0, 1), (1, 0)],
        }
    }

    /// A type (3,0) top-degree graph whose third vertex has out-degree zero;
    /// the vanishing-lemma witness.
    pub fn vanishing_witness() -> Self {
        AdmissibleGraph {
            n: 3,
            m: 0,
            edges: vec![(0, 1), (0, 2), (1, 0), (1, 2)],
        }
    }

    pub fn to_json(&self) -> String {
        let raw = RawGraph {
            n: self.n,
            m: self.m,
            edges: self
                .edges
                .iter()
                .map(|&(s, t)| [s + 1, t + 1])
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("graph serialization")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let raw: RawGraph = serde_json::from_str(src)
            .map_err(|e| Error::InvalidGraph(format!("JSON: {e}")))?;
        let mut edges = Vec::with_capacity(raw.edges.len());
        for [s, t] in raw.edges {
            if s == 0 || t == 0 {
                return Err(Error::InvalidGraph("vertex numbers are 1-based".into()));
            }
            edges.push((s - 1, t - 1));
        }
        AdmissibleGraph::new(raw.n, raw.m, edges)
    }
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    m: usize,
    edges: Vec<[usize; 2]>,
}

/// All admissible graphs of type `(n, m)` in which every aerial vertex has
/// out-degree exactly 2 (the star-product graphs). Edges are listed grouped
/// by source vertex, first slot then second slot.
pub fn enumerate_admissible(n: usize, m: usize) -> Result<Vec<AdmissibleGraph>> {
    if n > MAX_GRAPH_N {
        return Err(Error::GraphCapExceeded(n, MAX_GRAPH_N));
    }
    if m > 2 {
        return Err(Error::InvalidGraph(format!(
            "enumeration supports m <= 2, got {m}"
        )));
    }
    let total = n + m;
    // per-vertex choices: ordered pairs of distinct targets
    let mut choices: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n);
    for v in 0..n {
        let mut pairs = Vec::new();
        for t1 in 0..total {
            if t1 == v {
                continue;
            }
            for t2 in 0..total {
                if t2 == v || t2 == t1 {
                    continue;
                }
                pairs.push((t1, t2));
            }
        }
        choices.push(pairs);
    }
    let mut out = Vec::new();
    let mut cursor = vec![0usize; n];
    loop {
        let mut edges = Vec::with_capacity(2 * n);
        for v in 0..n {
            let (t1, t2) = choices[v][cursor[v]];
            edges.push((v, t1));
            edges.push((v, t2));
        }
        out.push(AdmissibleGraph { n, m, edges });
        // advance the mixed-radix counter
        let mut v = 0;
        loop {
            if v == n {
                return Ok(out);
            }
            cursor[v] += 1;
            if cursor[v] < choices[v].len() {
                break;
            }
            cursor[v] = 0;
            v += 1;
        }
        if n == 0 {
            return Ok(out);
        }
    }
}

/// All admissible graphs of type `(n, m)` with exactly `edge_count` edges and
/// no out-degree constraint. Used for weight-only graphs such as the (2,0)
/// two-cycle.
pub fn enumerate_with_edge_count(
    n: usize,
    m: usize,
    edge_count: usize,
) -> Result<Vec<AdmissibleGraph>> {
    if n > MAX_GRAPH_N {
        return Err(Error::GraphCapExceeded(n, MAX_GRAPH_N));
    }
    let total = n + m;
    let mut allowed = Vec::new();
    for s in 0..n {
        for t in 0..total {
            if t != s {
                allowed.push((s, t));
            }
        }
    }
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn combos(
        allowed: &[(usize, usize)],
        start: usize,
        remaining: usize,
        pick: &mut Vec<(usize, usize)>,
        n: usize,
        m: usize,
        out: &mut Vec<AdmissibleGraph>,
    ) {
        if remaining == 0 {
            out.push(AdmissibleGraph {
                n,
                m,
                edges: pick.clone(),
            });
            return;
        }
        for i in start..allowed.len() {
            if allowed.len() - i < remaining {
                break;
            }
            pick.push(allowed[i]);
            combos(allowed, i + 1, remaining - 1, pick, n, m, out);
            pick.pop();
        }
    }
    combos(&allowed, 0, edge_count, &mut pick, n, m, &mut out);
    Ok(out)
}

/// The multidifferential operator of a graph evaluated on the linear Poisson
/// structure of `lie` and the ground polynomials, exact over the rationals.
///
/// Each aerial vertex contributes `f_ij^k x_k` with its first out-edge
/// carrying the `i` derivative and its second the `j` derivative; since the
/// structure is linear, any vertex hit by two or more derivatives kills the
/// term, and graphs with an aerial vertex of out-degree other than two
/// contribute nothing (the bivector cannot absorb them).
pub fn graph_operator(
    graph: &AdmissibleGraph,
    lie: &LieAlgebra,
    ground: &[Poly],
) -> Result<Poly> {
    let d = lie.dim();
    if ground.len() != graph.m() {
        return Err(Error::InvalidGraph(format!(
            "graph has {} ground vertices but {} polynomials were supplied",
            graph.m(),
            ground.len()
        )));
    }
    for g in ground {
        if g.dim() != d {
            return Err(Error::DimensionMismatch(g.dim(), d));
        }
    }
    let n = graph.n();
    let mut result = Poly::zero(d);

    // slots[v] = (first out-edge, second out-edge)
    let mut slots = Vec::with_capacity(n);
    for v in 0..n {
        let out = graph.out_edges(v);
        if out.len() != 2 {
            return Ok(result);
        }
        slots.push((out[0], out[1]));
    }

    // candidate (i, j) index pairs per vertex: those with a nonzero bracket
    let mut pairs: Vec<(usize, usize, Vec<(usize, Rational)>)> = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let b = lie.bracket(i, j);
            if !b.is_empty() {
                pairs.push((i, j, b));
            }
        }
    }
    if pairs.is_empty() && n > 0 {
        return Ok(result);
    }

    let mut cursor = vec![0usize; n];
    'assignments: loop {
        // derivative index carried by each edge
        let mut edge_index = vec![0usize; graph.edges().len()];
        for v in 0..n {
            let (i, j, _) = pairs[cursor[v]];
            edge_index[slots[v].0] = i;
            edge_index[slots[v].1] = j;
        }
        // assemble the product over vertices
        let mut scalar = Rational::from_integer(1.into());
        let mut polys: Vec<Poly> = Vec::new();
        let mut vanished = false;
        for v in 0..n {
            let (_, _, bracket) = &pairs[cursor[v]];
            let incoming = graph.in_edges(v);
            match incoming.len() {
                0 => {
                    let mut linear = Poly::zero(d);
                    for (k, c) in bracket {
                        linear.add_term(
                            Monomial::var(d, *k),
                            crate::ring::Coefficient::from_rational(c.clone()),
                        );
                    }
                    polys.push(linear);
                }
                1 => {
                    let a = edge_index[incoming[0]];
                    match bracket.iter().find(|(k, _)| *k == a) {
                        Some((_, c)) => scalar *= c.clone(),
                        None => {
                            vanished = true;
                            break;
                        }
                    }
                }
                _ => {
                    vanished = true;
                    break;
                }
            }
        }
        if !vanished {
            let mut term = Poly::constant(
                d,
                crate::ring::Coefficient::from_rational(scalar),
            );
            for (t, g) in ground.iter().enumerate() {
                let mut gt = g.clone();
                for e in graph.in_edges(n + t) {
                    gt = gt.partial_derivative(edge_index[e]);
                    if gt.is_zero() {
                        break;
                    }
                }
                term = term.mul(&gt)?;
                if term.is_zero() {
                    break;
                }
            }
            if !term.is_zero() {
                for p in &polys {
                    term = term.mul(p)?;
                }
                result = result.add(&term)?;
            }
        }
        // advance
        let mut v = 0;
        loop {
            if v == n {
                break 'assignments;
            }
            cursor[v] += 1;
            if cursor[v] < pairs.len() {
                break;
            }
            cursor[v] = 0;
            v += 1;
        }
        if n == 0 {
            break;
        }
    }
    Ok(result)
}

/// A polynomial with complex floating coefficients and per-coefficient
/// statistical errors; the numeric image of graph-side star terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NumericPoly {
    pub terms: BTreeMap<Monomial, NumericTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericTerm {
    pub value: Complex64,
    pub std_error: f64,
}

impl NumericPoly {
    pub fn from_poly_exact(p: &Poly) -> Result<Self> {
        let mut out = NumericPoly::default();
        for (m, c) in p.terms() {
            out.terms.insert(
                m.clone(),
                NumericTerm {
                    value: c.evaluate()?,
                    std_error: 0.0,
                },
            );
        }
        Ok(out)
    }

    fn accumulate(&mut self, mono: &Monomial, value: Complex64, std_error: f64) {
        let entry = self.terms.entry(mono.clone()).or_insert(NumericTerm {
            value: Complex64::new(0.0, 0.0),
            std_error: 0.0,
        });
        entry.value += value;
        entry.std_error = entry.std_error.hypot(std_error);
    }
}

/// The order-`k` graph-side star term `(1/k!) (1/2^k) sum_G w(G) B_G(f, g)`
/// with Monte-Carlo weights. The per-vertex `1/2!` accounts for the two
/// interchangeable derivative slots of the bivector at each aerial vertex,
/// matching the symbolic normalization in which the first-order term of
/// `f (star) g` is half the Poisson bracket.
pub fn star_order_from_graphs(
    lie: &LieAlgebra,
    k: usize,
    f: &Poly,
    g: &Poly,
    p: Propagator,
    samples: u64,
    seed: u64,
) -> Result<NumericPoly> {
    if k > 2 {
        return Err(Error::OrderCapExceeded(k));
    }
    if k == 0 {
        return NumericPoly::from_poly_exact(&f.mul(g)?);
    }
    let graphs = enumerate_admissible(k, 2)?;
    let mut out = NumericPoly::default();
    let mut factor = 1.0;
    for j in 1..=k {
        factor /= j as f64; // 1/k!
    }
    factor /= (2f64).powi(k as i32); // per-vertex slot symmetry
    for (index, graph) in graphs.iter().enumerate() {
        let operator = graph_operator(graph, lie, &[f.clone(), g.clone()])?;
        if operator.is_zero() {
            continue;
        }
        let graph_seed = seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let weight = weight_mc(graph, p, samples, graph_seed)?;
        for (mono, coeff) in operator.terms() {
            let c = coeff.evaluate()?;
            out.accumulate(
                mono,
                weight.value * c * factor,
                weight.std_error * c.norm() * factor,
            );
        }
    }
    // drop exact-zero accumulations for stable comparisons
    out.terms
        .retain(|_, t| t.value.norm() != 0.0 || t.std_error != 0.0);
    Ok(out)
}

/// Formats a complex number as `a+bi` with the given significant digits.
pub fn format_complex(z: Complex64, sig: usize) -> String {
    let fmt = |x: f64| format!("{x:.*e}", sig.saturating_sub(1));
    if z.im >= 0.0 || z.im.is_nan() {
        format!("{}+{}i", fmt(z.re), fmt(z.im))
    } else {
        format!("{}-{}i", fmt(z.re), fmt(-z.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::builtin;
    use crate::ring::Coefficient;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_admissible(1, 2).unwrap().len(), 2);
        assert_eq!(enumerate_admissible(2, 2).unwrap().len(), 36);
        assert_eq!(enumerate_admissible(0, 2).unwrap().len(), 1);
        assert!(matches!(
            enumerate_admissible(4, 2).unwrap_err(),
            Error::GraphCapExceeded(4, 3)
        ));
    }

    #[test]
    fn two_zero_edge_enumeration_finds_the_two_cycle() {
        let graphs = enumerate_with_edge_count(2, 0, 2).unwrap();
        assert_eq!(graphs.len(), 1);
        assert_eq!(graphs[0], AdmissibleGraph::figure_two_cycle());
    }

    #[test]
    fn graph_validation() {
        assert!(AdmissibleGraph::new(1, 2, vec![(1, 0), (1, 2)]).is_err()); // from ground
        assert!(AdmissibleGraph::new(2, 0, vec![(0, 0)]).is_err()); // loop
        assert!(AdmissibleGraph::new(2, 0, vec![(0, 1), (0, 1)]).is_err()); // repeat
        assert!(AdmissibleGraph::new(2, 1, vec![(0, 1), (1, 2)]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let g = AdmissibleGraph::vanishing_witness();
        let s = g.to_json();
        assert_eq!(AdmissibleGraph::from_json(&s).unwrap(), g);
        assert!(s.contains("\"n\""));
    }

    #[test]
    fn operator_single_vertex_reads_bracket() {
        let h3 = builtin("heisenberg3").unwrap();
        let graph = AdmissibleGraph::new(1, 2, vec![(0, 1), (0, 2)]).unwrap();
        let x = Poly::var(3, 0);
        let y = Poly::var(3, 1);
        let b = graph_operator(&graph, &h3, &[x.clone(), y.clone()]).unwrap();
        assert_eq!(b, Poly::var(3, 2)); // z
        let swapped = AdmissibleGraph::new(1, 2, vec![(0, 2), (0, 1)]).unwrap();
        let b2 = graph_operator(&swapped, &h3, &[x, y]).unwrap();
        assert_eq!(b2, Poly::var(3, 2).neg());
    }

    #[test]
    fn operator_empty_graph_multiplies() {
        let h3 = builtin("heisenberg3").unwrap();
        let graph = AdmissibleGraph::new(0, 2, vec![]).unwrap();
        let f = h3.parse_poly("x^2 + z").unwrap();
        let g = h3.parse_poly("y - 1").unwrap();
        let b = graph_operator(&graph, &h3, &[f.clone(), g.clone()]).unwrap();
        assert_eq!(b, f.mul(&g).unwrap());
    }

    #[test]
    fn operator_double_derivative_on_linear_vertex_vanishes() {
        // vertices 1 and 2 both point at vertex 0, whose factor is linear:
        // the second derivative kills every assignment
        let sl2 = builtin("sl2").unwrap();
        let graph = AdmissibleGraph::new(
            3,
            2,
            vec![(0, 3), (0, 4), (1, 0), (1, 3), (2, 0), (2, 4)],
        )
        .unwrap();
        let e = Poly::var(3, 0);
        let f = Poly::var(3, 1);
        let b = graph_operator(&graph, &sl2, &[e, f]).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn order_zero_is_plain_product() {
        let h3 = builtin("heisenberg3").unwrap();
        let f = h3.parse_poly("x").unwrap();
        let g = h3.parse_poly("y").unwrap();
        let np = star_order_from_graphs(&h3, 0, &f, &g, Propagator::Standard, 10, 1).unwrap();
        let expected = NumericPoly::from_poly_exact(&f.mul(&g).unwrap()).unwrap();
        assert_eq!(np, expected);
    }

    #[test]
    fn order_one_is_half_poisson_on_h3() {
        let h3 = builtin("heisenberg3").unwrap();
        let f = h3.parse_poly("x").unwrap();
        let g = h3.parse_poly("y").unwrap();
        let np =
            star_order_from_graphs(&h3, 1, &f, &g, Propagator::Standard, 200_000, 42).unwrap();
        assert_eq!(np.terms.len(), 1);
        let z = Monomial::from_exponents(vec![0, 0, 1]);
        let term = np.terms.get(&z).expect("z coefficient");
        assert!(
            (term.value.re - 0.5).abs() < 5.0 * term.std_error.max(0.002),
            "{} +- {}",
            term.value,
            term.std_error
        );
        assert!(term.value.im.abs() < 5.0 * term.std_error.max(0.002));
    }

    #[test]
    fn format_complex_digits() {
        let s = format_complex(Complex64::new(0.5, -0.25), 12);
        assert!(s.starts_with("5.0"));
        assert!(s.contains("-2.5"));
        assert!(s.ends_with('i'));
    }

    #[test]
    fn numeric_poly_from_exact() {
        let p = Poly::monomial(2, &[1, 1], Coefficient::from_rational(crate::ring::rat(1, 4)));
        let np = NumericPoly::from_poly_exact(&p).unwrap();
        let t = np.terms.values().next().unwrap();
        assert_eq!(t.value, Complex64::new(0.25, 0.0));
        assert_eq!(t.std_error, 0.0);
    }
}
