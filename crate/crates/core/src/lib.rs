//! Exact star products on the symmetric algebra of a finite-dimensional Lie
//! algebra, together with a numeric cross-check harness.
//!
//! The crate builds three associative products on polynomials over the dual
//! of a Lie algebra: the product transferred from the enveloping algebra
//! through PBW symmetrization alone (`Gutt`), through PBW composed with the
//! Duflo element (`Standard`), and through PBW composed with the logarithmic
//! element (`Logarithmic`). The logarithmic element differs from the Duflo
//! element by an invertible operator built from the odd trace polynomials
//! with formal odd-zeta coefficients; that operator intertwines the two
//! products exactly.
//!
//! All symbolic computation is exact over `Q[l3, l5, ...]`. The `graphs`
//! module independently cross-checks the low orders of the standard product
//! against Monte-Carlo integrals of propagator forms over configuration
//! spaces.

pub mod error;
pub mod graphs;
pub mod lie;
pub mod parse;
pub mod ring;
pub mod sym;
pub mod uea;

pub mod duflo;

pub use error::{Error, Result};
pub use lie::{builtin, load_lie_algebra, LieAlgebra, PoissonBivector, TracePolynomial};
pub use ring::{Coefficient, NumericValue, Rational};
pub use sym::{ConstOp, Monomial, Poly};
pub use uea::{UeaAlgebra, UeaElement};

pub use duflo::{
    bernoulli, duflo_element, equivalence_operator, log_element, order_component, Quantizer,
    StarProductKind, DEFAULT_DEGREE_CAP,
};
pub use graphs::{
    enumerate_admissible, graph_operator, propagator_value, star_order_from_graphs, weight_mc,
    AdmissibleGraph, NumericPoly, Propagator, WeightEstimate,
};
