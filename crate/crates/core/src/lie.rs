//! Finite-dimensional Lie algebras given by structure constants, the adjoint
//! representation, trace polynomials `c_n = tr(ad(.)^n)`, and the linear
//! (Kirillov-Kostant) Poisson bracket on the dual.
//!
//! Convention: `{x_i, x_j} = sum_k f[i][j]^k x_k` with no extra factor, so the
//! first-order antisymmetrized star product reproduces exactly this bracket.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ring::{format_rational, parse_rational, Coefficient, Rational};
use crate::sym::Poly;

/// A Lie algebra of dimension `d` with named basis and rational structure
/// constants, validated against antisymmetry and the Jacobi identity at
/// construction. Immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    basis: Vec<String>,
    /// brackets[(i,j)] with i < j; the (j,i) value is the negation.
    brackets: BTreeMap<(usize, usize), Vec<(usize, Rational)>>,
}

impl LieAlgebra {
    /// Builds from `i < j` bracket data; antisymmetric completion is implied.
    /// Checks the Jacobi identity exactly.
    pub fn from_brackets(
        dim: usize,
        basis: Vec<String>,
        entries: Vec<((usize, usize), Vec<(usize, Rational)>)>,
    ) -> Result<Self> {
        if basis.len() != dim {
            return Err(Error::InvalidAlgebra(format!(
                "{} basis names for dimension {dim}",
                basis.len()
            )));
        }
        let mut brackets = BTreeMap::new();
        for ((i, j), terms) in entries {
            if i >= j || j >= dim {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket indices ({i},{j}) must satisfy i < j < dim"
                )));
            }
            let mut cleaned: Vec<(usize, Rational)> = Vec::new();
            for (k, c) in terms {
                if k >= dim {
                    return Err(Error::InvalidAlgebra(format!(
                        "target index {k} out of range"
                    )));
                }
                if !c.is_zero() {
                    cleaned.push((k, c));
                }
            }
            if !cleaned.is_empty() {
                cleaned.sort_by_key(|&(k, _)| k);
                if brackets.insert((i, j), cleaned).is_some() {
                    return Err(Error::InvalidAlgebra(format!(
                        "duplicate bracket entry for ({i},{j})"
                    )));
                }
            }
        }
        let algebra = LieAlgebra {
            dim,
            basis,
            brackets,
        };
        algebra.check_jacobi()?;
        Ok(algebra)
    }

    /// Builds from a full table `f[i][j]^k` over all ordered pairs, checking
    /// antisymmetry explicitly before the Jacobi identity.
    pub fn from_full_table(
        dim: usize,
        basis: Vec<String>,
        table: &[((usize, usize, usize), Rational)],
    ) -> Result<Self> {
        let mut full: BTreeMap<(usize, usize, usize), Rational> = BTreeMap::new();
        for &((i, j, k), ref c) in table {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidAlgebra(format!(
                    "index out of range in ({i},{j},{k})"
                )));
            }
            *full.entry((i, j, k)).or_insert_with(Rational::zero) += c.clone();
        }
        let get = |i: usize, j: usize, k: usize| -> Rational {
            full.get(&(i, j, k)).cloned().unwrap_or_else(Rational::zero)
        };
        for i in 0..dim {
            for j in i..dim {
                for k in 0..dim {
                    let lhs = get(i, j, k);
                    let rhs = get(j, i, k);
                    if lhs != -rhs.clone() {
                        return Err(Error::AntisymmetryViolation {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                            lhs: format_rational(&lhs),
                            rhs: format_rational(&rhs),
                        });
                    }
                }
            }
        }
        let mut entries: BTreeMap<(usize, usize), Vec<(usize, Rational)>> = BTreeMap::new();
        for ((i, j, k), c) in full {
            if i < j && !c.is_zero() {
                entries.entry((i, j)).or_default().push((k, c));
            }
        }
        Self::from_brackets(dim, basis, entries.into_iter().collect())
    }

    fn check_jacobi(&self) -> Result<()> {
        // sum_m f_ij^m f_mk^l + f_jk^m f_mi^l + f_ki^m f_mj^l = 0
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                for k in (j + 1)..self.dim {
                    let mut acc = vec![Rational::zero(); self.dim];
                    for &(pair_a, pair_b, other) in
                        &[(i, j, k), (j, k, i), (k, i, j)]
                    {
                        for (m, c) in self.bracket(pair_a, pair_b) {
                            for (l, c2) in self.bracket(m, other) {
                                acc[l] += c.clone() * c2;
                            }
                        }
                    }
                    for (l, v) in acc.iter().enumerate() {
                        if !v.is_zero() {
                            return Err(Error::JacobiViolation {
                                i: i + 1,
                                j: j + 1,
                                k: k + 1,
                                l: l + 1,
                                value: format_rational(v),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    pub fn name_index(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == name)
    }

    /// `[x_i, x_j]` as a sparse list of `(k, f_ij^k)`.
    pub fn bracket(&self, i: usize, j: usize) -> Vec<(usize, Rational)> {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Equal => Vec::new(),
            Ordering::Less => self.brackets.get(&(i, j)).cloned().unwrap_or_default(),
            Ordering::Greater => self
                .brackets
                .get(&(j, i))
                .map(|v| v.iter().map(|(k, c)| (*k, -c.clone())).collect())
                .unwrap_or_default(),
        }
    }

    /// Iterates the stored `i < j` bracket entries.
    pub fn bracket_entries(
        &self,
    ) -> impl Iterator<Item = (&(usize, usize), &Vec<(usize, Rational)>)> {
        self.brackets.iter()
    }

    /// Matrix of `ad(sum_i a_i x_i)`: entry `[k][j]` is the `x_k`-coordinate
    /// of `[sum_i a_i x_i, x_j]`.
    pub fn adjoint_matrix(&self, coeffs: &[Rational]) -> Result<Vec<Vec<Rational>>> {
        if coeffs.len() != self.dim {
            return Err(Error::DimensionMismatch(coeffs.len(), self.dim));
        }
        let mut m = vec![vec![Rational::zero(); self.dim]; self.dim];
        for j in 0..self.dim {
            for (i, a) in coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (k, c) in self.bracket(i, j) {
                    m[k][j] += a.clone() * c;
                }
            }
        }
        Ok(m)
    }

    /// The trace polynomial `c_n(x) = tr(ad(x)^n)` as an element of degree
    /// `n` in the dual coordinates, computed by symbolic expansion of the
    /// adjoint matrix with indeterminate entries.
    pub fn trace_polynomial(&self, n: usize) -> Result<TracePolynomial> {
        assert!(n >= 1, "trace polynomial needs n >= 1");
        let d = self.dim;
        // M[k][j] = sum_i f_ij^k xi_i
        let mut m = vec![vec![Poly::zero(d); d]; d];
        for j in 0..d {
            for i in 0..d {
                for (k, c) in self.bracket(i, j) {
                    m[k][j] = m[k][j].add(&Poly::var(d, i).scale(
                        &Coefficient::from_rational(c),
                    )?)?;
                }
            }
        }
        let mut power = m.clone();
        for _ in 1..n {
            power = mat_mul(&power, &m)?;
        }
        let mut trace = Poly::zero(d);
        for (t, row) in power.iter().enumerate() {
            trace = trace.add(&row[t])?;
        }
        debug_assert!(trace.is_zero() || trace.homogeneity() == Some(n));
        Ok(TracePolynomial { n, poly: trace })
    }

    /// `{f, g} = sum f_ij^k x_k (d_i f)(d_j g)`, exact.
    pub fn poisson_bracket(&self, f: &Poly, g: &Poly) -> Result<Poly> {
        if f.dim() != self.dim || g.dim() != self.dim {
            return Err(Error::DimensionMismatch(f.dim(), self.dim));
        }
        let mut out = Poly::zero(self.dim);
        for (&(i, j), terms) in &self.brackets {
            let mut linear = Poly::zero(self.dim);
            for (k, c) in terms {
                linear = linear.add(&Poly::var(self.dim, *k).scale(
                    &Coefficient::from_rational(c.clone()),
                )?)?;
            }
            let fi = f.partial_derivative(i);
            let gj = g.partial_derivative(j);
            let fj = f.partial_derivative(j);
            let gi = g.partial_derivative(i);
            let antisym = fi.mul(&gj)?.sub(&fj.mul(&gi)?)?;
            out = out.add(&linear.mul(&antisym)?)?;
        }
        Ok(out)
    }

    /// Parses an expression in this algebra's basis names.
    pub fn parse_poly(&self, src: &str) -> Result<Poly> {
        crate::parse::poly(src, &self.basis)
    }

    pub fn render_poly(&self, p: &Poly) -> String {
        p.render(&self.basis)
    }
}

/// Homogeneous trace polynomial `c_n`, an element of `S^n(g*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePolynomial {
    n: usize,
    poly: Poly,
}

impl TracePolynomial {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

/// The Kirillov-Kostant bivector of an algebra; a view over the same
/// structure constants exposing only the bracket.
#[derive(Debug, Clone)]
pub struct PoissonBivector<'a> {
    algebra: &'a LieAlgebra,
}

impl<'a> PoissonBivector<'a> {
    pub fn new(algebra: &'a LieAlgebra) -> Self {
        PoissonBivector { algebra }
    }

    pub fn bracket(&self, f: &Poly, g: &Poly) -> Result<Poly> {
        self.algebra.poisson_bracket(f, g)
    }
}

fn mat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>]) -> Result<Vec<Vec<Poly>>> {
    let d = a.len();
    let dim = a[0][0].dim();
    let mut out = vec![vec![Poly::zero(dim); d]; d];
    for r in 0..d {
        for c in 0..d {
            let mut acc = Poly::zero(dim);
            for t in 0..d {
                if a[r][t].is_zero() || b[t][c].is_zero() {
                    continue;
                }
                acc = acc.add(&a[r][t].mul(&b[t][c])?)?;
            }
            out[r][c] = acc;
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
struct AlgebraFile {
    dim: usize,
    basis: Vec<String>,
    #[serde(default)]
    brackets: Vec<BracketEntry>,
}

#[derive(Deserialize)]
struct BracketEntry {
    i: usize,
    j: usize,
    terms: Vec<TermEntry>,
}

#[derive(Deserialize)]
struct TermEntry {
    k: usize,
    c: String,
}

/// Loads an algebra from its JSON description:
/// `{"dim": d, "basis": [..], "brackets": [{"i":1,"j":2,"terms":[{"k":3,"c":"1"}]}]}`
/// with 1-based indices, `i < j` entries only, and rationals as strings.
pub fn load_lie_algebra(json: &str) -> Result<LieAlgebra> {
    let file: AlgebraFile = serde_json::from_str(json)
        .map_err(|e| Error::InvalidAlgebra(format!("JSON: {e}")))?;
    let mut entries = Vec::new();
    for b in file.brackets {
        if b.i == 0 || b.j == 0 || b.i >= b.j {
            return Err(Error::InvalidAlgebra(format!(
                "bracket entry must have 1 <= i < j, got i={}, j={}",
                b.i, b.j
            )));
        }
        let mut terms = Vec::new();
        for t in b.terms {
            if t.k == 0 {
                return Err(Error::InvalidAlgebra("k index is 1-based".into()));
            }
            terms.push((t.k - 1, parse_rational(&t.c)?));
        }
        entries.push(((b.i - 1, b.j - 1), terms));
    }
    LieAlgebra::from_brackets(file.dim, file.basis, entries)
}

/// Built-in algebra names accepted by [`builtin`]; `abelian<d>` works for any
/// small d, and `h3` is an alias for `heisenberg3`.
pub const BUILTIN_NAMES: &[&str] = &[
    "abelian2",
    "abelian3",
    "heisenberg3",
    "aff1",
    "sl2",
    "gl2",
    "t2",
];

/// Returns a built-in algebra by name.
pub fn builtin(name: &str) -> Result<LieAlgebra> {
    let one = Rational::one;
    let r = |n: i64| crate::ring::rat(n, 1);
    match name {
        "heisenberg3" | "h3" => LieAlgebra::from_brackets(
            3,
            vec!["x".into(), "y".into(), "z".into()],
            vec![((0, 1), vec![(2, one())])],
        ),
        "aff1" => LieAlgebra::from_brackets(
            2,
            vec!["x".into(), "y".into()],
            vec![((0, 1), vec![(1, one())])],
        ),
        // basis e < f < h with [h,e] = 2e, [h,f] = -2f, [e,f] = h
        "sl2" => LieAlgebra::from_brackets(
            3,
            vec!["e".into(), "f".into(), "h".into()],
            vec![
                ((0, 1), vec![(2, one())]),
                ((0, 2), vec![(0, r(-2))]),
                ((1, 2), vec![(1, r(2))]),
            ],
        ),
        // elementary matrices e11, e12, e21, e22
        "gl2" => LieAlgebra::from_brackets(
            4,
            vec!["e11".into(), "e12".into(), "e21".into(), "e22".into()],
            vec![
                ((0, 1), vec![(1, one())]),
                ((0, 2), vec![(2, r(-1))]),
                ((1, 2), vec![(0, one()), (3, r(-1))]),
                ((1, 3), vec![(1, one())]),
                ((2, 3), vec![(2, r(-1))]),
            ],
        ),
        // upper-triangular 2x2: a = E11, d = E22, n = E12
        "t2" => LieAlgebra::from_brackets(
            3,
            vec!["a".into(), "d".into(), "n".into()],
            vec![((0, 2), vec![(2, one())]), ((1, 2), vec![(2, r(-1))])],
        ),
        _ => {
            if let Some(d) = name.strip_prefix("abelian").and_then(|s| s.parse::<usize>().ok()) {
                if (1..=9).contains(&d) {
                    let basis = (1..=d).map(|i| format!("x{i}")).collect();
                    return LieAlgebra::from_brackets(d, basis, Vec::new());
                }
            }
            Err(Error::UnknownAlgebra(name.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    #[test]
    fn builtins_validate() {
        for name in BUILTIN_NAMES {
            builtin(name).unwrap();
        }
        assert!(builtin("abelian5").is_ok());
        assert!(matches!(
            builtin("so3000").unwrap_err(),
            Error::UnknownAlgebra(_)
        ));
    }

    #[test]
    fn antisymmetry_violation_detected() {
        // sl2-like table with f_12^3 flipped on one side only
        let mut table = Vec::new();
        table.push(((0usize, 1usize, 2usize), rat(1, 1)));
        table.push(((1, 0, 2), rat(1, 1))); // should be -1
        let err = LieAlgebra::from_full_table(
            3,
            vec!["e".into(), "f".into(), "h".into()],
            &table,
        )
        .unwrap_err();
        assert!(matches!(err, Error::AntisymmetryViolation { i: 1, j: 2, k: 3, .. }));
    }

    #[test]
    fn jacobi_violation_detected() {
        // [h,e] = 2e, [h,f] = -2f, but [e,f] = e breaks Jacobi
        let err = LieAlgebra::from_brackets(
            3,
            vec!["e".into(), "f".into(), "h".into()],
            vec![
                ((0, 1), vec![(0, rat(1, 1))]),
                ((0, 2), vec![(0, rat(-2, 1))]),
                ((1, 2), vec![(1, rat(2, 1))]),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::JacobiViolation { .. }));
    }

    #[test]
    fn adjoint_matrix_examples() {
        let aff1 = builtin("aff1").unwrap();
        let m = aff1.adjoint_matrix(&[rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(
            m,
            vec![vec![rat(0, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]]
        );

        let ab = builtin("abelian2").unwrap();
        let m = ab.adjoint_matrix(&[rat(5, 2), rat(-3, 1)]).unwrap();
        assert!(m.iter().flatten().all(|v| v.is_zero()));

        // h3: ad(x) sends y to z and kills everything else
        let h3 = builtin("heisenberg3").unwrap();
        let m = h3
            .adjoint_matrix(&[rat(1, 1), rat(0, 1), rat(0, 1)])
            .unwrap();
        let nonzero: Vec<_> = (0..3)
            .flat_map(|k| (0..3).map(move |j| (k, j)))
            .filter(|&(k, j)| !m[k][j].is_zero())
            .collect();
        assert_eq!(nonzero, vec![(2, 1)]);
        assert_eq!(m[2][1], rat(1, 1));
    }

    #[test]
    fn trace_polynomials_aff1() {
        let aff1 = builtin("aff1").unwrap();
        for n in 1..=5 {
            let c = aff1.trace_polynomial(n).unwrap();
            // c_n(a x + b y) = a^n
            let expected = Poly::monomial(2, &[n as u32, 0], Coefficient::one());
            assert_eq!(c.poly(), &expected, "c_{n} on aff1");
        }
    }

    #[test]
    fn trace_polynomials_nilpotent_vanish() {
        let h3 = builtin("heisenberg3").unwrap();
        for n in 1..=6 {
            assert!(h3.trace_polynomial(n).unwrap().is_zero());
        }
    }

    #[test]
    fn trace_polynomials_sl2() {
        let sl2 = builtin("sl2").unwrap();
        assert!(sl2.trace_polynomial(1).unwrap().is_zero());
        let c2 = sl2.trace_polynomial(2).unwrap();
        // 8 h*^2 + 8 e* f*
        let mut expected = Poly::zero(3);
        expected.add_term(
            crate::sym::Monomial::from_exponents(vec![0, 0, 2]),
            Coefficient::from_int(8),
        );
        expected.add_term(
            crate::sym::Monomial::from_exponents(vec![1, 1, 0]),
            Coefficient::from_int(8),
        );
        assert_eq!(c2.poly(), &expected);
        // odd traces vanish on sl2
        assert!(sl2.trace_polynomial(3).unwrap().is_zero());
        assert!(sl2.trace_polynomial(5).unwrap().is_zero());
    }

    #[test]
    fn unimodularity_of_builtins() {
        for name in ["sl2", "heisenberg3", "abelian3", "gl2"] {
            assert!(
                builtin(name).unwrap().trace_polynomial(1).unwrap().is_zero(),
                "{name} should be unimodular"
            );
        }
        assert!(!builtin("aff1").unwrap().trace_polynomial(1).unwrap().is_zero());
        assert!(!builtin("t2").unwrap().trace_polynomial(1).unwrap().is_zero());
    }

    #[test]
    fn poisson_bracket_examples() {
        let h3 = builtin("heisenberg3").unwrap();
        let x = Poly::var(3, 0);
        let y = Poly::var(3, 1);
        let z = Poly::var(3, 2);
        assert_eq!(h3.poisson_bracket(&x, &y).unwrap(), z);
        assert_eq!(h3.poisson_bracket(&y, &x).unwrap(), z.neg());

        // aff1: {x, y^2} = 2 y^2
        let aff1 = builtin("aff1").unwrap();
        let xa = Poly::var(2, 0);
        let y2 = Poly::monomial(2, &[0, 2], Coefficient::one());
        assert_eq!(
            aff1.poisson_bracket(&xa, &y2).unwrap(),
            y2.scale_rat(&rat(2, 1))
        );
    }

    #[test]
    fn trace_homogeneity_under_scaling() {
        // c_n(t x) = t^n c_n(x): substitute scaled variables symbolically by
        // scaling each coordinate of the dual polynomial.
        let t2 = builtin("t2").unwrap();
        for n in 1..=4 {
            let c = t2.trace_polynomial(n).unwrap();
            for (mono, _) in c.poly().terms() {
                assert_eq!(mono.degree(), n);
            }
        }
    }

    #[test]
    fn load_from_json() {
        let src = r#"{
            "dim": 3,
            "basis": ["x", "y", "z"],
            "brackets": [{"i": 1, "j": 2, "terms": [{"k": 3, "c": "1"}]}]
        }"#;
        let alg = load_lie_algebra(src).unwrap();
        assert_eq!(alg, builtin("heisenberg3").unwrap());

        let bad = r#"{
            "dim": 3,
            "basis": ["x", "y", "z"],
            "brackets": [{"i": 2, "j": 1, "terms": [{"k": 3, "c": "1"}]}]
        }"#;
        assert!(load_lie_algebra(bad).is_err());
    }
}
