//! Universal enveloping algebra with PBW normal form, the symmetrization
//! map and its inverse, and the Gutt product obtained by transfer.
//!
//! Elements are stored on the PBW basis `X_1^{a_1} ... X_d^{a_d}` in the
//! basis order of the parent algebra. Normal ordering rewrites
//! `X_j X_i -> X_i X_j + sum_k f_ji^k X_k` for `j > i`; the rewriting is
//! memoized per `(ordered monomial, appended generator)` pair, which is what
//! makes repeated products cheap. Symmetrization does not depend on the
//! basis order; normal forms of course do.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num::{One, Zero};

use crate::error::Result;
use crate::lie::LieAlgebra;
use crate::ring::{parse_rational, Coefficient, Rational};
use crate::sym::{Monomial, Poly};

type RatTerms = BTreeMap<Monomial, Rational>;
type Terms = BTreeMap<Monomial, Coefficient>;

/// The enveloping algebra of a Lie algebra, owning the rewriting caches.
/// Cache reads and inserts are guarded by locks, so one instance may be
/// shared freely across threads.
pub struct UeaAlgebra {
    lie: Arc<LieAlgebra>,
    capitalized: Vec<String>,
    gen_cache: RwLock<HashMap<(Monomial, usize), Arc<RatTerms>>>,
    sym_cache: RwLock<HashMap<Monomial, Arc<RatTerms>>>,
}

impl UeaAlgebra {
    pub fn new(lie: Arc<LieAlgebra>) -> Arc<Self> {
        let capitalized = lie
            .basis_names()
            .iter()
            .map(|n| {
                let mut c = n.chars();
                match c.next() {
                    Some(first) => first.to_ascii_uppercase().to_string() + c.as_str(),
                    None => String::new(),
                }
            })
            .collect();
        Arc::new(UeaAlgebra {
            lie,
            capitalized,
            gen_cache: RwLock::new(HashMap::new()),
            sym_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn lie(&self) -> &Arc<LieAlgebra> {
        &self.lie
    }

    pub fn dim(&self) -> usize {
        self.lie.dim()
    }

    /// Number of memoized rewriting entries (size-reporting hook).
    pub fn cache_len(&self) -> usize {
        self.gen_cache.read().unwrap().len() + self.sym_cache.read().unwrap().len()
    }

    pub fn zero(self: &Arc<Self>) -> UeaElement {
        UeaElement {
            algebra: Arc::clone(self),
            terms: Terms::new(),
        }
    }

    pub fn one(self: &Arc<Self>) -> UeaElement {
        let mut terms = Terms::new();
        terms.insert(Monomial::unit(self.dim()), Coefficient::one());
        UeaElement {
            algebra: Arc::clone(self),
            terms,
        }
    }

    /// The basis element `X_i`.
    pub fn generator(self: &Arc<Self>, i: usize) -> UeaElement {
        let mut terms = Terms::new();
        terms.insert(Monomial::var(self.dim(), i), Coefficient::one());
        UeaElement {
            algebra: Arc::clone(self),
            terms,
        }
    }

    pub fn from_terms(self: &Arc<Self>, terms: Terms) -> UeaElement {
        let mut e = self.zero();
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    /// Parses an expression in the capitalized basis names, e.g. `X*Y - 1/2*Z`.
    pub fn parse(self: &Arc<Self>, src: &str) -> Result<UeaElement> {
        let p = crate::parse::poly(src, &self.capitalized)?;
        let mut terms = Terms::new();
        for (m, c) in p.terms() {
            terms.insert(m.clone(), c.clone());
        }
        Ok(self.from_terms(terms))
    }

    /// Normal form of `X^a * X_j`, memoized on `(a, j)`.
    fn mul_generator(&self, mono: &Monomial, j: usize) -> Arc<RatTerms> {
        if let Some(hit) = self.gen_cache.read().unwrap().get(&(mono.clone(), j)) {
            return Arc::clone(hit);
        }
        let exps = mono.exponents();
        let top = exps.iter().rposition(|&e| e > 0);
        let result: RatTerms = match top {
            // already ordered: just append
            None => std::iter::once((mono.raised(j), Rational::one())).collect(),
            Some(m) if m <= j => std::iter::once((mono.raised(j), Rational::one())).collect(),
            Some(m) => {
                // X^a X_j = (X^{a'} X_j) X_m + X^{a'} [X_m, X_j],  a = a' + e_m
                let mut lower = exps.to_vec();
                lower[m] -= 1;
                let prefix = Monomial::from_exponents(lower);
                let mut acc = RatTerms::new();
                for (b, c) in self.mul_generator(&prefix, j).iter() {
                    for (b2, c2) in self.mul_generator(b, m).iter() {
                        add_rat(&mut acc, b2.clone(), c * c2);
                    }
                }
                for (k, f) in self.lie.bracket(m, j) {
                    for (b2, c2) in self.mul_generator(&prefix, k).iter() {
                        add_rat(&mut acc, b2.clone(), c2 * &f);
                    }
                }
                acc
            }
        };
        let result = Arc::new(result);
        self.gen_cache
            .write()
            .unwrap()
            .insert((mono.clone(), j), Arc::clone(&result));
        result
    }

    /// Normal form of the product of two PBW monomials.
    fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> RatTerms {
        let mut cur: RatTerms =
            std::iter::once((a.clone(), Rational::one())).collect();
        for (j, &e) in b.exponents().iter().enumerate() {
            for _ in 0..e {
                let mut next = RatTerms::new();
                for (m, c) in &cur {
                    for (m2, c2) in self.mul_generator(m, j).iter() {
                        add_rat(&mut next, m2.clone(), c * c2);
                    }
                }
                cur = next;
            }
        }
        cur
    }

    /// Symmetrization of one commutative monomial, memoized:
    /// `x^a` of degree `n` maps to `(1/n!) sum_{orderings} X_(word)`.
    fn symmetrize_monomial(&self, mono: &Monomial) -> Arc<RatTerms> {
        if let Some(hit) = self.sym_cache.read().unwrap().get(mono) {
            return Arc::clone(hit);
        }
        let mut word: Vec<usize> = Vec::new();
        for (i, &e) in mono.exponents().iter().enumerate() {
            word.extend(std::iter::repeat(i).take(e as usize));
        }
        let n = word.len();
        // each distinct word stands for prod_i a_i! equal permutations
        let mut repeats = Rational::one();
        for &e in mono.exponents() {
            for k in 2..=e as i64 {
                repeats *= Rational::from_integer(k.into());
            }
        }
        let mut factorial = Rational::one();
        for k in 2..=n as i64 {
            factorial *= Rational::from_integer(k.into());
        }
        let scale = repeats / factorial;

        let mut acc = RatTerms::new();
        loop {
            let mut cur: RatTerms =
                std::iter::once((Monomial::unit(self.dim()), Rational::one())).collect();
            for &j in &word {
                let mut next = RatTerms::new();
                for (m, c) in &cur {
                    for (m2, c2) in self.mul_generator(m, j).iter() {
                        add_rat(&mut next, m2.clone(), c * c2);
                    }
                }
                cur = next;
            }
            for (m, c) in cur {
                add_rat(&mut acc, m, c * &scale);
            }
            if !next_permutation(&mut word) {
                break;
            }
        }
        let acc = Arc::new(acc);
        self.sym_cache
            .write()
            .unwrap()
            .insert(mono.clone(), Arc::clone(&acc));
        acc
    }

    /// The symmetrization isomorphism from polynomials to the PBW basis.
    pub fn pbw_symmetrize(self: &Arc<Self>, f: &Poly) -> Result<UeaElement> {
        assert_eq!(f.dim(), self.dim());
        let mut out = self.zero();
        for (mono, c) in f.terms() {
            for (m, r) in self.symmetrize_monomial(mono).iter() {
                out.add_term(m.clone(), c.scale(r));
            }
        }
        Ok(out)
    }

    /// Two-sided inverse of [`Self::pbw_symmetrize`], by triangular descent
    /// on the degree filtration.
    pub fn pbw_inverse(self: &Arc<Self>, u: &UeaElement) -> Result<Poly> {
        let mut rem = u.clone();
        let mut out = Poly::zero(self.dim());
        while !rem.is_zero() {
            let top_degree = rem
                .terms
                .keys()
                .map(Monomial::degree)
                .max()
                .expect("nonempty");
            let mut top = Poly::zero(self.dim());
            for (m, c) in &rem.terms {
                if m.degree() == top_degree {
                    top.add_term(m.clone(), c.clone());
                }
            }
            out = out.add(&top)?;
            rem = rem.sub(&self.pbw_symmetrize(&top)?);
        }
        Ok(out)
    }

    /// The product transferred through PBW alone.
    pub fn gutt_product(self: &Arc<Self>, f: &Poly, g: &Poly) -> Result<Poly> {
        let u = self.pbw_symmetrize(f)?;
        let v = self.pbw_symmetrize(g)?;
        self.pbw_inverse(&u.mul(&v)?)
    }

    /// Dumps the generator-rewriting cache as plain data (for persistence).
    pub fn export_cache(&self) -> Vec<((Vec<u32>, usize), Vec<(Vec<u32>, String)>)> {
        let cache = self.gen_cache.read().unwrap();
        let mut items: Vec<_> = cache
            .iter()
            .map(|((m, j), terms)| {
                (
                    (m.exponents().to_vec(), *j),
                    terms
                        .iter()
                        .map(|(m2, r)| {
                            (m2.exponents().to_vec(), crate::ring::format_rational(r))
                        })
                        .collect(),
                )
            })
            .collect();
        items.sort();
        items
    }

    /// Reloads entries produced by [`Self::export_cache`]. Malformed entries
    /// are skipped rather than trusted.
    pub fn import_cache(&self, items: &[((Vec<u32>, usize), Vec<(Vec<u32>, String)>)]) {
        let dim = self.dim();
        let mut cache = self.gen_cache.write().unwrap();
        for ((exps, j), terms) in items {
            if exps.len() != dim || *j >= dim {
                continue;
            }
            let mut map = RatTerms::new();
            let mut ok = true;
            for (e2, r) in terms {
                if e2.len() != dim {
                    ok = false;
                    break;
                }
                match parse_rational(r) {
                    Ok(v) => {
                        map.insert(Monomial::from_exponents(e2.clone()), v);
                    }
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                cache.insert(
                    (Monomial::from_exponents(exps.clone()), *j),
                    Arc::new(map),
                );
            }
        }
    }
}

fn add_rat(map: &mut RatTerms, mono: Monomial, r: Rational) {
    if r.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(mono) {
        Entry::Vacant(e) => {
            e.insert(r);
        }
        Entry::Occupied(mut e) => {
            let sum = e.get() + &r;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

/// Advances to the next lexicographic permutation; false when exhausted.
fn next_permutation(word: &mut [usize]) -> bool {
    if word.len() < 2 {
        return false;
    }
    let mut i = word.len() - 1;
    while i > 0 && word[i - 1] >= word[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = word.len() - 1;
    while word[j] <= word[i - 1] {
        j -= 1;
    }
    word.swap(i - 1, j);
    word[i..].reverse();
    true
}

/// An element of the enveloping algebra on the PBW basis.
#[derive(Clone)]
pub struct UeaElement {
    algebra: Arc<UeaAlgebra>,
    terms: Terms,
}

impl UeaElement {
    pub fn algebra(&self) -> &Arc<UeaAlgebra> {
        &self.algebra
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    /// Highest total PBW degree (the filtration degree); 0 for zero.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, mono: Monomial, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &UeaElement) -> UeaElement {
        debug_assert!(self.same_algebra(other));
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &UeaElement) -> UeaElement {
        debug_assert!(self.same_algebra(other));
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Coefficient) -> Result<UeaElement> {
        let mut out = UeaElement {
            algebra: Arc::clone(&self.algebra),
            terms: Terms::new(),
        };
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.try_mul(c)?);
        }
        Ok(out)
    }

    fn same_algebra(&self, other: &UeaElement) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra)
            || self.algebra.lie == other.algebra.lie
    }

    /// The associative product, rewritten into the PBW basis.
    pub fn mul(&self, other: &UeaElement) -> Result<UeaElement> {
        if !self.same_algebra(other) {
            return Err(crate::error::Error::AlgebraMismatch);
        }
        let mut out = self.algebra.zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let c = ca.try_mul(cb)?;
                for (m, r) in self.algebra.mul_monomials(a, b).iter() {
                    out.add_term(m.clone(), c.scale(r));
                }
            }
        }
        Ok(out)
    }
}

impl PartialEq for UeaElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_algebra(other) && self.terms == other.terms
    }
}

impl Eq for UeaElement {}

impl fmt::Debug for UeaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UeaElement({self})")
    }
}

impl fmt::Display for UeaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Poly::zero(self.algebra.dim());
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c.clone());
        }
        write!(f, "{}", p.render(&self.algebra.capitalized))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::builtin;
    use crate::ring::rat;

    fn h3() -> Arc<UeaAlgebra> {
        UeaAlgebra::new(Arc::new(builtin("heisenberg3").unwrap()))
    }

    fn sl2() -> Arc<UeaAlgebra> {
        UeaAlgebra::new(Arc::new(builtin("sl2").unwrap()))
    }

    #[test]
    fn one_rewriting_step() {
        let ua = h3();
        let x = ua.generator(0);
        let y = ua.generator(1);
        // Y X = XY - Z
        let yx = y.mul(&x).unwrap();
        assert_eq!(yx, ua.parse("X*Y - Z").unwrap());
        // ordered products stay put
        let xx = x.mul(&x).unwrap();
        assert_eq!(xx, ua.parse("X^2").unwrap());
    }

    #[test]
    fn sl2_single_steps() {
        let ua = sl2();
        let e = ua.generator(0);
        let f = ua.generator(1);
        assert_eq!(e.mul(&f).unwrap(), ua.parse("E*F").unwrap());
        assert_eq!(f.mul(&e).unwrap(), ua.parse("E*F - H").unwrap());
    }

    #[test]
    fn product_associative_small() {
        let ua = sl2();
        let e = ua.generator(0);
        let f = ua.generator(1);
        let h = ua.generator(2);
        let lhs = e.mul(&f).unwrap().mul(&h).unwrap();
        let rhs = e.mul(&f.mul(&h).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn symmetrize_examples() {
        let ua = h3();
        // powers of one variable
        let x4 = Poly::monomial(3, &[4, 0, 0], Coefficient::one());
        assert_eq!(ua.pbw_symmetrize(&x4).unwrap(), ua.parse("X^4").unwrap());
        // xy -> XY - Z/2
        let xy = Poly::monomial(3, &[1, 1, 0], Coefficient::one());
        assert_eq!(
            ua.pbw_symmetrize(&xy).unwrap(),
            ua.parse("X*Y - 1/2*Z").unwrap()
        );
        // unit
        assert_eq!(ua.pbw_symmetrize(&Poly::one(3)).unwrap(), ua.one());
    }

    #[test]
    fn pbw_inverse_examples() {
        let ua = h3();
        let xy = ua.parse("X*Y").unwrap();
        let p = ua.pbw_inverse(&xy).unwrap();
        let names = ["x", "y", "z"];
        assert_eq!(p.render(&names), "x*y + 1/2*z");

        let x3 = ua.parse("X^3").unwrap();
        assert_eq!(
            ua.pbw_inverse(&x3).unwrap(),
            Poly::monomial(3, &[3, 0, 0], Coefficient::one())
        );
    }

    #[test]
    fn pbw_round_trip_fixed() {
        let ua = sl2();
        let f = ua
            .lie()
            .parse_poly("e^2*f - 3*h^3 + 1/2*e*f*h + 7*e - 2")
            .unwrap();
        let round = ua.pbw_inverse(&ua.pbw_symmetrize(&f).unwrap()).unwrap();
        assert_eq!(round, f);
    }

    #[test]
    fn gutt_product_examples() {
        let ua = h3();
        let x = Poly::var(3, 0);
        let y = Poly::var(3, 1);
        let g = ua.gutt_product(&x, &y).unwrap();
        assert_eq!(g.render(&["x", "y", "z"]), "x*y + 1/2*z");

        // abelian: plain product
        let ab = UeaAlgebra::new(Arc::new(builtin("abelian3").unwrap()));
        let f = ab.lie().parse_poly("x1^2 + x2*x3").unwrap();
        let h = ab.lie().parse_poly("x3 - 2*x1").unwrap();
        assert_eq!(ab.gutt_product(&f, &h).unwrap(), f.mul(&h).unwrap());
    }

    #[test]
    fn gutt_degree_one_commutator_is_poisson() {
        for name in ["heisenberg3", "aff1", "sl2", "gl2", "t2"] {
            let lie = Arc::new(builtin(name).unwrap());
            let ua = UeaAlgebra::new(Arc::clone(&lie));
            let d = lie.dim();
            for i in 0..d {
                for j in 0..d {
                    let xi = Poly::var(d, i);
                    let xj = Poly::var(d, j);
                    let comm = ua
                        .gutt_product(&xi, &xj)
                        .unwrap()
                        .sub(&ua.gutt_product(&xj, &xi).unwrap())
                        .unwrap();
                    let pb = lie.poisson_bracket(&xi, &xj).unwrap();
                    assert_eq!(comm, pb, "{name} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn filtration_preserved() {
        let ua = sl2();
        let f = ua.lie().parse_poly("e*f*h + h^2").unwrap();
        let u = ua.pbw_symmetrize(&f).unwrap();
        assert_eq!(u.degree(), 3);
        // top symbol is the identity: degree-3 part of u matches f's cubic part
        let mut top = Poly::zero(3);
        for (m, c) in u.terms() {
            if m.degree() == 3 {
                top.add_term(m.clone(), c.clone());
            }
        }
        assert_eq!(top, f.homogeneous_component(3));
    }

    #[test]
    fn cache_round_trip() {
        let ua = h3();
        let y = ua.generator(1);
        let x = ua.generator(0);
        let _ = y.mul(&x).unwrap();
        assert!(ua.cache_len() > 0);
        let dump = ua.export_cache();

        let ua2 = h3();
        ua2.import_cache(&dump);
        let y2 = ua2.generator(1);
        let x2 = ua2.generator(0);
        assert_eq!(y2.mul(&x2).unwrap().to_string(), "X*Y - Z");
    }

    #[test]
    fn scale_by_rational() {
        let ua = h3();
        let u = ua.parse("X*Y - Z").unwrap();
        let v = u.scale(&Coefficient::from_rational(rat(-2, 1))).unwrap();
        assert_eq!(v, ua.parse("-2*X*Y + 2*Z").unwrap());
    }
}
