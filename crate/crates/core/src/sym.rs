//! Sparse multivariate polynomials over [`Coefficient`] and degree-truncated
//! constant-coefficient differential operators acting on them.
//!
//! An operator stores plain monomials in the partials: `Sum c_a D^a` with no
//! implicit `1/a!` normalization, and `D^a x^b = b!/(b-a)! x^(b-a)`. The dual
//! convention (divided powers) differs by factorials; one worked example:
//! with ours, `exp(t*Dx)` truncated at 2 is `1 + t*Dx + (t^2/2)*Dx^2` and
//! sends `x^2` to `x^2 + 2tx + t^2`, i.e. acts as the Taylor shift `x -> x+t`.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ring::{format_rational, Coefficient, Rational};

/// Exponent vector of a monomial. Ordered by total degree, then
/// lexicographically, which fixes the deterministic output order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn unit(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise difference, if `other` divides `self`.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    /// Bumps the exponent of one variable.
    pub fn raised(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        e[i] += 1;
        Monomial(e)
    }

    /// `prod_i b_i (b_i - 1) ... (b_i - a_i + 1)` for `D^a x^b`, zero if any
    /// exponent of `a` exceeds the matching one of `b`.
    fn falling_factorial(&self, derivative: &Self) -> BigInt {
        let mut acc = BigInt::one();
        for (&b, &a) in self.0.iter().zip(&derivative.0) {
            if a > b {
                return BigInt::zero();
            }
            for j in 0..a {
                acc *= BigInt::from(b - j);
            }
        }
        acc
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `dim` variables over [`Coefficient`]. No zero terms
/// are stored, so structural equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Monomial, Coefficient>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Poly::constant(dim, Coefficient::one())
    }

    pub fn constant(dim: usize, c: Coefficient) -> Self {
        let mut p = Poly::zero(dim);
        p.add_term(Monomial::unit(dim), c);
        p
    }

    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index out of range");
        let mut p = Poly::zero(dim);
        p.add_term(Monomial::var(dim, i), Coefficient::one());
        p
    }

    pub fn monomial(dim: usize, exps: &[u32], c: Coefficient) -> Self {
        assert_eq!(exps.len(), dim);
        let mut p = Poly::zero(dim);
        p.add_term(Monomial::from_exponents(exps.to_vec()), c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Coefficient {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Some(d) when every stored term has total degree d (zero counts as
    /// homogeneous of degree 0).
    pub fn homogeneity(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let first = match it.next() {
            None => return Some(0),
            Some(d) => d,
        };
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn homogeneous_component(&self, degree: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == degree)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Poly {
            dim: self.dim,
            terms,
        }
    }

    pub fn add_term(&mut self, mono: Monomial, c: Coefficient) {
        debug_assert_eq!(mono.dim(), self.dim);
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

    fn check_dim(&self, other: &Poly) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(self.dim, other.dim))
        }
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.neg()))
            .collect();
        Poly {
            dim: self.dim,
            terms,
        }
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        let mut out = Poly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.try_mul(cb)?);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> Result<Poly> {
        let mut out = Poly::zero(self.dim);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.try_mul(c)?);
        }
        Ok(out)
    }

    pub fn scale_rat(&self, r: &Rational) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.scale(r));
        }
        out
    }

    pub fn partial_derivative(&self, i: usize) -> Poly {
        assert!(i < self.dim);
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.exponents()[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[i] -= 1;
            out.add_term(
                Monomial::from_exponents(exps),
                c.scale(&Rational::from(BigInt::from(e))),
            );
        }
        out
    }

    /// Renders with the given variable names, highest degree first.
    pub fn render<S: AsRef<str>>(&self, names: &[S]) -> String {
        assert_eq!(names.len(), self.dim);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (mono, coeff) in self.terms.iter().rev() {
            let piece = render_term(mono, coeff, names);
            if out.is_empty() {
                out = piece;
            } else if let Some(stripped) = piece.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(&piece);
            }
        }
        out
    }
}

fn render_mono<S: AsRef<str>>(mono: &Monomial, names: &[S]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in mono.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].as_ref().to_string()),
            _ => parts.push(format!("{}^{}", names[i].as_ref(), e)),
        }
    }
    parts.join("*")
}

fn render_term<S: AsRef<str>>(mono: &Monomial, coeff: &Coefficient, names: &[S]) -> String {
    let m = render_mono(mono, names);
    if m.is_empty() {
        return coeff.to_string();
    }
    if let Some(r) = coeff.as_rational() {
        if r.is_one() {
            return m;
        }
        if r == -Rational::one() {
            return format!("-{m}");
        }
        if r.is_negative() {
            return format!("-{}*{m}", format_rational(&-r));
        }
        return format!("{}*{m}", format_rational(&r));
    }
    // single lambda-monomial with unit-free structure prints flat, anything
    // else is parenthesized so the output stays parseable
    let mut terms = coeff.terms();
    let first = terms.next();
    let single = first.is_some() && terms.next().is_none();
    if single {
        let (lmono, r) = first.unwrap();
        if r.is_one() {
            return format!("{lmono}*{m}");
        }
        if r.is_negative() {
            return format!("({})*{lmono}*{m}", format_rational(r));
        }
        return format!("{}*{lmono}*{m}", format_rational(r));
    }
    format!("({coeff})*{m}")
}

/// A constant-coefficient differential operator truncated at a fixed order:
/// `Sum_{|a| <= order} c_a D^a`. Application to polynomials of degree at most
/// `order` is exact; terms of higher order are never created, so composition
/// in the truncated algebra loses nothing that could act on such inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstOp {
    dim: usize,
    order: usize,
    terms: BTreeMap<Monomial, Coefficient>,
}

impl ConstOp {
    pub fn zero(dim: usize, order: usize) -> Self {
        ConstOp {
            dim,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize, order: usize) -> Self {
        let mut op = ConstOp::zero(dim, order);
        op.terms.insert(Monomial::unit(dim), Coefficient::one());
        op
    }

    /// Reads a polynomial in the dual coordinates as an operator: the
    /// monomial `y^a` becomes `D^a`.
    pub fn from_symbol(symbol: &Poly, order: usize) -> Result<Self> {
        let degree = symbol.degree();
        if degree > order && !symbol.is_zero() {
            return Err(Error::DegreeExceedsTruncation { degree, order });
        }
        let mut op = ConstOp::zero(symbol.dim(), order);
        for (m, c) in symbol.terms() {
            op.add_term(m.clone(), c.clone());
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Coefficient {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Coefficient {
        self.coefficient(&Monomial::unit(self.dim))
    }

    pub fn is_identity(&self) -> bool {
        self.terms.len() == 1 && self.constant_term() == Coefficient::one()
    }

    fn add_term(&mut self, mono: Monomial, c: Coefficient) {
        debug_assert!(mono.degree() <= self.order);
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

    pub fn add(&self, other: &ConstOp) -> Result<ConstOp> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let order = self.order.min(other.order);
        let mut out = ConstOp::zero(self.dim, order);
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            if m.degree() <= order {
                out.add_term(m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> Result<ConstOp> {
        let mut out = ConstOp::zero(self.dim, self.order);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.try_mul(c)?);
        }
        Ok(out)
    }

    pub fn scale_rat(&self, r: &Rational) -> ConstOp {
        let mut out = ConstOp::zero(self.dim, self.order);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.scale(r));
        }
        out
    }

    /// `Sum_a c_a D^a f`, exact. Errors when `deg f` exceeds the truncation
    /// order, since then discarded operator terms could have acted.
    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        if self.dim != f.dim() {
            return Err(Error::DimensionMismatch(self.dim, f.dim()));
        }
        let degree = f.degree();
        if degree > self.order {
            return Err(Error::DegreeExceedsTruncation {
                degree,
                order: self.order,
            });
        }
        let mut out = Poly::zero(self.dim);
        for (alpha, c) in &self.terms {
            for (beta, fc) in f.terms() {
                let Some(rest) = beta.checked_div(alpha) else {
                    continue;
                };
                let scale = beta.falling_factorial(alpha);
                if scale.is_zero() {
                    continue;
                }
                let coeff = c.try_mul(fc)?.scale(&Rational::from(scale));
                out.add_term(rest, coeff);
            }
        }
        Ok(out)
    }

    /// Product in the truncated algebra: orders beyond `min(N1, N2)` are cut,
    /// which is exact on inputs within the truncation. Constant-coefficient
    /// operators commute: `compose(a, b) = compose(b, a)`.
    pub fn compose(&self, other: &ConstOp) -> Result<ConstOp> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let order = self.order.min(other.order);
        let mut out = ConstOp::zero(self.dim, order);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > order {
                continue;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() > order {
                    continue;
                }
                out.add_term(ma.mul(mb), ca.try_mul(cb)?);
            }
        }
        Ok(out)
    }

    /// `Sum_k D^k / k!` truncated at `order`. Requires a vanishing constant
    /// term, so the sum is finite.
    pub fn exp(&self, order: usize) -> Result<ConstOp> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut result = ConstOp::identity(self.dim, order);
        let mut power = ConstOp::identity(self.dim, order);
        let mut factorial = Rational::one();
        for k in 1..=order {
            power = power.compose(&truncated(self, order))?;
            if power.terms.is_empty() {
                break;
            }
            factorial *= Rational::from(BigInt::from(k));
            result = result.add(&power.scale_rat(&factorial.recip()))?;
        }
        Ok(result)
    }

    /// Inverse in the truncated algebra via the geometric series. The
    /// constant term must be a nonzero rational; every operator built from
    /// the exponentials in this crate has constant term 1.
    pub fn invert(&self) -> Result<ConstOp> {
        let c = self.constant_term();
        let c = match c.as_rational() {
            Some(r) if !r.is_zero() => r,
            _ => return Err(Error::NonInvertibleConstantTerm(c.to_string())),
        };
        let order = self.order;
        // write self = c (1 - e) with ord(e) >= 1; inverse = (1/c) sum e^k
        let mut e = ConstOp::zero(self.dim, order);
        let c_inv = c.recip();
        for (m, v) in &self.terms {
            if m.is_unit() {
                continue;
            }
            e.add_term(m.clone(), v.scale(&-c_inv.clone()));
        }
        let mut result = ConstOp::identity(self.dim, order);
        let mut power = ConstOp::identity(self.dim, order);
        for _ in 1..=order {
            power = power.compose(&e)?;
            if power.terms.is_empty() {
                break;
            }
            result = result.add(&power)?;
        }
        Ok(result.scale_rat(&c_inv))
    }
}

fn truncated(op: &ConstOp, order: usize) -> ConstOp {
    let mut out = ConstOp::zero(op.dim, order);
    for (m, c) in &op.terms {
        if m.degree() <= order {
            out.add_term(m.clone(), c.clone());
        }
    }
    out
}

impl fmt::Display for ConstOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<String> = (1..=self.dim).map(|i| format!("d{i}")).collect();
        let poly = Poly {
            dim: self.dim,
            terms: self.terms.clone(),
        };
        write!(f, "{}", poly.render(&names))
    }
}
