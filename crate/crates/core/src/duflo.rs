//! The Duflo element, its logarithmic variant, the equivalence operator
//! built from odd traces, and the star products obtained by transferring the
//! enveloping-algebra product through them.
//!
//! With `c_n` the trace polynomials of the algebra, the operators are
//!
//! * Duflo:        `exp(-1/4 c_1(D) + sum_{n>=1} B_{2n}/((4n)(2n)!) c_{2n}(D))`
//! * equivalence:  `exp(sum_{n>=1} l_{2n+1} c_{2n+1}(D))`
//! * logarithmic:  Duflo composed with the equivalence operator,
//!
//! where `l_k` is the formal symbol for `zeta(k)/(k (2 pi i)^k)`. The `-1/4`
//! on `c_1` is one fixed convention; since `c_1(D)` is a derivation of every
//! product here, the coefficient is exposed as a knob.
//!
//! Products: `f (star) g = I^{-1}(I(f) . I(g))` with `I` the composite of the
//! operator and PBW symmetrization. Both factors of the inverse are
//! triangular for the degree filtration, so truncation at the configured
//! degree cap is exact for inputs within the cap.

use std::sync::Arc;

use num::{BigInt, One, Zero};

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::ring::{rat, Coefficient, Rational};
use crate::sym::{ConstOp, Poly};
use crate::uea::{UeaAlgebra, UeaElement};

/// Default truncation: total degree of any star-product input pair.
pub const DEFAULT_DEGREE_CAP: usize = 6;

/// Which transfer isomorphism to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarProductKind {
    /// PBW composed with the Duflo element (standard propagator product).
    Standard,
    /// PBW composed with the logarithmic element.
    Logarithmic,
    /// PBW alone.
    Gutt,
}

impl StarProductKind {
    pub const ALL: [StarProductKind; 3] = [
        StarProductKind::Standard,
        StarProductKind::Logarithmic,
        StarProductKind::Gutt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StarProductKind::Standard => "standard",
            StarProductKind::Logarithmic => "logarithmic",
            StarProductKind::Gutt => "gutt",
        }
    }
}

impl std::str::FromStr for StarProductKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "star" => Ok(StarProductKind::Standard),
            "logarithmic" | "log" => Ok(StarProductKind::Logarithmic),
            "gutt" | "pbw" => Ok(StarProductKind::Gutt),
            other => Err(Error::Parse {
                at: 0,
                message: format!("unknown star product kind '{other}'"),
            }),
        }
    }
}

/// Bernoulli number `B_n` (convention `B_1 = -1/2`), exact.
pub fn bernoulli(n: usize) -> Rational {
    let mut b = vec![Rational::zero(); n + 1];
    b[0] = Rational::one();
    for m in 1..=n {
        // B_m = -1/(m+1) sum_{j<m} C(m+1, j) B_j
        let mut acc = Rational::zero();
        let mut binom = Rational::one(); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate().take(m) {
            acc += binom.clone() * bj;
            binom = binom * rat((m + 1 - j) as i64, 1) / rat(j as i64 + 1, 1);
        }
        b[m] = -acc / rat(m as i64 + 1, 1);
    }
    b.swap_remove(n)
}

fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rational::from(acc)
}

fn trace_op(lie: &LieAlgebra, n: usize, order: usize) -> Result<ConstOp> {
    ConstOp::from_symbol(lie.trace_polynomial(n)?.poly(), order)
}

/// Exponent series of the Duflo element, truncated at `order`:
/// `c1_coeff * c_1(D) + sum B_{2n}/((4n)(2n)!) c_{2n}(D)`.
pub fn duflo_exponent(lie: &LieAlgebra, order: usize, c1_coeff: &Rational) -> Result<ConstOp> {
    let mut exponent = ConstOp::zero(lie.dim(), order);
    if order >= 1 && !c1_coeff.is_zero() {
        exponent = exponent.add(&trace_op(lie, 1, order)?.scale_rat(c1_coeff))?;
    }
    let mut n = 1;
    while 2 * n <= order {
        let coeff = bernoulli(2 * n) / (rat(4 * n as i64, 1) * factorial(2 * n));
        exponent = exponent.add(&trace_op(lie, 2 * n, order)?.scale_rat(&coeff))?;
        n += 1;
    }
    Ok(exponent)
}

/// The Duflo element as an invertible operator, truncated at `order`.
pub fn duflo_element(lie: &LieAlgebra, order: usize) -> Result<ConstOp> {
    duflo_exponent(lie, order, &rat(-1, 4))?.exp(order)
}

/// Exponent series of the equivalence operator:
/// `sum_{n>=1} l_{2n+1} c_{2n+1}(D)`, truncated at `order`.
pub fn equivalence_exponent(lie: &LieAlgebra, order: usize) -> Result<ConstOp> {
    let mut exponent = ConstOp::zero(lie.dim(), order);
    let mut n = 1;
    while 2 * n + 1 <= order {
        let lambda = Coefficient::lambda(2 * n as u32 + 1)?;
        exponent = exponent.add(&trace_op(lie, 2 * n + 1, order)?.scale(&lambda)?)?;
        n += 1;
    }
    Ok(exponent)
}

/// The operator intertwining the logarithmic and standard products.
pub fn equivalence_operator(lie: &LieAlgebra, order: usize) -> Result<ConstOp> {
    equivalence_exponent(lie, order)?.exp(order)
}

/// The logarithmic element: the Duflo element composed with the equivalence
/// operator. Even part identical to the Duflo element, odd part carries the
/// formal `l_{2n+1}` generators.
pub fn log_element(lie: &LieAlgebra, order: usize) -> Result<ConstOp> {
    Ok(duflo_element(lie, order)?.compose(&equivalence_operator(lie, order)?)?)
}

/// Precomputed transfer data for one algebra at one degree cap. Construction
/// builds all operators and their inverses once; the product calls are pure.
pub struct Quantizer {
    lie: Arc<LieAlgebra>,
    uea: Arc<UeaAlgebra>,
    cap: usize,
    duflo: ConstOp,
    duflo_inv: ConstOp,
    log: ConstOp,
    log_inv: ConstOp,
    equivalence: ConstOp,
}

impl Quantizer {
    pub fn new(lie: Arc<LieAlgebra>) -> Result<Self> {
        Self::with_cap(lie, DEFAULT_DEGREE_CAP)
    }

    pub fn with_cap(lie: Arc<LieAlgebra>, cap: usize) -> Result<Self> {
        Self::with_c1_coefficient(lie, cap, rat(-1, 4))
    }

    /// Overrides the coefficient of `c_1` in both exponent series.
    pub fn with_c1_coefficient(
        lie: Arc<LieAlgebra>,
        cap: usize,
        c1_coeff: Rational,
    ) -> Result<Self> {
        let duflo = duflo_exponent(&lie, cap, &c1_coeff)?.exp(cap)?;
        let equivalence = equivalence_operator(&lie, cap)?;
        let log = duflo.compose(&equivalence)?;
        let duflo_inv = duflo.invert()?;
        let log_inv = log.invert()?;
        let uea = UeaAlgebra::new(Arc::clone(&lie));
        Ok(Quantizer {
            lie,
            uea,
            cap,
            duflo,
            duflo_inv,
            log,
            log_inv,
            equivalence,
        })
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.lie
    }

    pub fn uea(&self) -> &Arc<UeaAlgebra> {
        &self.uea
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn duflo_element(&self) -> &ConstOp {
        &self.duflo
    }

    pub fn log_element(&self) -> &ConstOp {
        &self.log
    }

    pub fn equivalence_operator(&self) -> &ConstOp {
        &self.equivalence
    }

    fn forward_op(&self, kind: StarProductKind) -> Option<&ConstOp> {
        match kind {
            StarProductKind::Standard => Some(&self.duflo),
            StarProductKind::Logarithmic => Some(&self.log),
            StarProductKind::Gutt => None,
        }
    }

    fn inverse_op(&self, kind: StarProductKind) -> Option<&ConstOp> {
        match kind {
            StarProductKind::Standard => Some(&self.duflo_inv),
            StarProductKind::Logarithmic => Some(&self.log_inv),
            StarProductKind::Gutt => None,
        }
    }

    fn check_cap(&self, degree: usize) -> Result<()> {
        if degree > self.cap {
            Err(Error::DegreeOverCap {
                degree,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    /// The algebra isomorphism for `kind`: apply the operator, then
    /// symmetrize into the PBW basis.
    pub fn iso_to_uea(&self, kind: StarProductKind, f: &Poly) -> Result<UeaElement> {
        self.check_cap(f.degree())?;
        let image = match self.forward_op(kind) {
            Some(op) => op.apply(f)?,
            None => f.clone(),
        };
        self.uea.pbw_symmetrize(&image)
    }

    /// Inverse of [`Self::iso_to_uea`].
    pub fn iso_from_uea(&self, kind: StarProductKind, u: &UeaElement) -> Result<Poly> {
        self.check_cap(u.degree())?;
        let p = self.uea.pbw_inverse(u)?;
        match self.inverse_op(kind) {
            Some(op) => op.apply(&p),
            None => Ok(p),
        }
    }

    /// The star product of `kind`, exact.
    pub fn star(&self, kind: StarProductKind, f: &Poly, g: &Poly) -> Result<Poly> {
        self.check_cap(f.degree() + g.degree())?;
        let u = self.iso_to_uea(kind, f)?;
        let v = self.iso_to_uea(kind, g)?;
        self.iso_from_uea(kind, &u.mul(&v)?)
    }

    /// Applies the equivalence operator to a polynomial.
    pub fn apply_equivalence(&self, f: &Poly) -> Result<Poly> {
        self.equivalence.apply(f)
    }

    /// The operator `c_1(D)`, order 1; the derivation featuring in the
    /// derivation checks.
    pub fn c1_operator(&self) -> Result<ConstOp> {
        trace_op(&self.lie, 1, self.cap)
    }
}

/// Extracts the order-`k` piece of a star product of homogeneous inputs via
/// the degree defect: the component of degree `deg f + deg g - k`.
pub fn order_component(f: &Poly, g: &Poly, result: &Poly, k: usize) -> Result<Poly> {
    let df = f.homogeneity().ok_or(Error::NonHomogeneous)?;
    let dg = g.homogeneity().ok_or(Error::NonHomogeneous)?;
    let total = df + dg;
    if k > total {
        return Ok(Poly::zero(result.dim()));
    }
    Ok(result.homogeneous_component(total - k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::builtin;
    use crate::sym::Monomial;

    fn quantizer(name: &str) -> Quantizer {
        Quantizer::new(Arc::new(builtin(name).unwrap())).unwrap()
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), rat(1, 1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), rat(0, 1));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(6), rat(1, 42));
        assert_eq!(bernoulli(8), rat(-1, 30));
    }

    #[test]
    fn duflo_identity_on_nilpotent_and_abelian() {
        assert!(quantizer("heisenberg3").duflo_element().is_identity());
        assert!(quantizer("abelian3").duflo_element().is_identity());
        assert!(quantizer("heisenberg3").log_element().is_identity());
    }

    #[test]
    fn duflo_exponent_c2_coefficient_is_1_48() {
        // B_2/((4)(2)!) = 1/48
        for name in ["sl2", "gl2", "aff1", "t2"] {
            let lie = builtin(name).unwrap();
            let exponent = duflo_exponent(&lie, 6, &rat(-1, 4)).unwrap();
            let c2 = lie.trace_polynomial(2).unwrap();
            assert!(!c2.is_zero(), "{name} should have c2 != 0");
            let expected = ConstOp::from_symbol(&c2.poly().scale_rat(&rat(1, 48)), 6).unwrap();
            // compare the degree-2 parts
            for (m, c) in expected.terms() {
                assert_eq!(exponent.coefficient(m), c.clone(), "{name} {m:?}");
            }
            for (m, c) in exponent.terms() {
                if m.degree() == 2 {
                    assert_eq!(expected.coefficient(m), c.clone(), "{name}");
                }
            }
        }
    }

    #[test]
    fn equivalence_trivial_when_odd_traces_vanish() {
        for name in ["sl2", "gl2", "heisenberg3", "abelian3"] {
            assert!(
                quantizer(name).equivalence_operator().is_identity(),
                "{name}"
            );
        }
    }

    #[test]
    fn equivalence_fixes_degree_one() {
        let q = quantizer("aff1");
        for i in 0..2 {
            let x = Poly::var(2, i);
            assert_eq!(q.apply_equivalence(&x).unwrap(), x);
        }
        assert!(!q.equivalence_operator().is_identity());
    }

    #[test]
    fn log_element_factorizes() {
        for name in ["aff1", "t2", "sl2"] {
            let q = quantizer(name);
            let composed = q
                .duflo_element()
                .compose(q.equivalence_operator())
                .unwrap();
            assert_eq!(&composed, q.log_element(), "{name}");
        }
    }

    #[test]
    fn aff1_log_odd_part_lowest_term() {
        // c_3 = (x*)^3 on aff1, so the lambda-linear part starts at l3 * Dx^3
        let q = quantizer("aff1");
        let l3 = Coefficient::lambda(3).unwrap();
        let mut found = false;
        for (m, c) in q.log_element().terms() {
            let lambda_linear: Vec<_> = c
                .terms()
                .filter(|(mono, _)| mono.indices() == [3])
                .collect();
            if lambda_linear.is_empty() {
                continue;
            }
            assert!(m.degree() >= 3);
            if m == &Monomial::from_exponents(vec![3, 0]) {
                found = true;
            }
        }
        assert!(found);
        // and its value there is exactly l3 (coefficient 1)
        let at = q
            .log_element()
            .coefficient(&Monomial::from_exponents(vec![3, 0]));
        let linear_part: Coefficient = at
            .terms()
            .filter(|(mono, _)| !mono.is_unit())
            .fold(Coefficient::zero(), |acc, (mono, r)| {
                let mut c = Coefficient::zero();
                let mut term = Coefficient::lambda(mono.indices()[0]).unwrap();
                for &idx in &mono.indices()[1..] {
                    term = term.try_mul(&Coefficient::lambda(idx).unwrap()).unwrap();
                }
                c = c.add(&term.scale(r));
                acc.add(&c)
            });
        assert_eq!(linear_part, l3);
    }

    #[test]
    fn iso_fixes_degree_one() {
        for name in ["aff1", "sl2", "t2"] {
            let q = quantizer(name);
            let d = q.algebra().dim();
            for kind in StarProductKind::ALL {
                let x = Poly::var(d, 0);
                let u = q.iso_to_uea(kind, &x).unwrap();
                assert_eq!(u, q.uea().generator(0), "{name} {kind:?}");
            }
        }
    }

    #[test]
    fn iso_kinds_coincide_on_nilpotent() {
        let q = quantizer("heisenberg3");
        let f = q.algebra().parse_poly("x^2*y + z^3 - x").unwrap();
        let a = q.iso_to_uea(StarProductKind::Standard, &f).unwrap();
        let b = q.iso_to_uea(StarProductKind::Logarithmic, &f).unwrap();
        let c = q.iso_to_uea(StarProductKind::Gutt, &f).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    #[test]
    fn iso_log_minus_iso_on_cube() {
        // on aff1: I_log(x^3) - I(x^3) = 6*l3
        let q = quantizer("aff1");
        let x3 = q.algebra().parse_poly("x^3").unwrap();
        let a = q.iso_to_uea(StarProductKind::Logarithmic, &x3).unwrap();
        let b = q.iso_to_uea(StarProductKind::Standard, &x3).unwrap();
        let diff = a.sub(&b);
        let six_l3 = Coefficient::lambda(3).unwrap().scale(&rat(6, 1));
        let mut expected = q.uea().zero();
        expected.add_term(Monomial::unit(2), six_l3);
        assert_eq!(diff, expected);
    }

    #[test]
    fn star_heisenberg_basic() {
        let q = quantizer("heisenberg3");
        let x = Poly::var(3, 0);
        let y = Poly::var(3, 1);
        let s = q.star(StarProductKind::Standard, &x, &y).unwrap();
        assert_eq!(q.algebra().render_poly(&s), "x*y + 1/2*z");
    }

    #[test]
    fn star_unit() {
        for name in ["aff1", "sl2", "heisenberg3", "t2"] {
            let q = quantizer(name);
            let d = q.algebra().dim();
            let f = Poly::var(d, 0)
                .mul(&Poly::var(d, d - 1))
                .unwrap()
                .add(&Poly::var(d, 0))
                .unwrap();
            for kind in StarProductKind::ALL {
                assert_eq!(q.star(kind, &Poly::one(d), &f).unwrap(), f, "{name}");
                assert_eq!(q.star(kind, &f, &Poly::one(d)).unwrap(), f, "{name}");
            }
        }
    }

    #[test]
    fn star_commutator_on_degree_one_is_poisson() {
        for name in ["aff1", "sl2", "heisenberg3", "t2", "gl2"] {
            let q = quantizer(name);
            let d = q.algebra().dim();
            for kind in StarProductKind::ALL {
                for i in 0..d {
                    for j in 0..d {
                        let xi = Poly::var(d, i);
                        let xj = Poly::var(d, j);
                        let comm = q
                            .star(kind, &xi, &xj)
                            .unwrap()
                            .sub(&q.star(kind, &xj, &xi).unwrap())
                            .unwrap();
                        let pb = q.algebra().poisson_bracket(&xi, &xj).unwrap();
                        assert_eq!(comm, pb, "{name} {kind:?} ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn star_degree_cap_enforced() {
        let q = quantizer("aff1");
        let f = q.algebra().parse_poly("x^4").unwrap();
        let g = q.algebra().parse_poly("y^3").unwrap();
        assert!(matches!(
            q.star(StarProductKind::Standard, &f, &g).unwrap_err(),
            Error::DegreeOverCap { degree: 7, cap: 6 }
        ));
    }

    #[test]
    fn order_component_basics() {
        let q = quantizer("heisenberg3");
        let x = Poly::var(3, 0);
        let y = Poly::var(3, 1);
        let s = q.star(StarProductKind::Standard, &x, &y).unwrap();
        let k0 = order_component(&x, &y, &s, 0).unwrap();
        assert_eq!(k0, x.mul(&y).unwrap());
        let k1 = order_component(&x, &y, &s, 1).unwrap();
        let anti = k1.sub(&order_component(&y, &x, &q.star(StarProductKind::Standard, &y, &x).unwrap(), 1).unwrap()).unwrap();
        assert_eq!(anti, q.algebra().poisson_bracket(&x, &y).unwrap());
        let k9 = order_component(&x, &y, &s, 9).unwrap();
        assert!(k9.is_zero());

        let not_homog = x.add(&Poly::one(3)).unwrap();
        assert!(matches!(
            order_component(&not_homog, &y, &s, 0).unwrap_err(),
            Error::NonHomogeneous
        ));
    }

    #[test]
    fn c1_is_derivation_spot_check() {
        let q = quantizer("aff1");
        let c1 = q.c1_operator().unwrap();
        let f = q.algebra().parse_poly("x^2*y").unwrap();
        let g = q.algebra().parse_poly("x*y").unwrap();
        for kind in [StarProductKind::Standard, StarProductKind::Logarithmic] {
            let lhs = c1.apply(&q.star(kind, &f, &g).unwrap()).unwrap();
            let rhs = q
                .star(kind, &c1.apply(&f).unwrap(), &g)
                .unwrap()
                .add(&q.star(kind, &f, &c1.apply(&g).unwrap()).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "{kind:?}");
        }
    }

    #[test]
    fn intertwining_spot_check() {
        let q = quantizer("t2");
        let f = q.algebra().parse_poly("a^2*n").unwrap();
        let g = q.algebra().parse_poly("d*n^2").unwrap();
        let lhs = q
            .apply_equivalence(&q.star(StarProductKind::Logarithmic, &f, &g).unwrap())
            .unwrap();
        let rhs = q
            .star(
                StarProductKind::Standard,
                &q.apply_equivalence(&f).unwrap(),
                &q.apply_equivalence(&g).unwrap(),
            )
            .unwrap();
        assert_eq!(lhs, rhs);
    }
}
