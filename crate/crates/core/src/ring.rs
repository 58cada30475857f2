//! Exact coefficient arithmetic.
//!
//! Coefficients live in the polynomial ring `Q[l3, l5, l7, ...]` where `l{n}`
//! is a formal symbol standing for the transcendental number
//! `zeta(n) / (n * (2*pi*i)^n)` with `n` odd, `n >= 3`. Working with formal
//! generators keeps every identity in the crate exact; [`Coefficient::evaluate`]
//! restores the numeric meaning in double precision.
//!
//! Even-index zeta values never appear as generators: `zeta(2n)` is a rational
//! multiple of `pi^(2n)` and the combinations used here collapse to plain
//! rationals through Bernoulli numbers (see the `duflo` module).
//!
//! Note that algebraic independence of the odd zeta values is an open
//! conjecture; the free polynomial ring is a modeling choice, not a theorem.
//! Nothing downstream depends on it: equalities proved here are identities in
//! the free ring and therefore hold numerically regardless.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational scalar. Always stored with positive
/// denominator and in lowest terms.
pub type Rational = BigRational;

/// Complex double-precision value produced by numeric evaluation.
pub type NumericValue = Complex64;

/// Shorthand for small rational constants.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses "p", "-p", "p/q" into a rational. Used by the algebra file format.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = |msg: &str| Error::Parse {
        at: 0,
        message: format!("invalid rational '{s}': {msg}"),
    };
    let mut parts = s.splitn(2, '/');
    let num: BigInt = parts
        .next()
        .unwrap()
        .trim()
        .parse()
        .map_err(|_| err("bad numerator"))?;
    let den: BigInt = match parts.next() {
        Some(d) => d.trim().parse().map_err(|_| err("bad denominator"))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Renders a rational as "p" or "p/q".
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

static LAMBDA_DEGREE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_LAMBDA_DEGREE_CAP);

/// Default cap on the total weight of a lambda monomial. Weight of
/// `l{n1}*...*l{nk}` is `n1 + ... + nk`; the default admits everything that
/// can arise under the default polynomial degree cap of 6.
pub const DEFAULT_LAMBDA_DEGREE_CAP: usize = 8;

/// Returns the process-wide lambda-degree cap.
pub fn lambda_degree_cap() -> usize {
    LAMBDA_DEGREE_CAP.load(Ordering::Relaxed)
}

/// Reconfigures the process-wide lambda-degree cap.
pub fn set_lambda_degree_cap(cap: usize) {
    LAMBDA_DEGREE_CAP.store(cap, Ordering::Relaxed);
}

/// A monomial in the generators `l3, l5, ...`: a sorted multiset of odd
/// indices. The empty monomial is the rational unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LambdaMono(Vec<u32>);

impl LambdaMono {
    pub fn unit() -> Self {
        LambdaMono(Vec::new())
    }

    pub fn generator(n: u32) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidLambdaIndex(n));
        }
        Ok(LambdaMono(vec![n]))
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    /// Total weight: the sum of the generator indices.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    fn mul(&self, other: &Self) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        LambdaMono(v)
    }
}

// Graded order: weight first, then lexicographic. Gives a canonical term
// order for display and equality of coefficient maps.
impl Ord for LambdaMono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for LambdaMono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LambdaMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let n = self.0[i];
            let mut pow = 1;
            while i + pow < self.0.len() && self.0[i + pow] == n {
                pow += 1;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if pow == 1 {
                write!(f, "l{n}")?;
            } else {
                write!(f, "l{n}^{pow}")?;
            }
            i += pow;
        }
        Ok(())
    }
}

/// An element of `Q[l3, l5, l7, ...]`, stored as a canonical sparse map.
/// No zero values are kept, so two coefficients are equal iff their maps are.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Coefficient {
    terms: BTreeMap<LambdaMono, Rational>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::default()
    }

    pub fn one() -> Self {
        Coefficient::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(LambdaMono::unit(), r);
        }
        Coefficient { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Coefficient::from_rational(rat(n, 1))
    }

    /// The formal generator `l{n}` representing `zeta(n)/(n (2 pi i)^n)`.
    pub fn lambda(n: u32) -> Result<Self> {
        let mono = LambdaMono::generator(n)?;
        let mut terms = BTreeMap::new();
        terms.insert(mono, Rational::one());
        Ok(Coefficient { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the coefficient lies in the rational subring.
    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(LambdaMono::is_unit)
    }

    /// The rational part (coefficient of the unit monomial).
    pub fn rational_part(&self) -> Rational {
        self.terms
            .get(&LambdaMono::unit())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Exact rational value, if the coefficient is lambda-free.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_rational() {
            Some(self.rational_part())
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LambdaMono, &Rational)> {
        self.terms.iter()
    }

    /// Largest total lambda weight appearing, or 0 for a rational value.
    pub fn lambda_weight(&self) -> usize {
        self.terms.keys().map(LambdaMono::weight).max().unwrap_or(0)
    }

    fn insert_term(&mut self, mono: LambdaMono, r: Rational) {
        if r.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
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

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, r) in &other.terms {
            out.insert_term(m.clone(), r.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, r) in &other.terms {
            out.insert_term(m.clone(), -r.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, r)| (m.clone(), -r.clone()))
            .collect();
        Coefficient { terms }
    }

    /// Product with the process-wide lambda-degree cap.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.try_mul_capped(other, lambda_degree_cap())
    }

    /// Product with an explicit cap. A product monomial whose total weight
    /// exceeds the cap is an error, never a silent truncation.
    pub fn try_mul_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        let mut out = Coefficient::zero();
        for (ma, ra) in &self.terms {
            for (mb, rb) in &other.terms {
                let mono = ma.mul(mb);
                let weight = mono.weight();
                if weight > cap {
                    return Err(Error::LambdaDegreeCap { weight, cap });
                }
                out.insert_term(mono, ra * rb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Coefficient::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c * r))
            .collect();
        Coefficient { terms }
    }

    /// Substitutes the numeric value of every generator and evaluates in
    /// double precision.
    pub fn evaluate(&self) -> Result<NumericValue> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (mono, r) in &self.terms {
            let mut term = Complex64::new(rational_to_f64(r), 0.0);
            for &n in mono.indices() {
                term *= lambda_value(n);
            }
            acc += term;
        }
        if acc.re.is_finite() && acc.im.is_finite() {
            Ok(acc)
        } else {
            Err(Error::NonFiniteValue)
        }
    }
}

impl fmt::Display for Coefficient {
    /// Canonical form: terms in increasing graded-lex order, e.g.
    /// `1/48`, `(-3/2)*l3*l5`, `1 + 2*l3`. Parsed back by `parse::coefficient`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, r) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if mono.is_unit() {
                write!(f, "{}", format_rational(r))?;
            } else if r.is_one() {
                write!(f, "{mono}")?;
            } else if r.is_negative() {
                write!(f, "({})*{mono}", format_rational(r))?;
            } else {
                write!(f, "{}*{mono}", format_rational(r))?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Coefficient {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        crate::parse::coefficient(s)
    }
}

/// Rational to double. Uses the ratio of float conversions as a fallback for
/// values whose numerator or denominator exceed f64 range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Numeric value of the generator `l{n}`: `zeta(n)/(n (2 pi i)^n)` for odd n.
/// `1/i^n` is `-i` for `n = 1 mod 4` and `+i` for `n = 3 mod 4`.
pub fn lambda_value(n: u32) -> Complex64 {
    debug_assert!(n >= 3 && n % 2 == 1);
    let magnitude = zeta(n) / (f64::from(n) * (2.0 * std::f64::consts::PI).powi(n as i32));
    if n % 4 == 1 {
        Complex64::new(0.0, -magnitude)
    } else {
        Complex64::new(0.0, magnitude)
    }
}

/// Riemann zeta at an integer argument `n >= 2`, by partial sum plus
/// Euler-Maclaurin tail. Absolute error far below 1e-12 for K = 1000.
pub fn zeta(n: u32) -> f64 {
    debug_assert!(n >= 2);
    let s = f64::from(n);
    const K: u32 = 1000;
    let mut sum = 0.0;
    for k in 1..K {
        sum += (f64::from(k)).powi(-(n as i32));
    }
    let kf = f64::from(K);
    // tail: integral + midpoint + first derivative correction
    sum += kf.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * kf.powf(-s);
    sum += s / 12.0 * kf.powf(-s - 1.0);
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(n: u32) -> Coefficient {
        Coefficient::lambda(n).unwrap()
    }

    #[test]
    fn scalar_distributivity() {
        // (1/2 + l3) * 2 = 1 + 2*l3
        let a = Coefficient::from_rational(rat(1, 2)).add(&l(3));
        let two = Coefficient::from_int(2);
        let prod = a.try_mul(&two).unwrap();
        let expected = Coefficient::one().add(&l(3).scale(&rat(2, 1)));
        assert_eq!(prod, expected);
    }

    #[test]
    fn free_commutative_multiplication() {
        let p = l(3).try_mul(&l(5)).unwrap();
        let q = l(5).try_mul(&l(3)).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.lambda_weight(), 8);
        assert_eq!(p.to_string(), "l3*l5");
    }

    #[test]
    fn cancellation_leaves_empty_storage() {
        let d = l(3).sub(&l(3));
        assert!(d.is_zero());
        assert_eq!(d.terms.len(), 0);
    }

    #[test]
    fn lambda_index_domain() {
        assert!(Coefficient::lambda(3).is_ok());
        assert!(Coefficient::lambda(5).is_ok());
        assert_eq!(
            Coefficient::lambda(4).unwrap_err(),
            Error::InvalidLambdaIndex(4)
        );
        assert_eq!(
            Coefficient::lambda(1).unwrap_err(),
            Error::InvalidLambdaIndex(1)
        );
    }

    #[test]
    fn cap_overflow_is_an_error() {
        let p = l(3).try_mul_capped(&l(3), 8).unwrap();
        assert_eq!(p.lambda_weight(), 6);
        let err = p.try_mul_capped(&l(3), 8).unwrap_err();
        assert_eq!(err, Error::LambdaDegreeCap { weight: 9, cap: 8 });
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        assert!((zeta(3) - 1.2020569031595942).abs() < 1e-12);
        assert!((zeta(4) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-12);
    }

    #[test]
    fn lambda3_numeric() {
        // zeta(3) i / (24 pi^3), approximately 0.0016154 i
        let v = l(3).evaluate().unwrap();
        let expected = 1.2020569031595942 / (24.0 * std::f64::consts::PI.powi(3));
        assert!(v.re.abs() < 1e-15);
        assert!((v.im - expected).abs() < 1e-12);
        assert!((v.im - 0.0016154).abs() < 1e-6);
    }

    #[test]
    fn rational_embedding_numeric() {
        let v = Coefficient::from_rational(rat(1, 48)).evaluate().unwrap();
        assert_eq!(v.im, 0.0);
        assert!((v.re - 1.0 / 48.0).abs() < 1e-16);
        let z = Coefficient::zero().evaluate().unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn canonical_display() {
        let c = Coefficient::from_rational(rat(-3, 2))
            .try_mul(&l(3).try_mul(&l(5)).unwrap())
            .unwrap();
        assert_eq!(c.to_string(), "(-3/2)*l3*l5");
        let c2 = Coefficient::from_rational(rat(1, 48));
        assert_eq!(c2.to_string(), "1/48");
        let c3 = l(3).try_mul(&l(3)).unwrap();
        assert_eq!(c3.to_string(), "l3^2");
    }
}
