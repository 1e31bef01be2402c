use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::rational::Rational;
use crate::error::Error;

/// Exponent vector of a monomial ξ^α.
///
/// Ordered graded-lexicographically: lower total degree first; within a degree,
/// larger powers of earlier variables first (ξ₁² < ξ₁ξ₂ < ξ₂²).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn new(exponents: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exponents))
    }

    pub fn one(dim: usize) -> Self {
        Monomial(SmallVec::from_elem(0, dim))
    }

    pub fn var(dim: usize, index: usize) -> Self {
        let mut m = Self::one(dim);
        m.0[index] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.dim(), other.dim());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<SmallVec<_>>>()
            .map(Monomial)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.0.iter().zip(point).map(|(&e, &x)| x.powi(e as i32)).product()
    }

    /// All exponent vectors of dimension `dim` and total degree `degree`, in graded-lex order.
    pub fn all_of_degree(dim: usize, degree: u32) -> Vec<Monomial> {
        fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if prefix.len() + 1 == dim {
                prefix.push(left);
                out.push(Monomial::new(prefix));
                prefix.pop();
                return;
            }
            for e in (0..=left).rev() {
                prefix.push(e);
                rec(dim, left - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if dim == 0 {
            return out;
        }
        rec(dim, degree, &mut Vec::with_capacity(dim), &mut out);
        out
    }

    /// Multinomial coefficient Π_i binom(self_i, sub_i); zero when `sub` does not divide `self`.
    pub fn binomial(&self, sub: &Monomial) -> BigInt {
        let mut acc = BigInt::one();
        for (&n, &k) in self.0.iter().zip(&sub.0) {
            if k > n {
                return BigInt::zero();
            }
            acc *= binomial(n, k);
        }
        acc
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Multivariate polynomial in ξ₁..ξ_d with exact rational coefficients.
///
/// No zero coefficients are ever stored, so structural equality is
/// polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        MultiPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(dim, Monomial::one(dim), c)
    }

    pub fn var(dim: usize, index: usize) -> Self {
        Self::monomial(dim, Monomial::var(dim, index), Rational::one())
    }

    pub fn monomial(dim: usize, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.dim(), dim, "monomial dimension mismatch");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { dim, terms }
    }

    /// Builds a polynomial from (exponent, coefficient) pairs, merging duplicates.
    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        assert_eq!(m.dim(), self.dim, "monomial dimension mismatch");
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    /// Largest total degree among stored terms; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// `Some(q)` when every stored term has degree q. The zero polynomial is
    /// homogeneous of every degree and reports `None`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        let first = degrees.next()?;
        degrees.all(|q| q == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, q: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == q)
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        MultiPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.dim);
        }
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = ca * cb;
                acc.entry(ma.mul(mb)).and_modify(|v| *v += &prod).or_insert(prod);
            }
        }
        MultiPoly {
            dim: self.dim,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Accumulates `a * b` into `self` without materializing the product.
    pub fn add_product(&mut self, a: &MultiPoly, b: &MultiPoly) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = a.mul(b);
            return;
        }
        let mut acc: HashMap<Monomial, Rational> = std::mem::take(&mut self.terms).into_iter().collect();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let prod = ca * cb;
                acc.entry(ma.mul(mb)).and_modify(|v| *v += &prod).or_insert(prod);
            }
        }
        self.terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    }

    pub fn pow(&self, exp: u32) -> MultiPoly {
        let mut acc = Self::one(self.dim);
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to variable `index`.
    pub fn diff(&self, index: usize) -> MultiPoly {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.exponents()[index];
            if e == 0 {
                continue;
            }
            let mut ex: SmallVec<[u32; 4]> = m.0.clone();
            ex[index] -= 1;
            out.add_term(Monomial(ex), &(c * &Rational::from(i64::from(e))));
        }
        out
    }

    /// Mixed partial derivative ∂_α.
    pub fn diff_multi(&self, alpha: &Monomial) -> MultiPoly {
        let mut out = self.clone();
        for (index, &e) in alpha.exponents().iter().enumerate() {
            for _ in 0..e {
                out = out.diff(index);
            }
        }
        out
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.dim, "evaluation point has wrong dimension");
        if self.terms.is_empty() {
            return Rational::zero();
        }
        // With x_i = p_i/q_i and D_i the largest power of x_i, each term becomes the
        // integer c·Π p_i^e q_i^(D_i−e) over the common denominator Π q_i^D_i.
        let top: Vec<u32> = (0..self.dim)
            .map(|i| self.terms.keys().map(|m| m.exponents()[i]).max().unwrap_or(0))
            .collect();
        let powers = |base: &BigInt, n: u32| {
            let mut out = Vec::with_capacity(n as usize + 1);
            out.push(BigInt::one());
            for k in 0..n as usize {
                out.push(&out[k] * base);
            }
            out
        };
        let numer: Vec<_> = point.iter().zip(&top).map(|(x, &n)| powers(x.numer(), n)).collect();
        let denom: Vec<_> = point.iter().zip(&top).map(|(x, &n)| powers(x.denom(), n)).collect();
        let mut integer = BigInt::zero();
        let mut fractional = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.numer().clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                v *= &numer[i][e as usize];
                v *= &denom[i][(top[i] - e) as usize];
            }
            if c.is_integer() {
                integer += v;
            } else {
                fractional += &Rational::new(v, c.denom().clone()).expect("positive denominator");
            }
        }
        let common: BigInt = denom.iter().zip(&top).map(|(d, &n)| &d[n as usize]).product();
        (Rational::from_bigint(integer) + fractional) / Rational::from_bigint(common)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.dim, "evaluation point has wrong dimension");
        self.terms.iter().map(|(m, c)| c.to_f64() * m.eval_f64(point)).sum()
    }

    /// Positive rational c such that `self / c` has coprime integer coefficients.
    /// Returns 1 for the zero polynomial.
    pub fn content(&self) -> Rational {
        content_of(self.terms.values())
    }

    pub(crate) fn coefficients(&self) -> impl Iterator<Item = &Rational> {
        self.terms.values()
    }

    pub(crate) fn to_wire(&self) -> PolyWire {
        PolyWire {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermWire {
                    alpha: m.exponents().to_vec(),
                    coeff: c.clone(),
                })
                .collect(),
        }
    }

    pub(crate) fn from_wire(dim: usize, wire: &PolyWire) -> Result<Self, Error> {
        let mut p = Self::zero(dim);
        for t in &wire.terms {
            if t.alpha.len() != dim {
                return Err(Error::Parse(format!(
                    "monomial {:?} has length {}, expected {dim}",
                    t.alpha,
                    t.alpha.len()
                )));
            }
            p.add_term(Monomial::new(&t.alpha), &t.coeff);
        }
        Ok(p)
    }
}

/// Positive rational c such that every value divided by c is an integer and
/// the resulting integers are coprime.
pub(crate) fn content_of<'a, I>(values: I) -> Rational
where
    I: IntoIterator<Item = &'a Rational> + Clone,
{
    let lcm = Rational::denominator_lcm(values.clone());
    let mut gcd = BigInt::zero();
    for v in values {
        let scaled = v.numer() * (&lcm / v.denom());
        gcd = gcd.gcd(&scaled);
    }
    if gcd.is_zero() {
        return Rational::one();
    }
    Rational::new(gcd.abs(), lcm).expect("nonzero lcm")
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            let vars: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        format!("x{}", v + 1)
                    } else {
                        format!("x{}^{e}", v + 1)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct TermWire {
    pub alpha: Vec<u32>,
    pub coeff: Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct PolyWire {
    pub terms: Vec<TermWire>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(2, i)
    }

    #[test]
    fn graded_lex_order() {
        let mut ms = [
            Monomial::new(&[0, 2]),
            Monomial::new(&[1, 0]),
            Monomial::new(&[2, 0]),
            Monomial::new(&[1, 1]),
            Monomial::new(&[0, 0]),
        ];
        ms.sort();
        let got: Vec<_> = ms.iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(got, vec![vec![0, 0], vec![1, 0], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(
            Monomial::all_of_degree(2, 2),
            vec![Monomial::new(&[2, 0]), Monomial::new(&[1, 1]), Monomial::new(&[0, 2])]
        );
        assert_eq!(Monomial::all_of_degree(3, 4).len(), 15);
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let p = x(0).add(&x(1)).sub(&x(1));
        assert_eq!(p, x(0));
        assert_eq!(p.len(), 1);
        assert!(x(0).sub(&x(0)).is_zero());
    }

    #[test]
    fn square_of_sum() {
        let s = x(0).add(&x(1));
        let sq = s.mul(&s);
        assert_eq!(sq.to_string(), "x1^2 + 2*x1*x2 + x2^2");
        assert_eq!(sq.homogeneous_degree(), Some(2));
    }

    #[test]
    fn homogeneity() {
        assert_eq!(x(0).add(&MultiPoly::one(2)).homogeneous_degree(), None);
        assert_eq!(MultiPoly::zero(2).homogeneous_degree(), None);
        assert!(MultiPoly::zero(2).is_homogeneous_of(5));
    }

    #[test]
    fn derivative_of_monomial() {
        let p = x(0).pow(3).mul(&x(1));
        assert_eq!(p.diff(0).to_string(), "3*x1^2*x2");
        assert!(p.diff_multi(&Monomial::new(&[0, 2])).is_zero());
    }

    #[test]
    fn content_normalizes_to_coprime_integers() {
        let p = MultiPoly::from_terms(
            2,
            [
                (Monomial::new(&[1, 0]), Rational::ratio(2, 3)),
                (Monomial::new(&[0, 1]), Rational::ratio(-4, 9)),
            ],
        );
        let c = p.content();
        assert_eq!(c, Rational::ratio(2, 9));
        assert_eq!(p.scale(&c.recip()).to_string(), "3*x1 - 2*x2");
    }

    fn small_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec(((0u32..3, 0u32..3), -5i64..6), 0..5).prop_map(|ts| {
            MultiPoly::from_terms(
                2,
                ts.into_iter()
                    .map(|((a, b), c)| (Monomial::new(&[a, b]), Rational::from(c))),
            )
        })
    }

    proptest! {
        #[test]
        fn ring_laws(p in small_poly(), q in small_poly(), r in small_poly()) {
            prop_assert_eq!(p.mul(&q), q.mul(&p));
            prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
            let mut acc = r.clone();
            acc.add_product(&p, &q);
            prop_assert_eq!(acc, r.add(&p.mul(&q)));
        }

        #[test]
        fn evaluation_is_a_homomorphism(p in small_poly(), q in small_poly(), a in -4i64..5, b in -4i64..5) {
            let pt = [Rational::from(a), Rational::from(b)];
            prop_assert_eq!(p.mul(&q).eval_rational(&pt), p.eval_rational(&pt) * q.eval_rational(&pt));
        }
    }
}
