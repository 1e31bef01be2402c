use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::pmatrix::{Homogeneity, PolyMatrix};
use super::poly::{Monomial, MultiPoly};
use super::rational::Rational;
use super::rmatrix::RationalMatrix;
use crate::error::Error;

/// Homogeneous constant-coefficient operator 𝒜 = Σ_{|α|=k} 𝒜^α ∂_α from
/// ℝ^N-valued fields on ℝ^d (or the torus) to ℝ^m-valued fields.
#[derive(Clone, PartialEq, Eq)]
pub struct OperatorDescriptor {
    d: usize,
    k: u32,
    n: usize,
    m: usize,
    terms: BTreeMap<Monomial, RationalMatrix>,
}

impl OperatorDescriptor {
    /// Validated constructor for user-supplied operators; the zero operator is rejected.
    pub fn new(
        d: usize,
        k: u32,
        n: usize,
        m: usize,
        terms: impl IntoIterator<Item = (Monomial, RationalMatrix)>,
    ) -> Result<Self, Error> {
        let op = Self::build(d, k, n, m, terms)?;
        if op.terms.is_empty() {
            return Err(Error::InvalidOperator("all coefficient matrices are zero".into()));
        }
        Ok(op)
    }

    fn build(
        d: usize,
        k: u32,
        n: usize,
        m: usize,
        terms: impl IntoIterator<Item = (Monomial, RationalMatrix)>,
    ) -> Result<Self, Error> {
        if d == 0 || n == 0 || m == 0 {
            return Err(Error::InvalidOperator("d, N and m must be positive".into()));
        }
        let mut map: BTreeMap<Monomial, RationalMatrix> = BTreeMap::new();
        for (alpha, mat) in terms {
            if alpha.dim() != d {
                return Err(Error::InvalidOperator(format!(
                    "multi-index {alpha:?} is not of length {d}"
                )));
            }
            if alpha.degree() != k {
                return Err(Error::InvalidOperator(format!(
                    "multi-index {alpha:?} does not have |α| = {k}"
                )));
            }
            if (mat.rows(), mat.cols()) != (m, n) {
                return Err(Error::InvalidOperator(format!(
                    "coefficient of {alpha:?} is {}x{}, expected {m}x{n}",
                    mat.rows(),
                    mat.cols()
                )));
            }
            let merged = match map.remove(&alpha) {
                Some(prev) => prev.add(&mat),
                None => mat,
            };
            if !merged.is_zero() {
                map.insert(alpha, merged);
            }
        }
        Ok(OperatorDescriptor { d, k, n, m, terms: map })
    }

    /// Reads coefficients off a symbol homogeneous of degree `order` (or zero):
    /// the coefficient of ξ^α in 𝒜[ξ] is 𝒜^α. The zero operator is allowed here.
    pub fn from_symbol(symbol: &PolyMatrix, order: u32) -> Result<Self, Error> {
        match symbol.homogeneity() {
            Homogeneity::Zero => {}
            Homogeneity::Of(q) if q == order => {}
            other => {
                return Err(Error::InvalidOperator(format!(
                    "symbol is {other:?}, expected homogeneous of degree {order}"
                )))
            }
        }
        let (m, n) = (symbol.rows(), symbol.cols());
        let mut terms: BTreeMap<Monomial, RationalMatrix> = BTreeMap::new();
        for i in 0..m {
            for j in 0..n {
                for (alpha, c) in symbol.get(i, j).terms() {
                    terms
                        .entry(alpha.clone())
                        .or_insert_with(|| RationalMatrix::zeros(m, n))
                        .set(i, j, c.clone());
                }
            }
        }
        Self::build(symbol.dim(), order, n, m, terms)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Homogeneity order k.
    pub fn order(&self) -> u32 {
        self.k
    }

    /// Fiber dimension of the domain (N).
    pub fn domain_dim(&self) -> usize {
        self.n
    }

    /// Fiber dimension of the target (m).
    pub fn target_dim(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RationalMatrix)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &Monomial) -> Option<&RationalMatrix> {
        self.terms.get(alpha)
    }

    /// Fourier symbol 𝒜[ξ] = Σ ξ^α 𝒜^α.
    pub fn symbol(&self) -> PolyMatrix {
        PolyMatrix::from_fn(self.d, self.m, self.n, |i, j| {
            MultiPoly::from_terms(
                self.d,
                self.terms
                    .iter()
                    .map(|(alpha, mat)| (alpha.clone(), mat.get(i, j).clone())),
            )
        })
    }

    /// Same operator with one coefficient overwritten; the result is not re-validated
    /// against the zero-operator rule.
    pub fn with_coefficient(&self, alpha: &Monomial, i: usize, j: usize, value: Rational) -> Self {
        let mut out = self.clone();
        let mat = out
            .terms
            .entry(alpha.clone())
            .or_insert_with(|| RationalMatrix::zeros(self.m, self.n));
        mat.set(i, j, value);
        if mat.is_zero() {
            out.terms.remove(alpha);
        }
        out
    }

    pub(crate) fn to_wire(&self) -> OperatorWire {
        OperatorWire {
            d: self.d,
            k: self.k,
            n: self.n,
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(alpha, mat)| OperatorTermWire {
                    alpha: alpha.exponents().to_vec(),
                    matrix: mat.clone(),
                })
                .collect(),
        }
    }

    pub(crate) fn from_wire(w: &OperatorWire, allow_zero: bool) -> Result<Self, Error> {
        let terms = w.terms.iter().map(|t| (Monomial::new(&t.alpha), t.matrix.clone()));
        if allow_zero {
            Self::build(w.d, w.k, w.n, w.m, terms)
        } else {
            Self::new(w.d, w.k, w.n, w.m, terms)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        Self::from_wire(&serde_json::from_str(s)?, false)
    }

    pub fn read(path: &Path) -> Result<Self, Error> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl std::fmt::Debug for OperatorDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorDescriptor")
            .field("d", &self.d)
            .field("k", &self.k)
            .field("N", &self.n)
            .field("m", &self.m)
            .field("terms", &self.terms)
            .finish()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct OperatorTermWire {
    pub alpha: Vec<u32>,
    pub matrix: RationalMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct OperatorWire {
    pub d: usize,
    pub k: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    pub terms: Vec<OperatorTermWire>,
}

/// Fourier symbol of an operator.
pub fn symbol_of(op: &OperatorDescriptor) -> PolyMatrix {
    op.symbol()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_operator_is_rejected() {
        let err = OperatorDescriptor::new(2, 1, 2, 1, [(Monomial::new(&[1, 0]), RationalMatrix::zeros(1, 2))]);
        assert!(matches!(err, Err(Error::InvalidOperator(_))));
    }

    #[test]
    fn wrong_order_is_rejected() {
        let err = OperatorDescriptor::new(2, 1, 1, 1, [(Monomial::new(&[1, 1]), RationalMatrix::identity(1))]);
        assert!(matches!(err, Err(Error::InvalidOperator(_))));
    }

    #[test]
    fn laplacian_symbol() {
        let lap = OperatorDescriptor::new(
            2,
            2,
            1,
            1,
            [
                (Monomial::new(&[2, 0]), RationalMatrix::identity(1)),
                (Monomial::new(&[0, 2]), RationalMatrix::identity(1)),
            ],
        )
        .unwrap();
        assert_eq!(symbol_of(&lap).get(0, 0).to_string(), "x1^2 + x2^2");
    }

    #[test]
    fn symbol_readoff_round_trip() {
        let json = r#"{"d":2,"k":1,"N":2,"m":1,"terms":[
            {"alpha":[1,0],"matrix":[["1","0"]]},
            {"alpha":[0,1],"matrix":[["0","1/2"]]}]}"#;
        let op = OperatorDescriptor::from_json(json).unwrap();
        let back = OperatorDescriptor::from_symbol(&op.symbol(), 1).unwrap();
        assert_eq!(back, op);
        assert_eq!(OperatorDescriptor::from_json(&op.to_json()).unwrap(), op);
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(OperatorDescriptor::from_json("{\"d\":2}").is_err());
        let bad_rational = r#"{"d":1,"k":1,"N":1,"m":1,"terms":[{"alpha":[1],"matrix":[["1/0"]]}]}"#;
        assert!(OperatorDescriptor::from_json(bad_rational).is_err());
    }
}
