use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poly::{content_of, MultiPoly, PolyWire};
use super::rational::Rational;
use super::rmatrix::RationalMatrix;
use crate::error::Error;

/// How the nonzero entries of a polynomial matrix are graded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    /// Every entry is the zero polynomial.
    Zero,
    /// Every nonzero entry is homogeneous of this degree.
    Of(u32),
    Mixed,
}

/// Matrix of multivariate polynomials over ℚ sharing one variable count.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    dim: usize,
    rows: usize,
    cols: usize,
    entries: Vec<MultiPoly>,
}

impl PolyMatrix {
    pub fn zeros(dim: usize, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            dim,
            rows,
            cols,
            entries: vec![MultiPoly::zero(dim); rows * cols],
        }
    }

    pub fn identity(dim: usize, n: usize) -> Self {
        let mut m = Self::zeros(dim, n, n);
        for i in 0..n {
            m.entries[i * n + i] = MultiPoly::one(dim);
        }
        m
    }

    pub fn from_entries(dim: usize, rows: usize, cols: usize, entries: Vec<MultiPoly>) -> Result<Self, Error> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "entry in {} variables, matrix declared over {dim}",
                bad.dim()
            )));
        }
        Ok(PolyMatrix {
            dim,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(dim: usize, rows: usize, cols: usize, f: impl Fn(usize, usize) -> MultiPoly) -> Self {
        let entries = (0..rows * cols).map(|idx| f(idx / cols, idx % cols)).collect();
        Self::from_entries(dim, rows, cols, entries).expect("from_fn entries share dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: MultiPoly) {
        assert_eq!(p.dim(), self.dim);
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[MultiPoly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(MultiPoly::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn homogeneity(&self) -> Homogeneity {
        let mut degree = None;
        for p in self.entries.iter().filter(|p| !p.is_zero()) {
            match (p.homogeneous_degree(), degree) {
                (None, _) => return Homogeneity::Mixed,
                (Some(q), None) => degree = Some(q),
                (Some(q), Some(d)) if q != d => return Homogeneity::Mixed,
                _ => {}
            }
        }
        degree.map_or(Homogeneity::Zero, Homogeneity::Of)
    }

    /// Adjoint; coefficients are real so this is the transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn matmul(&self, other: &PolyMatrix) -> Result<Self, Error> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(
                "polynomial matrices over different variables".into(),
            ));
        }
        let entries: Vec<MultiPoly> = (0..self.rows * other.cols)
            .into_par_iter()
            .map(|idx| self.row_col_product(other, idx / other.cols, idx % other.cols))
            .collect();
        Ok(PolyMatrix {
            dim: self.dim,
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    fn row_col_product(&self, other: &PolyMatrix, i: usize, j: usize) -> MultiPoly {
        let mut acc = MultiPoly::zero(self.dim);
        for k in 0..self.cols {
            acc.add_product(self.get(i, k), other.get(k, j));
        }
        acc
    }

    /// tr(self · other) without forming the product.
    pub fn trace_of_product(&self, other: &PolyMatrix) -> Result<MultiPoly, Error> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::DimensionMismatch("trace of non-square product".into()));
        }
        let diag: Vec<MultiPoly> = (0..self.rows)
            .into_par_iter()
            .map(|i| self.row_col_product(other, i, i))
            .collect();
        Ok(diag.iter().fold(MultiPoly::zero(self.dim), |acc, p| acc.add(p)))
    }

    pub fn trace(&self) -> MultiPoly {
        (0..self.rows.min(self.cols)).fold(MultiPoly::zero(self.dim), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<Self, Error> {
        self.zip_with(other, MultiPoly::add)
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<Self, Error> {
        self.zip_with(other, MultiPoly::sub)
    }

    fn zip_with(&self, other: &PolyMatrix, f: impl Fn(&MultiPoly, &MultiPoly) -> MultiPoly) -> Result<Self, Error> {
        if (self.rows, self.cols, self.dim) != (other.rows, other.cols, other.dim) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(PolyMatrix {
            dim: self.dim,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|p| p.scale(c))
    }

    pub fn mul_poly(&self, q: &MultiPoly) -> Self {
        self.map(|p| p.mul(q))
    }

    pub fn neg(&self) -> Self {
        self.map(MultiPoly::neg)
    }

    fn map(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> Self {
        PolyMatrix {
            dim: self.dim,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Positive rational c such that `self / c` has coprime integer coefficients.
    pub fn content(&self) -> Rational {
        let coeffs: Vec<&Rational> = self.entries.iter().flat_map(|p| p.coefficients()).collect();
        content_of(coeffs.iter().copied())
    }

    /// `self` divided by its content: coprime integer coefficients, sign kept.
    pub fn primitive(&self) -> Self {
        self.scale(&self.content().recip())
    }

    pub fn eval_rational(&self, point: &[Rational]) -> RationalMatrix {
        let mut out = RationalMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).eval_rational(point));
            }
        }
        out
    }

    pub fn eval_f64(&self, point: &[f64]) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval_f64(point))
    }

    /// First entry (row-major) where `self` and `other` differ.
    pub fn first_difference(&self, other: &PolyMatrix) -> Option<(usize, usize)> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Some((0, 0));
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .position(|(a, b)| a != b)
            .map(|idx| (idx / self.cols, idx % self.cols))
    }

    pub(crate) fn to_wire(&self) -> PolyMatrixWire {
        PolyMatrixWire {
            d: self.dim,
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self.get(i, j).to_wire()).collect())
                .collect(),
        }
    }

    pub(crate) fn from_wire(w: &PolyMatrixWire) -> Result<Self, Error> {
        if w.entries.len() != w.rows || w.entries.iter().any(|r| r.len() != w.cols) {
            return Err(Error::Parse("polynomial matrix shape does not match rows/cols".into()));
        }
        let entries = w
            .entries
            .iter()
            .flatten()
            .map(|p| MultiPoly::from_wire(w.d, p))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_entries(w.d, w.rows, w.cols, entries)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        Self::from_wire(&serde_json::from_str(s)?)
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMatrix {}x{} over {} vars [", self.rows, self.cols, self.dim)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct PolyMatrixWire {
    pub d: usize,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<PolyWire>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row_xi() -> PolyMatrix {
        PolyMatrix::from_fn(2, 1, 2, |_, j| MultiPoly::var(2, j))
    }

    #[test]
    fn row_times_column_is_squared_norm() {
        let a = row_xi();
        let p = a.matmul(&a.adjoint()).unwrap();
        assert_eq!(p.get(0, 0).to_string(), "x1^2 + x2^2");
        assert_eq!(p.homogeneity(), Homogeneity::Of(2));
    }

    #[test]
    fn outer_product_entries() {
        let a = row_xi();
        let outer = a.adjoint().matmul(&a).unwrap();
        assert_eq!(outer.get(0, 0).to_string(), "x1^2");
        assert_eq!(outer.get(0, 1).to_string(), "x1*x2");
        assert_eq!(outer.get(1, 0).to_string(), "x1*x2");
        assert_eq!(outer.get(1, 1).to_string(), "x2^2");
    }

    #[test]
    fn identity_is_neutral_and_mismatch_is_rejected() {
        let a = row_xi();
        assert_eq!(a.matmul(&PolyMatrix::identity(2, 2)).unwrap(), a);
        assert!(matches!(a.matmul(&a), Err(Error::DimensionMismatch(_))));
        let sym = a.adjoint().matmul(&a).unwrap();
        assert_eq!(sym.adjoint(), sym);
    }

    #[test]
    fn trace_of_product_agrees_with_product() {
        let a = row_xi().adjoint().matmul(&row_xi()).unwrap();
        let b = PolyMatrix::from_fn(2, 2, 2, |i, j| MultiPoly::var(2, (i + j) % 2).add(&MultiPoly::one(2)));
        assert_eq!(a.trace_of_product(&b).unwrap(), a.matmul(&b).unwrap().trace());
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let a = row_xi()
            .adjoint()
            .matmul(&row_xi())
            .unwrap()
            .scale(&Rational::ratio(3, 2));
        let s = a.to_json();
        let back = PolyMatrix::from_json(&s).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.to_json(), s);
    }
}
