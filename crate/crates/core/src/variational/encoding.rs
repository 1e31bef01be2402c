use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fixtures::sym_index;

/// How a fiber vector in ℝ^N is read as a matrix.
///
/// `Symmetric` stores S_ij (i ≤ j) unscaled in the order of [`sym_index`], which keeps
/// operator coefficients rational. Norms and inner products are still the Frobenius
/// ones, i.e. the Euclidean geometry of the √2-scaled encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Vector,
    Symmetric(usize),
    Full(usize),
}

impl Encoding {
    /// Matrix encoding for d_m × d_m values in `n` components.
    pub fn matrix(dm: usize, n: usize) -> Result<Self> {
        if dm == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        if n == dm * (dm + 1) / 2 && dm > 1 {
            Ok(Encoding::Symmetric(dm))
        } else if n == dm * dm {
            Ok(Encoding::Full(dm))
        } else {
            Err(Error::DimensionMismatch(format!(
                "{n} components encode neither a symmetric nor a full {dm}x{dm} matrix"
            )))
        }
    }

    pub fn len(&self, vector_len: usize) -> usize {
        match *self {
            Encoding::Vector => vector_len,
            Encoding::Symmetric(dm) => dm * (dm + 1) / 2,
            Encoding::Full(dm) => dm * dm,
        }
    }

    pub fn matrix_dim(&self) -> Option<usize> {
        match *self {
            Encoding::Vector => None,
            Encoding::Symmetric(dm) | Encoding::Full(dm) => Some(dm),
        }
    }

    pub(crate) fn check(&self, v: &[f64]) -> Result<()> {
        if self.len(v.len()) != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} components do not match encoding {self:?}",
                v.len()
            )));
        }
        Ok(())
    }

    pub fn decode(&self, v: &[f64]) -> Result<DMatrix<f64>> {
        self.check(v)?;
        match *self {
            Encoding::Vector => Err(Error::InvalidArgument("vector encoding has no matrix form".into())),
            Encoding::Symmetric(dm) => Ok(DMatrix::from_fn(dm, dm, |i, j| v[sym_index(dm, i, j)])),
            Encoding::Full(dm) => Ok(DMatrix::from_fn(dm, dm, |i, j| v[i * dm + j])),
        }
    }

    pub fn encode(&self, m: &DMatrix<f64>) -> Result<Vec<f64>> {
        let dm = self
            .matrix_dim()
            .ok_or_else(|| Error::InvalidArgument("vector encoding has no matrix form".into()))?;
        if m.nrows() != dm || m.ncols() != dm {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for dimension {dm}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(match *self {
            Encoding::Symmetric(_) => {
                let mut out = vec![0.0; dm * (dm + 1) / 2];
                for i in 0..dm {
                    for j in i..dm {
                        out[sym_index(dm, i, j)] = 0.5 * (m[(i, j)] + m[(j, i)]);
                    }
                }
                out
            }
            _ => (0..dm * dm).map(|k| m[(k / dm, k % dm)]).collect(),
        })
    }

    /// The identity matrix, or the all-ones vector for `Vector` of length `n`.
    pub fn identity(&self, n: usize) -> Vec<f64> {
        match *self {
            Encoding::Vector => vec![1.0; n],
            _ => {
                let dm = self.matrix_dim().expect("matrix encoding");
                self.encode(&DMatrix::identity(dm, dm)).expect("square")
            }
        }
    }

    /// Euclidean norm for vectors and full matrices, Frobenius norm for symmetric ones.
    pub fn norm(&self, v: &[f64]) -> f64 {
        match *self {
            Encoding::Symmetric(dm) => {
                let mut s = 0.0;
                for i in 0..dm {
                    for j in i..dm {
                        let x = v[sym_index(dm, i, j)];
                        s += if i == j { x * x } else { 2.0 * x * x };
                    }
                }
                s.sqrt()
            }
            _ => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    /// Smallest eigenvalue of the symmetric part.
    pub fn min_eigenvalue(&self, v: &[f64]) -> Result<f64> {
        let m = self.decode(v)?;
        let sym = (&m + m.transpose()) * 0.5;
        Ok(sym.symmetric_eigenvalues().min())
    }

    /// Frobenius norm of the antisymmetric part (zero for the symmetric encoding).
    pub fn asymmetry(&self, v: &[f64]) -> Result<f64> {
        match *self {
            Encoding::Full(_) => {
                let m = self.decode(v)?;
                Ok(((&m - m.transpose()) * 0.5).norm())
            }
            _ => Ok(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_encoding_from_component_count() {
        assert_eq!(Encoding::matrix(2, 3).unwrap(), Encoding::Symmetric(2));
        assert_eq!(Encoding::matrix(3, 6).unwrap(), Encoding::Symmetric(3));
        assert_eq!(Encoding::matrix(2, 4).unwrap(), Encoding::Full(2));
        assert!(Encoding::matrix(3, 5).is_err());
    }

    #[test]
    fn symmetric_norm_is_frobenius() {
        let e = Encoding::Symmetric(2);
        let v = [1.0, 2.0, 3.0];
        let m = e.decode(&v).unwrap();
        assert!((e.norm(&v) - m.norm()).abs() < 1e-15);
        assert_eq!(e.encode(&m).unwrap(), v.to_vec());
    }

    #[test]
    fn eigenvalues_and_asymmetry() {
        let e = Encoding::Full(2);
        let v = [2.0, 1.0, -1.0, 2.0];
        assert!((e.min_eigenvalue(&v).unwrap() - 2.0).abs() < 1e-15);
        assert!((e.asymmetry(&v).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Encoding::Symmetric(3).identity(6), vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
    }
}
