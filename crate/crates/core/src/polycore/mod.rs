//! Exact arithmetic over ℚ for multivariate polynomials and polynomial
//! matrices: Fourier symbols, characteristic polynomials by Faddeev–LeVerrier,
//! Decell pseudo-inverses and sampled rank profiles.

mod charpoly;
mod operator;
mod pmatrix;
mod poly;
mod rank;
mod rational;
mod rmatrix;

pub use charpoly::{
    char_poly, decell_pinv, decell_with_char_data, eval_symbol, eval_symbol_f64, penrose_identities, CharPolyData,
    DecellOutput, PenroseCheck, ScaledPseudoInverse,
};
pub use operator::{symbol_of, OperatorDescriptor};
pub use pmatrix::{Homogeneity, PolyMatrix};
pub use poly::{Monomial, MultiPoly};
pub use rank::{rank_profile, LatticeSampler, RankProfile, SAMPLE_RADIUS};
pub use rational::Rational;
pub use rmatrix::RationalMatrix;

pub(crate) use charpoly::CharPolyWire;
pub(crate) use operator::OperatorWire;
pub(crate) use pmatrix::PolyMatrixWire;

/// Adjoint (transpose) of a polynomial matrix.
pub fn adjoint(m: &PolyMatrix) -> PolyMatrix {
    m.adjoint()
}

/// Exact product of polynomial matrices.
pub fn matmul(a: &PolyMatrix, b: &PolyMatrix) -> Result<PolyMatrix, crate::Error> {
    a.matmul(b)
}
