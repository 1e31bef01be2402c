use serde::{Deserialize, Serialize};

use super::pmatrix::PolyMatrix;
use super::poly::{MultiPoly, PolyWire};
use super::rank::LatticeSampler;
use super::rational::Rational;
use super::rmatrix::RationalMatrix;
use crate::error::Error;

/// Coefficients of p(λ) = det(λ·Id − B) = Σ_j a_j λ^{n−j}, a_0 = 1, together
/// with the rank index r = max{ j : a_j ≢ 0 }.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPolyData {
    coefficients: Vec<MultiPoly>,
    rank_index: usize,
}

impl CharPolyData {
    pub fn coefficients(&self) -> &[MultiPoly] {
        &self.coefficients
    }

    pub fn a(&self, j: usize) -> &MultiPoly {
        &self.coefficients[j]
    }

    /// r: index of the last coefficient that is not the zero polynomial.
    pub fn rank_index(&self) -> usize {
        self.rank_index
    }

    /// a_r.
    pub fn last_nonzero(&self) -> &MultiPoly {
        &self.coefficients[self.rank_index]
    }

    pub fn size(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub(crate) fn to_wire(&self) -> CharPolyWire {
        CharPolyWire {
            coefficients: self.coefficients.iter().map(MultiPoly::to_wire).collect(),
            r: self.rank_index,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct CharPolyWire {
    pub coefficients: Vec<PolyWire>,
    pub r: usize,
}

/// Faddeev–LeVerrier recurrence. Returns the characteristic coefficients and the
/// auxiliary matrices M_1..M_n with M_k = Σ_{j<k} a_j B^{k−1−j}.
fn faddeev_leverrier(b: &PolyMatrix) -> Result<(Vec<MultiPoly>, Vec<PolyMatrix>), Error> {
    if !b.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "characteristic polynomial of a {}x{} matrix",
            b.rows(),
            b.cols()
        )));
    }
    let n = b.rows();
    let d = b.dim();
    let mut coeffs = vec![MultiPoly::one(d)];
    let mut aux: Vec<PolyMatrix> = Vec::with_capacity(n);
    if n == 0 {
        return Ok((coeffs, aux));
    }
    let mut m_k = PolyMatrix::identity(d, n);
    for k in 1..=n {
        let inv_k = Rational::ratio(-1, k as i64);
        if k == n {
            // Only the trace is needed for the last coefficient.
            coeffs.push(b.trace_of_product(&m_k)?.scale(&inv_k));
            aux.push(m_k);
            break;
        }
        let prod = b.matmul(&m_k)?;
        let a_k = prod.trace().scale(&inv_k);
        let mut next = prod;
        for i in 0..n {
            next.set(i, i, next.get(i, i).add(&a_k));
        }
        coeffs.push(a_k);
        aux.push(std::mem::replace(&mut m_k, next));
    }
    Ok((coeffs, aux))
}

fn rank_index_of(coeffs: &[MultiPoly]) -> usize {
    coeffs.iter().rposition(|a| !a.is_zero()).unwrap_or(0)
}

/// Characteristic polynomial det(λ·Id − B) of a square polynomial matrix.
pub fn char_poly(b: &PolyMatrix) -> Result<CharPolyData, Error> {
    let (coefficients, _) = faddeev_leverrier(b)?;
    let rank_index = rank_index_of(&coefficients);
    Ok(CharPolyData {
        coefficients,
        rank_index,
    })
}

/// Moore–Penrose pseudo-inverse of a polynomial matrix as a polynomial
/// numerator over a scalar polynomial denominator: M† = P / s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledPseudoInverse {
    numerator: PolyMatrix,
    denominator: MultiPoly,
}

impl ScaledPseudoInverse {
    pub fn numerator(&self) -> &PolyMatrix {
        &self.numerator
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.denominator
    }

    /// Exact value of P(ξ)/s(ξ); `None` where s(ξ) = 0.
    pub fn eval_rational(&self, point: &[Rational]) -> Option<RationalMatrix> {
        let s = self.denominator.eval_rational(point);
        if s.is_zero() {
            return None;
        }
        Some(self.numerator.eval_rational(point).scale(&s.recip()))
    }
}

/// Result of a Decell pseudo-inverse synthesis: the pseudo-inverse and the
/// characteristic data of M·M* it was built from.
#[derive(Debug, Clone)]
pub struct DecellOutput {
    pub pinv: ScaledPseudoInverse,
    pub char_data: CharPolyData,
}

/// Decell's formula M† = −a_r^{-1} M* [a_0 (MM*)^{r−1} + … + a_{r−1} Id].
///
/// The returned denominator is s = (−1)^r a_r, which is the r-th elementary
/// symmetric function of the eigenvalues of MM* and hence positive wherever the
/// rank is r. The global sign is then confirmed against the Penrose identities
/// at a rational sample point.
pub fn decell_pinv(m: &PolyMatrix) -> ScaledPseudoInverse {
    decell_with_char_data(m).pinv
}

pub fn decell_with_char_data(m: &PolyMatrix) -> DecellOutput {
    let d = m.dim();
    let adj = m.adjoint();
    let b = m.matmul(&adj).expect("M·M* is always defined");
    let (coefficients, aux) = faddeev_leverrier(&b).expect("M·M* is square");
    let r = rank_index_of(&coefficients);
    let char_data = CharPolyData {
        coefficients,
        rank_index: r,
    };
    if r == 0 {
        return DecellOutput {
            pinv: ScaledPseudoInverse {
                numerator: PolyMatrix::zeros(d, m.cols(), m.rows()),
                denominator: MultiPoly::one(d),
            },
            char_data,
        };
    }
    // M_r = a_0 B^{r-1} + ... + a_{r-1} Id.
    let q = &aux[r - 1];
    let sign = if r.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    };
    let denominator = char_data.a(r).scale(&sign);
    // M† = -P'/a_r with P' = M* M_r; with s = (-1)^r a_r this is (-1)^{r+1} P'/s.
    let mut numerator = adj.matmul(q).expect("shapes agree").scale(&-sign);
    if !sign_is_consistent(m, &numerator, &denominator) {
        numerator = numerator.neg();
        assert!(
            sign_is_consistent(m, &numerator, &denominator),
            "Decell pseudo-inverse fails the Penrose identities for either sign"
        );
    }
    DecellOutput {
        pinv: ScaledPseudoInverse { numerator, denominator },
        char_data,
    }
}

fn sign_is_consistent(m: &PolyMatrix, numerator: &PolyMatrix, denominator: &MultiPoly) -> bool {
    let mut sampler = LatticeSampler::new(m.dim(), 0x5eed_dece);
    for _ in 0..64 {
        let xi = sampler.next_point();
        let s = denominator.eval_rational(&xi);
        if s.is_zero() {
            continue;
        }
        let x = numerator.eval_rational(&xi).scale(&s.recip());
        return penrose_identities(&m.eval_rational(&xi), &x).all();
    }
    // The denominator vanishes on every sample; nothing to discriminate.
    true
}

/// Outcome of the four Penrose identities for a candidate pseudo-inverse X of M.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PenroseCheck {
    pub mxm_is_m: bool,
    pub xmx_is_x: bool,
    pub xm_symmetric: bool,
    pub mx_symmetric: bool,
}

impl PenroseCheck {
    pub fn all(&self) -> bool {
        self.mxm_is_m && self.xmx_is_x && self.xm_symmetric && self.mx_symmetric
    }
}

/// Exact check of M X M = M, X M X = X, (XM)* = XM, (MX)* = MX.
pub fn penrose_identities(m: &RationalMatrix, x: &RationalMatrix) -> PenroseCheck {
    let shapes_ok = x.rows() == m.cols() && x.cols() == m.rows();
    if !shapes_ok {
        return PenroseCheck {
            mxm_is_m: false,
            xmx_is_x: false,
            xm_symmetric: false,
            mx_symmetric: false,
        };
    }
    let mx = m.matmul(x).expect("shapes checked");
    let xm = x.matmul(m).expect("shapes checked");
    PenroseCheck {
        mxm_is_m: mx.matmul(m).expect("shapes checked") == *m,
        xmx_is_x: xm.matmul(x).expect("shapes checked") == *x,
        xm_symmetric: xm.transpose() == xm,
        mx_symmetric: mx.transpose() == mx,
    }
}

/// Entrywise exact evaluation of a polynomial matrix at a rational point.
pub fn eval_symbol(m: &PolyMatrix, xi: &[Rational]) -> RationalMatrix {
    m.eval_rational(xi)
}

/// Entrywise floating-point evaluation.
pub fn eval_symbol_f64(m: &PolyMatrix, xi: &[f64]) -> nalgebra::DMatrix<f64> {
    m.eval_f64(xi)
}
