use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::encoding::Encoding;
use crate::error::{Error, Result};
use crate::torus::PeriodicField;

/// Eigenvalues above −PSD_TOL·max(1, max|λ|) count as nonnegative.
pub const PSD_TOL: f64 = 1e-12;

/// Integrands F: ℝ^N → ℝ used by the Jensen, semicontinuity and quasiconvexity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionalDescriptor {
    /// det(A)^{1/(d_m−1)} on PSD matrices, 0 on singular ones.
    DetPower { dm: usize },
    /// −det(A)^{1/(d_m−1)}.
    NegDetPower { dm: usize },
    /// |v|^p with the Frobenius norm on matrix encodings.
    PNorm { p: f64 },
    /// −|v|², concave.
    NegSquare,
}

impl FunctionalDescriptor {
    /// r in the growth bound |F(v)| ≤ C(1 + |v|^r).
    pub fn growth_exponent(&self) -> f64 {
        match *self {
            FunctionalDescriptor::DetPower { dm } | FunctionalDescriptor::NegDetPower { dm } => {
                dm as f64 / (dm as f64 - 1.0)
            }
            FunctionalDescriptor::PNorm { p } => p,
            FunctionalDescriptor::NegSquare => 2.0,
        }
    }

    /// C in the growth bound; for det^{1/(d_m−1)} it follows from det A ≤ (|A|/√d_m)^{d_m}.
    pub fn bound_constant(&self) -> f64 {
        match *self {
            FunctionalDescriptor::DetPower { dm } | FunctionalDescriptor::NegDetPower { dm } => {
                let dm = dm as f64;
                dm.powf(-dm / (2.0 * (dm - 1.0)))
            }
            _ => 1.0,
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            FunctionalDescriptor::DetPower { dm } | FunctionalDescriptor::NegDetPower { dm } if dm < 2 => Err(
                Error::InvalidArgument(format!("det power needs matrix dimension >= 2, got {dm}")),
            ),
            FunctionalDescriptor::PNorm { p } if !(p >= 1.0 && p.is_finite()) => Err(Error::InvalidArgument(format!(
                "exponent p = {p} must satisfy 1 <= p < inf"
            ))),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, v: &[f64], enc: Encoding) -> Result<f64> {
        self.check()?;
        enc.check(v)?;
        match *self {
            FunctionalDescriptor::DetPower { dm } => det_power(v, enc, dm),
            FunctionalDescriptor::NegDetPower { dm } => Ok(-det_power(v, enc, dm)?),
            FunctionalDescriptor::PNorm { p } => Ok(enc.norm(v).powf(p)),
            FunctionalDescriptor::NegSquare => Ok(-enc.norm(v).powi(2)),
        }
    }

    /// Grid average of F(f(x)), summed in point order.
    pub fn integral(&self, f: &PeriodicField, enc: Encoding) -> Result<f64> {
        let mut acc = 0.0;
        for v in f.points() {
            acc += self.eval(v, enc)?;
        }
        Ok(acc / f.grid().len() as f64)
    }
}

fn det_power(v: &[f64], enc: Encoding, dm: usize) -> Result<f64> {
    if enc.matrix_dim() != Some(dm) {
        return Err(Error::DimensionMismatch(format!(
            "det power for {dm}x{dm} matrices on {enc:?}"
        )));
    }
    let m = enc.decode(v)?;
    let scale = m.abs().max().max(1.0);
    let asym = enc.asymmetry(v)?;
    if asym > PSD_TOL * scale {
        return Err(Error::NotPsd(format!("antisymmetric part of norm {asym:e}")));
    }
    let eig = ((&m + m.transpose()) * 0.5).symmetric_eigenvalues();
    let min = eig.min();
    if min < -PSD_TOL * scale {
        return Err(Error::NotPsd(format!("eigenvalue {min:e}")));
    }
    let det: f64 = if dm == 2 {
        (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).max(0.0)
    } else {
        eig.iter().map(|l| l.max(0.0)).product()
    };
    Ok(if dm == 2 {
        det
    } else {
        det.powf(1.0 / (dm as f64 - 1.0))
    })
}

impl fmt::Display for FunctionalDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FunctionalDescriptor::DetPower { dm } => write!(f, "detpow{dm}"),
            FunctionalDescriptor::NegDetPower { dm } => write!(f, "negdetpow{dm}"),
            FunctionalDescriptor::PNorm { p } => write!(f, "pnorm{p}"),
            FunctionalDescriptor::NegSquare => write!(f, "negsq"),
        }
    }
}

/// Parses `detpow<dm>`, `negdetpow<dm>`, `pnorm<p>` or `negsq`; a missing number means
/// d_m = 2 or p = 2.
impl FromStr for FunctionalDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown functional {s:?}"));
        let num = |rest: &str| -> Result<Option<f64>> {
            if rest.is_empty() {
                Ok(None)
            } else {
                rest.parse::<f64>().map(Some).map_err(|_| bad())
            }
        };
        let dim = |rest: &str| -> Result<usize> {
            match num(rest)? {
                None => Ok(2),
                Some(x) if x.fract() == 0.0 && x >= 2.0 => Ok(x as usize),
                Some(_) => Err(bad()),
            }
        };
        let f = if let Some(rest) = s.strip_prefix("negdetpow") {
            FunctionalDescriptor::NegDetPower { dm: dim(rest)? }
        } else if let Some(rest) = s.strip_prefix("detpow") {
            FunctionalDescriptor::DetPower { dm: dim(rest)? }
        } else if let Some(rest) = s.strip_prefix("pnorm") {
            FunctionalDescriptor::PNorm {
                p: num(rest)?.unwrap_or(2.0),
            }
        } else if s == "negsq" {
            FunctionalDescriptor::NegSquare
        } else {
            return Err(bad());
        };
        f.check()?;
        Ok(f)
    }
}

/// Finite probability measure Σ w_i δ_{v_i}.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    samples: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(samples: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if samples.is_empty() || samples.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} samples with {} weights",
                samples.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        Ok(EmpiricalMeasure { samples, weights })
    }

    /// Uniform weights on the grid values of `f`.
    pub fn from_field(f: &PeriodicField) -> Self {
        let m = f.grid().len();
        EmpiricalMeasure {
            samples: f.points().map(<[f64]>::to_vec).collect(),
            weights: vec![1.0 / m as f64; m],
        }
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Σ w_i g(v_i).
    pub fn moment(&self, g: impl Fn(&[f64]) -> f64) -> f64 {
        self.samples.iter().zip(&self.weights).map(|(v, w)| w * g(v)).sum()
    }
}

/// Grid average of g∘f, the empirical stand-in for ⟨ν_x, g⟩ averaged over x.
pub fn young_moment(f: &PeriodicField, g: impl Fn(&[f64]) -> f64) -> f64 {
    f.points().map(g).sum::<f64>() / f.grid().len() as f64
}
