use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::dpt::DptGenerator;
use super::encoding::Encoding;
use super::functional::FunctionalDescriptor;
use crate::error::{Error, Result};
use crate::polycore::OperatorDescriptor;
use crate::torus::{apply_operator, trial_seed, GridSpec, PeriodicField};

/// Absolute slack for Jensen comparisons of fields scaled to unit L^∞ norm.
pub const JENSEN_TOL: f64 = 1e-8;
/// Relative slack for the semicontinuity orderings, scaled by max(1, |F(mean)|).
pub const QUADRATURE_TOL: f64 = 1e-10;
/// Largest relative A-residual accepted as A-free by the experiments.
pub const AFREE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JensenReport {
    /// Grid average of F(U/s).
    pub lhs: f64,
    /// F(mean U / s).
    pub rhs: f64,
    /// s = max|U|.
    pub scale: f64,
    pub satisfied: bool,
}

/// Compares the grid average of F(U) with F of the average for a PSD symmetric field,
/// after scaling U to unit L^∞ norm.
pub fn jensen_check(f: FunctionalDescriptor, u: &PeriodicField) -> Result<JensenReport> {
    let FunctionalDescriptor::DetPower { dm } = f else {
        return Err(Error::InvalidArgument(format!(
            "Jensen check is for det powers, got {f}"
        )));
    };
    let enc = Encoding::matrix(dm, u.n())?;
    let scale = u.max_abs();
    if scale == 0.0 {
        return Ok(JensenReport {
            lhs: 0.0,
            rhs: 0.0,
            scale,
            satisfied: true,
        });
    }
    let unit = u.scale(1.0 / scale);
    let lhs = f.integral(&unit, enc)?;
    let rhs = f.eval(&unit.mean(), enc)?;
    Ok(JensenReport {
        lhs,
        rhs,
        scale,
        satisfied: lhs <= rhs + JENSEN_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JensenTrial {
    pub trial: usize,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JensenBatch {
    pub dm: usize,
    pub trials: Vec<JensenTrial>,
    pub violations: usize,
}

/// Runs [`jensen_check`] with F = det^{1/(d_m−1)} on `trials` seeded DPTs; trial i uses
/// seed `trial_seed(seed, i)`.
pub fn jensen_batch(
    gen: &DptGenerator,
    grid: &GridSpec,
    band: usize,
    shift: f64,
    trials: usize,
    seed: u64,
) -> Result<JensenBatch> {
    let f = FunctionalDescriptor::DetPower { dm: gen.dm() };
    let trials = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<JensenTrial> {
            let seed = trial_seed(seed, trial);
            let u = gen.generate(grid, band, shift, seed)?;
            let r = jensen_check(f, &u)?;
            Ok(JensenTrial {
                trial,
                seed,
                lhs: r.lhs,
                rhs: r.rhs,
                satisfied: r.satisfied,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = trials.iter().filter(|t| !t.satisfied).count();
    Ok(JensenBatch {
        dm: gen.dm(),
        trials,
        violations,
    })
}

/// Expected ordering between ∫F(U_n) and F(∫U).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// ∫F(U_n) ≥ F(weak limit), as for convex F.
    Lsc,
    /// ∫F(U_n) ≤ F(weak limit), as for det^{1/(d_m−1)} on DPTs.
    Usc,
}

impl Direction {
    /// The direction a functional is expected to satisfy.
    pub fn expected_for(f: FunctionalDescriptor) -> Self {
        match f {
            FunctionalDescriptor::DetPower { .. } | FunctionalDescriptor::NegSquare => Direction::Usc,
            FunctionalDescriptor::PNorm { .. } | FunctionalDescriptor::NegDetPower { .. } => Direction::Lsc,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Lsc => "lsc",
            Direction::Usc => "usc",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lsc" => Ok(Direction::Lsc),
            "usc" => Ok(Direction::Usc),
            _ => Err(Error::Parse(format!("mode must be lsc or usc, got {s:?}"))),
        }
    }
}

/// U_n(x) = U(nx) on the same grid: node i takes the value at node n·i mod dims.
///
/// This equals mean + (U(nx) − mean) and keeps the grid average of every g∘U whenever
/// g∘U is resolved on the coarser sublattice.
pub fn oscillate(u: &PeriodicField, n: usize) -> Result<PeriodicField> {
    let grid = u.grid();
    if n == 0 || grid.dims().iter().any(|&m| m % n != 0) {
        return Err(Error::InvalidArgument(format!(
            "dilation factor {n} does not divide the grid {:?}",
            grid.dims()
        )));
    }
    let k = u.n();
    let mut idx = vec![0usize; grid.d()];
    let mut out = Vec::with_capacity(u.values().len());
    for p in 0..grid.len() {
        grid.unravel(p, &mut idx);
        for (i, &m) in idx.iter_mut().zip(grid.dims()) {
            *i = (*i * n) % m;
        }
        out.extend_from_slice(u.at(grid.ravel(&idx)));
    }
    PeriodicField::from_values(grid, k, out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemicontinuityRow {
    pub n: usize,
    /// Grid average of F(U_n).
    pub integral: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemicontinuityReport {
    pub functional: String,
    pub mode: Direction,
    /// Growth exponent r of F.
    pub growth_exponent: f64,
    /// F of the weak limit, the constant mean field.
    pub weak_limit: f64,
    pub rows: Vec<SemicontinuityRow>,
    /// max − min of the integrals over n.
    pub spread: f64,
    pub tol: f64,
    pub satisfied: bool,
}

/// Evaluates ∫F(U_n) along U_n = U(n·) for each n and compares it with F(mean U) in the
/// direction `mode`.
pub fn semicontinuity_experiment(
    f: FunctionalDescriptor,
    a: &OperatorDescriptor,
    u_base: &PeriodicField,
    enc: Encoding,
    mode: Direction,
    n_list: &[usize],
) -> Result<SemicontinuityReport> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("n list is empty".into()));
    }
    let scale = u_base.max_abs();
    if scale > 0.0 {
        let residual = apply_operator(a, u_base)?.max_abs() / scale;
        if residual > AFREE_TOL {
            return Err(Error::NotAFree {
                residual,
                tol: AFREE_TOL,
            });
        }
    }
    let weak_limit = f.eval(&u_base.mean(), enc)?;
    let tol = QUADRATURE_TOL * weak_limit.abs().max(1.0);
    let rows = n_list
        .iter()
        .map(|&n| -> Result<SemicontinuityRow> {
            let integral = f.integral(&oscillate(u_base, n)?, enc)?;
            let satisfied = match mode {
                Direction::Lsc => integral >= weak_limit - tol,
                Direction::Usc => integral <= weak_limit + tol,
            };
            Ok(SemicontinuityRow { n, integral, satisfied })
        })
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r.integral), hi.max(r.integral))
    });
    Ok(SemicontinuityReport {
        functional: f.to_string(),
        mode,
        growth_exponent: f.growth_exponent(),
        weak_limit,
        satisfied: rows.iter().all(|r| r.satisfied),
        rows,
        spread: hi - lo,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn constant_dpt_is_the_equality_case() {
        let g = GridSpec::cubic(2, 8).unwrap();
        let u = PeriodicField::constant(&g, &[2.0, 0.5, 1.0]);
        let r = jensen_check(FunctionalDescriptor::DetPower { dm: 2 }, &u).unwrap();
        assert_eq!(r.lhs, r.rhs);
        assert!(r.satisfied);
        assert!(jensen_check(FunctionalDescriptor::PNorm { p: 2.0 }, &u).is_err());
    }

    #[test]
    fn rejects_indefinite_fields() {
        let g = GridSpec::cubic(2, 8).unwrap();
        let u = PeriodicField::constant(&g, &[1.0, 2.0, 1.0]);
        assert!(matches!(
            jensen_check(FunctionalDescriptor::DetPower { dm: 2 }, &u),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn oscillation_is_a_dilation() {
        let g = GridSpec::new(&[8, 4]).unwrap();
        let u = PeriodicField::from_fn(&g, 1, |x, out| {
            out[0] = (2.0 * std::f64::consts::PI * (x[0] + 2.0 * x[1])).sin()
        });
        let u2 = oscillate(&u, 2).unwrap();
        let expected = PeriodicField::from_fn(&g, 1, |x, out| {
            out[0] = (4.0 * std::f64::consts::PI * (x[0] + 2.0 * x[1])).sin()
        });
        assert!(u2.sub(&expected).unwrap().max_abs() < 1e-12);
        assert_eq!(oscillate(&u, 1).unwrap(), u);
        assert!(oscillate(&u, 3).is_err());
    }

    #[test]
    fn constant_base_gives_equal_values() {
        let g = GridSpec::cubic(2, 8).unwrap();
        let u = PeriodicField::constant(&g, &[1.0, 0.0, 2.0]);
        let a = fixtures::symmetric_divergence(2);
        let f = FunctionalDescriptor::DetPower { dm: 2 };
        let r = semicontinuity_experiment(f, &a, &u, Encoding::Symmetric(2), Direction::Usc, &[1, 2, 4]).unwrap();
        assert!(r.rows.iter().all(|row| row.integral == r.weak_limit));
        assert_eq!(r.spread, 0.0);
        assert!(r.satisfied);
    }

    #[test]
    fn requires_an_afree_base() {
        let g = GridSpec::cubic(2, 8).unwrap();
        let u = PeriodicField::from_fn(&g, 2, |x, out| {
            out.copy_from_slice(&[(2.0 * std::f64::consts::PI * x[0]).sin(), 0.0])
        });
        let r = semicontinuity_experiment(
            FunctionalDescriptor::PNorm { p: 2.0 },
            &fixtures::divergence(2),
            &u,
            Encoding::Vector,
            Direction::Lsc,
            &[1],
        );
        assert!(matches!(r, Err(Error::NotAFree { .. })));
    }
}
