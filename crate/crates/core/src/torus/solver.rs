use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::fft::{dft, idft};
use super::field::{PeriodicField, SpectralField};
use super::grid::GridSpec;
use super::symbol::{eval_poly_on_grid, i_pow, GridSymbol};
use crate::error::{Error, Result};
use crate::synthesis::PotentialTriple;

/// Relative floor below which the pseudo-inverse denominator counts as vanished.
pub const RANK_DROP_FLOOR: f64 = 1e-14;

/// Spectral solver for ℒΦ = U, 𝒢Φ = 0 on one grid.
///
/// Φ̂(ξ) = i^{−l} P_ℒ[2πξ] Û(ξ) / s_ℒ(2πξ), which is the minimal-norm solution at each
/// frequency. Φ̂ vanishes at ξ = 0 and on every frequency touching a Nyquist slot.
#[derive(Debug, Clone)]
pub struct PotentialSolver {
    grid: GridSpec,
    n: usize,
    a_order: u32,
    l_order: u32,
    a_symbol: GridSymbol,
    numerator: GridSymbol,
    denominator: Vec<f64>,
}

impl PotentialSolver {
    /// Tabulates the symbols on `grid` and rejects lattices where s_ℒ(2πξ) vanishes.
    pub fn new(t: &PotentialTriple, grid: &GridSpec) -> Result<Self> {
        if grid.d() != t.d() {
            return Err(Error::DimensionMismatch(format!(
                "{}-d operator on a {}-d grid",
                t.d(),
                grid.d()
            )));
        }
        let pinv = t.pinv_l();
        let denominator = eval_poly_on_grid(pinv.denominator(), grid)?;
        let deg = pinv.denominator().homogeneous_degree().unwrap_or(0) as i32;
        for (slot, &s) in denominator.iter().enumerate() {
            if slot == 0 || grid.touches_nyquist(slot) {
                continue;
            }
            let xi = grid.frequency_of(slot);
            let radius = 2.0 * PI * xi.iter().map(|&k| (k * k) as f64).sum::<f64>().sqrt();
            if s.abs() < RANK_DROP_FLOOR * radius.powi(deg) {
                return Err(Error::RankDrop { frequency: xi });
            }
        }
        Ok(PotentialSolver {
            grid: grid.clone(),
            n: t.n(),
            a_order: t.k(),
            l_order: t.l_order(),
            a_symbol: GridSymbol::new(t.a_symbol(), grid)?,
            numerator: GridSymbol::new(pinv.numerator(), grid)?,
            denominator,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn check_field(&self, u: &PeriodicField) -> Result<()> {
        if u.grid() != &self.grid {
            return Err(Error::DimensionMismatch(format!(
                "field on {:?}, solver on {:?}",
                u.grid().dims(),
                self.grid.dims()
            )));
        }
        if u.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "field has {} components, operator expects {}",
                u.n(),
                self.n
            )));
        }
        Ok(())
    }

    /// max|𝒜U| / max|U| (0 for U = 0).
    pub fn a_residual(&self, u: &PeriodicField) -> Result<f64> {
        self.check_field(u)?;
        let scale = u.max_abs();
        if scale == 0.0 {
            return Ok(0.0);
        }
        let au = self.a_symbol.apply(&dft(u), i_pow(self.a_order as i64))?;
        Ok(idft(&au).max_abs() / scale)
    }

    /// Per-frequency pseudo-inverse without precondition checks.
    pub fn solve_spectral(&self, u: &SpectralField) -> Result<SpectralField> {
        let mut phi = self.numerator.apply(u, i_pow(-(self.l_order as i64)))?;
        for (slot, block) in phi.coeffs_mut().chunks_exact_mut(self.n).enumerate() {
            let s = self.denominator[slot];
            if slot == 0 || self.grid.touches_nyquist(slot) {
                block.fill(Complex64::new(0.0, 0.0));
            } else {
                block.iter_mut().for_each(|z| *z /= s);
            }
        }
        Ok(phi)
    }

    /// Solves ℒΦ = U, 𝒢Φ = 0 after checking that U has zero mean and is A-free within `tol`.
    pub fn solve(&self, u: &PeriodicField, tol: f64) -> Result<PeriodicField> {
        self.check_field(u)?;
        let scale = u.max_abs();
        if scale == 0.0 {
            return Ok(PeriodicField::zeros(&self.grid, self.n));
        }
        let mean = u.mean().iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale;
        if mean > tol {
            return Err(Error::NonzeroMean { mean, tol });
        }
        let spectral = dft(u);
        let au = self.a_symbol.apply(&spectral, i_pow(self.a_order as i64))?;
        let residual = idft(&au).max_abs() / scale;
        if residual > tol {
            return Err(Error::NotAFree { residual, tol });
        }
        Ok(idft(&self.solve_spectral(&spectral)?))
    }
}

/// One-shot solve of ℒΦ = U, 𝒢Φ = 0.
pub fn solve_potential(t: &PotentialTriple, u: &PeriodicField, tol: f64) -> Result<PeriodicField> {
    PotentialSolver::new(t, u.grid())?.solve(u, tol)
}
