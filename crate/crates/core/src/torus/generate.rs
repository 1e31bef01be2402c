use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;

use super::fft::idft;
use super::field::{PeriodicField, SpectralField};
use super::grid::GridSpec;
use super::symbol::i_pow;
use crate::error::{Error, Result};
use crate::polycore::PolyMatrix;
use crate::synthesis::PotentialTriple;

/// A band-limited A-free field together with the potential it was drawn from.
#[derive(Debug, Clone)]
pub struct AFreeSample {
    /// Φ̂ with ℒΦ = U; not necessarily the minimal-norm potential.
    pub potential: SpectralField,
    pub field: PeriodicField,
}

/// Frequencies of the box [−band, band]^d in lexicographic order (first axis slowest).
pub(crate) fn band_frequencies(d: usize, band: usize) -> Vec<Vec<i64>> {
    let b = band as i64;
    let mut out = Vec::new();
    let mut xi = vec![-b; d];
    loop {
        out.push(xi.clone());
        let mut a = d;
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            if xi[a] < b {
                xi[a] += 1;
                break;
            }
            xi[a] = -b;
        }
    }
}

/// First nonzero coordinate is positive.
fn is_positive(xi: &[i64]) -> bool {
    xi.iter().find(|&&k| k != 0).is_some_and(|&k| k > 0)
}

fn check_band(grid: &GridSpec, band: usize) -> Result<()> {
    if 2 * band >= grid.min_dim() {
        return Err(Error::InvalidArgument(format!(
            "band {band} must be below half the smallest axis ({})",
            grid.min_dim()
        )));
    }
    Ok(())
}

/// Random band-limited potential Φ̂: complex Gaussians on ξ > 0 in the band box,
/// damped by |2πξ|^{−l}, mirrored by conjugation, Φ̂(0) = 0.
///
/// The draw order depends only on (d, band, N, seed), so the same potential is
/// produced on every grid that resolves the band.
pub fn gen_potential(grid: &GridSpec, n: usize, order: u32, band: usize, seed: u64) -> Result<SpectralField> {
    check_band(grid, band)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi = SpectralField::zeros(grid, n);
    for xi in band_frequencies(grid.d(), band) {
        if !is_positive(&xi) {
            continue;
        }
        let radius = 2.0 * PI * xi.iter().map(|&k| (k * k) as f64).sum::<f64>().sqrt();
        let damp = radius.powi(-(order as i32));
        let draws: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im) * damp
            })
            .collect();
        let slot = slot_of(grid, &xi);
        let mirror: Vec<i64> = xi.iter().map(|k| -k).collect();
        let mslot = slot_of(grid, &mirror);
        phi.at_mut(slot).copy_from_slice(&draws);
        for (m, z) in phi.at_mut(mslot).iter_mut().zip(&draws) {
            *m = z.conj();
        }
    }
    Ok(phi)
}

pub(crate) fn slot_of(grid: &GridSpec, xi: &[i64]) -> usize {
    let idx: Vec<usize> = xi.iter().enumerate().map(|(a, &k)| grid.slot(a, k)).collect();
    grid.ravel(&idx)
}

/// Û(ξ) = i^l M[2πξ] Φ̂(ξ) evaluated only on the band box.
fn apply_on_band(m: &PolyMatrix, order: u32, phi: &SpectralField, band: usize) -> SpectralField {
    let grid = phi.grid();
    let mut out = SpectralField::zeros(grid, m.rows());
    let factor = i_pow(order as i64);
    for xi in band_frequencies(grid.d(), band) {
        let slot = slot_of(grid, &xi);
        let p: Vec<f64> = xi.iter().map(|&k| 2.0 * PI * k as f64).collect();
        let mat = m.eval_f64(&p);
        let src = phi.at(slot);
        for (i, o) in out.at_mut(slot).iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, s) in src.iter().enumerate() {
                acc += s * mat[(i, j)];
            }
            *o = acc * factor;
        }
    }
    out
}

/// Draws U = ℒΦ for a random band-limited Φ, normalized to unit L² norm, with zero mean.
pub fn gen_afree_sample(t: &PotentialTriple, grid: &GridSpec, band: usize, seed: u64) -> Result<AFreeSample> {
    if grid.d() != t.d() {
        return Err(Error::DimensionMismatch(format!(
            "{}-d operator on a {}-d grid",
            t.d(),
            grid.d()
        )));
    }
    let mut phi = gen_potential(grid, t.l().domain_dim(), t.l_order(), band, seed)?;
    let mut u = apply_on_band(t.l_symbol(), t.l_order(), &phi, band);
    let norm = u.l2_norm();
    if norm > 0.0 {
        u = u.scale(1.0 / norm);
        phi = phi.scale(1.0 / norm);
    }
    Ok(AFreeSample {
        potential: phi,
        field: idft(&u),
    })
}

/// Band-limited A-free field with zero mean and unit L² norm (zero when band = 0).
pub fn gen_afree(t: &PotentialTriple, grid: &GridSpec, band: usize, seed: u64) -> Result<PeriodicField> {
    Ok(gen_afree_sample(t, grid, band, seed)?.field)
}
