use super::encoding::Encoding;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::synthesis::{PotentialTriple, SynthesisOptions};
use crate::torus::{gen_afree, GridSpec, PeriodicField};

/// Generator of divergence-free positive symmetric tensor fields (DPTs) in the
/// unscaled symmetric encoding.
///
/// Holds the synthesized triple for the row-wise divergence so batches do not
/// repeat the symbolic work.
#[derive(Debug, Clone)]
pub struct DptGenerator {
    dm: usize,
    triple: PotentialTriple,
}

impl DptGenerator {
    pub fn new(dm: usize) -> Result<Self> {
        if !(2..=3).contains(&dm) {
            return Err(Error::InvalidArgument(format!(
                "DPT generation supports d_m in {{2, 3}}, got {dm}"
            )));
        }
        let triple = PotentialTriple::synthesize(&fixtures::symmetric_divergence(dm), &SynthesisOptions::default())?;
        Ok(DptGenerator { dm, triple })
    }

    pub fn dm(&self) -> usize {
        self.dm
    }

    pub fn encoding(&self) -> Encoding {
        Encoding::Symmetric(self.dm)
    }

    pub fn triple(&self) -> &PotentialTriple {
        &self.triple
    }

    /// c·Id plus a divergence-free oscillation rescaled so its largest |eigenvalue| is c/2.
    /// Every value then has spectrum in [c/2, 3c/2].
    pub fn generate(&self, grid: &GridSpec, band: usize, c: f64, seed: u64) -> Result<PeriodicField> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("shift c = {c} must be positive")));
        }
        let enc = self.encoding();
        let mut w = gen_afree(&self.triple, grid, band, seed)?;
        let mut rho = 0.0f64;
        for v in w.points() {
            let m = enc.decode(v)?;
            let eig = m.symmetric_eigenvalues();
            rho = rho.max(eig.max().abs()).max(eig.min().abs());
        }
        if rho > 0.0 {
            w = w.scale(0.5 * c / rho);
        }
        let shift: Vec<f64> = enc.identity(0).iter().map(|e| e * c).collect();
        for v in w.values_mut().chunks_exact_mut(shift.len()) {
            v.iter_mut().zip(&shift).for_each(|(x, s)| *x += s);
        }
        Ok(w)
    }
}

/// One-shot [`DptGenerator::generate`].
pub fn dpt_generate(dm: usize, grid: &GridSpec, band: usize, c: f64, seed: u64) -> Result<PeriodicField> {
    DptGenerator::new(dm)?.generate(grid, band, c, seed)
}
