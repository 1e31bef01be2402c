use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::convex::ConvexSet;
use super::cutoff::CutoffSpec;
use super::encoding::Encoding;
use super::functional::FunctionalDescriptor;
use crate::error::{Error, Result};
use crate::polycore::Monomial;
use crate::synthesis::PotentialTriple;
use crate::torus::{apply_operator_spectral, dft, gen_potential, idft, trial_seed, GridSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub grid: GridSpec,
    pub band: usize,
    pub trials: usize,
    pub seed: u64,
    /// Index of the cut-off that windows each potential.
    pub window: u32,
    /// ζ + LΦ keeps at least this fraction of dist(ζ, ∂K).
    pub keep_fraction: f64,
    /// A trial is a violation when F(ζ) exceeds the average by more than
    /// `tol`·max(1, |F(ζ)|).
    pub tol: f64,
}

impl ProbeConfig {
    pub fn new(grid: GridSpec, trials: usize, seed: u64) -> Self {
        ProbeConfig {
            grid,
            band: 3,
            trials,
            seed,
            window: 3,
            keep_fraction: 0.5,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeTrial {
    pub trial: usize,
    pub seed: u64,
    /// Factor t applied to LΦ.
    pub amplitude: f64,
    pub f_zeta: f64,
    /// Grid average of F(ζ + tLΦ).
    pub average: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub functional: String,
    pub trials: Vec<ProbeTrial>,
    pub violations: usize,
}

/// Searches for test fields with F(ζ) > ⨍F(ζ + ℒΦ) and ζ + ℒΦ ∈ K.
///
/// Each potential is a band-limited draw multiplied by a cut-off, so ℒΦ has compact
/// support in the unit cube. Finding no violation proves nothing; finding one refutes
/// K-𝒜-quasiconvexity of F at ζ.
pub fn kaq_probe(
    f: FunctionalDescriptor,
    k: &ConvexSet,
    t: &PotentialTriple,
    zeta: &[f64],
    enc: Encoding,
    cfg: &ProbeConfig,
) -> Result<ProbeReport> {
    if zeta.len() != t.n() || k.dim() != t.n() {
        return Err(Error::DimensionMismatch(format!(
            "ζ in R^{}, K in R^{}, operator on R^{}",
            zeta.len(),
            k.dim(),
            t.n()
        )));
    }
    if cfg.grid.d() != t.d() {
        return Err(Error::DimensionMismatch(format!(
            "{}-d operator on a {}-d grid",
            t.d(),
            cfg.grid.d()
        )));
    }
    if !(cfg.keep_fraction > 0.0 && cfg.keep_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "keep fraction {} not in (0, 1)",
            cfg.keep_fraction
        )));
    }
    let dist = k.boundary_distance(zeta)?;
    if dist.is_nan() || dist <= 0.0 {
        return Err(Error::NotInConvexSet(format!("ζ has boundary distance {dist:e}")));
    }
    let f_zeta = f.eval(zeta, enc)?;
    let window = CutoffSpec::new(cfg.window)?.sample(&cfg.grid, &Monomial::one(cfg.grid.d()))?;
    let l = t.l();
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<ProbeTrial> {
            let seed = trial_seed(cfg.seed, trial);
            let mut phi = idft(&gen_potential(&cfg.grid, l.domain_dim(), l.order(), cfg.band, seed)?);
            for (v, c) in phi.values_mut().chunks_exact_mut(l.domain_dim()).zip(&window) {
                v.iter_mut().for_each(|x| *x *= c);
            }
            // Without Nyquist modes ℒΦ is an exact trigonometric polynomial, so 𝒜ℒΦ = 0
            // holds exactly and polynomial integrands of degree 2 are integrated exactly.
            let mut phi_hat = dft(&phi);
            for slot in 0..cfg.grid.len() {
                if cfg.grid.touches_nyquist(slot) {
                    phi_hat.at_mut(slot).fill(Complex64::new(0.0, 0.0));
                }
            }
            let v = idft(&apply_operator_spectral(l, &phi_hat)?);
            // |λ_min| and ⟨h, ·⟩ both move by at most the encoded norm.
            let peak = v
                .points()
                .map(|p| enc.norm(p).max(Encoding::Vector.norm(p)))
                .fold(0.0, f64::max);
            let amplitude = if peak > 0.0 {
                (1.0 - cfg.keep_fraction) * dist / peak
            } else {
                0.0
            };
            let mut acc = 0.0;
            let mut point = vec![0.0; zeta.len()];
            for p in v.points() {
                for ((o, z), w) in point.iter_mut().zip(zeta).zip(p) {
                    *o = z + amplitude * w;
                }
                acc += f.eval(&point, enc)?;
            }
            let average = acc / cfg.grid.len() as f64;
            Ok(ProbeTrial {
                trial,
                seed,
                amplitude,
                f_zeta,
                average,
                violated: f_zeta > average + cfg.tol * f_zeta.abs().max(1.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport {
        functional: f.to_string(),
        violations: trials.iter().filter(|t| t.violated).count(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::synthesis::SynthesisOptions;

    fn setup() -> (PotentialTriple, ConvexSet, Vec<f64>) {
        let t = PotentialTriple::synthesize(&fixtures::symmetric_divergence(2), &SynthesisOptions::default()).unwrap();
        let enc = Encoding::Symmetric(2);
        let k = ConvexSet::psd_identity(enc).unwrap();
        let zeta = enc.identity(0);
        (t, k, zeta)
    }

    #[test]
    fn convex_and_concave_controls() {
        let (t, k, zeta) = setup();
        let enc = Encoding::Symmetric(2);
        let cfg = ProbeConfig::new(GridSpec::cubic(2, 32).unwrap(), 5, 3);
        let convex = kaq_probe(FunctionalDescriptor::PNorm { p: 2.0 }, &k, &t, &zeta, enc, &cfg).unwrap();
        assert_eq!(convex.violations, 0);
        let concave = kaq_probe(FunctionalDescriptor::NegSquare, &k, &t, &zeta, enc, &cfg).unwrap();
        assert_eq!(concave.violations, 5);
        let det = kaq_probe(FunctionalDescriptor::NegDetPower { dm: 2 }, &k, &t, &zeta, enc, &cfg).unwrap();
        assert_eq!(det.violations, 0);
        assert!(det.trials.iter().all(|t| t.amplitude > 0.0));
    }

    #[test]
    fn rejects_points_outside_k() {
        let (t, k, _) = setup();
        let cfg = ProbeConfig::new(GridSpec::cubic(2, 16).unwrap(), 1, 1);
        let r = kaq_probe(
            FunctionalDescriptor::NegSquare,
            &k,
            &t,
            &[1.0, 2.0, 1.0],
            Encoding::Symmetric(2),
            &cfg,
        );
        assert!(matches!(r, Err(Error::NotInConvexSet(_))));
    }
}
