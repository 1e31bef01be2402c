use rayon::prelude::*;
use serde::Serialize;

use super::fft::dft;
use super::generate::gen_afree;
use super::grid::GridSpec;
use super::norms::{lp_norm, sobolev_norm, sobolev_norm_l2_spectral, sobolev_weights};
use super::solver::PotentialSolver;
use crate::error::{Error, Result};
use crate::synthesis::PotentialTriple;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundExperimentConfig {
    pub grids: Vec<GridSpec>,
    pub trials: usize,
    pub band: usize,
    /// Exponents p; the default set is {2, d + 1}.
    pub p_values: Vec<f64>,
    pub seed: u64,
    /// Tolerance for the solver's zero-mean and A-free preconditions.
    pub tol: f64,
}

impl BoundExperimentConfig {
    pub fn new(t: &PotentialTriple, grids: Vec<GridSpec>, trials: usize, band: usize, seed: u64) -> Self {
        BoundExperimentConfig {
            grids,
            trials,
            band,
            p_values: vec![2.0, (t.d() + 1) as f64],
            seed,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundTrial {
    pub trial: usize,
    pub seed: u64,
    /// ‖Φ‖_{W^{l,p}} / ‖U‖_{L^p}, one entry per exponent.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridBound {
    pub dims: Vec<usize>,
    pub max_ratio: Vec<f64>,
    pub trials: Vec<BoundTrial>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub l: u32,
    pub p_values: Vec<f64>,
    pub grids: Vec<GridBound>,
    /// |max_{i+1} − max_i| / max_i between consecutive grids, per exponent.
    pub refinement_change: Vec<Vec<f64>>,
    pub all_finite: bool,
}

impl BoundReport {
    pub fn largest_refinement_change(&self) -> f64 {
        self.refinement_change.iter().flatten().fold(0.0, |m, v| m.max(*v))
    }
}

/// Seed of trial `i`: the base seed advanced by `i`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

/// Draws A-free fields, solves for their potentials and records
/// ‖Φ‖_{W^{l,p}} / ‖U‖_{L^p} on each grid.
pub fn sobolev_bound_experiment(t: &PotentialTriple, cfg: &BoundExperimentConfig) -> Result<BoundReport> {
    if cfg.grids.is_empty() {
        return Err(Error::InvalidArgument("experiment needs at least one grid".into()));
    }
    for &p in &cfg.p_values {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "exponent p = {p} must satisfy 1 <= p < inf"
            )));
        }
    }
    let l = t.l_order();
    let mut grids = Vec::with_capacity(cfg.grids.len());
    for grid in &cfg.grids {
        let solver = PotentialSolver::new(t, grid)?;
        let weights = sobolev_weights(grid, l);
        let trials = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| -> Result<BoundTrial> {
                let seed = trial_seed(cfg.seed, trial);
                let u = gen_afree(t, grid, cfg.band, seed)?;
                let phi = solver.solve(&u, cfg.tol)?;
                let ratios = cfg
                    .p_values
                    .iter()
                    .map(|&p| -> Result<f64> {
                        if p == 2.0 {
                            let uh = dft(&u);
                            Ok(sobolev_norm_l2_spectral(&dft(&phi), &weights) / uh.l2_norm())
                        } else {
                            Ok(sobolev_norm(&phi, l, p)? / lp_norm(&u, p)?)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(BoundTrial { trial, seed, ratios })
            })
            .collect::<Result<Vec<_>>>()?;
        let max_ratio = (0..cfg.p_values.len())
            .map(|j| trials.iter().map(|t| t.ratios[j]).fold(f64::NAN, f64::max))
            .collect();
        grids.push(GridBound {
            dims: grid.dims().to_vec(),
            max_ratio,
            trials,
        });
    }
    let refinement_change = grids
        .windows(2)
        .map(|w| {
            w[0].max_ratio
                .iter()
                .zip(&w[1].max_ratio)
                .map(|(a, b)| (b - a).abs() / a)
                .collect()
        })
        .collect();
    let all_finite = grids
        .iter()
        .flat_map(|g| g.trials.iter().flat_map(|t| t.ratios.iter()))
        .all(|r| r.is_finite());
    Ok(BoundReport {
        l,
        p_values: cfg.p_values.clone(),
        grids,
        refinement_change,
        all_finite,
    })
}
