//! Periodic fields on the unit torus, spectral operator application, the
//! potential solver ℒΦ = U, 𝒢Φ = 0, and L^p / W^{l,p} norms.
//!
//! Fourier basis e^{2πiξ·x}, ξ ∈ ℤ^d, so ∂_α acts as (2πiξ)^α.

mod afld;
mod experiment;
mod fft;
mod field;
mod generate;
mod grid;
mod norms;
mod solver;
mod symbol;

pub(crate) use afld::write_atomic;
pub use afld::{decode_afld, encode_afld, read_afld, write_afld, AFLD_MAGIC, AFLD_VERSION};
pub use experiment::{sobolev_bound_experiment, trial_seed, BoundExperimentConfig, BoundReport, BoundTrial, GridBound};
pub use fft::{dft, idft, idft_complex};
pub use field::{PeriodicField, SpectralField};
pub use generate::{gen_afree, gen_afree_sample, gen_potential, AFreeSample};
pub use grid::GridSpec;
pub use norms::{lp_norm, multi_indices_up_to, sobolev_norm, sobolev_norm_l2_spectral, sobolev_weights};
pub use solver::{solve_potential, PotentialSolver, RANK_DROP_FLOOR};
pub use symbol::{apply_operator, apply_operator_spectral, derivative_spectral, eval_poly_on_grid, i_pow, GridSymbol};
