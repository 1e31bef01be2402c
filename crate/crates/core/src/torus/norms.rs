use std::f64::consts::PI;

use super::fft::{dft, idft};
use super::field::{PeriodicField, SpectralField};
use super::grid::GridSpec;
use super::symbol::derivative_spectral;
use crate::error::{Error, Result};
use crate::polycore::Monomial;

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "exponent p = {p} must satisfy 1 <= p < inf"
        )));
    }
    Ok(())
}

/// Σ_x |f(x)|^p over grid points in order, |·| the Euclidean norm on the fiber.
fn sum_pow(f: &PeriodicField, p: f64) -> f64 {
    f.points()
        .map(|v| {
            let e2: f64 = v.iter().map(|x| x * x).sum();
            if p == 2.0 {
                e2
            } else {
                e2.sqrt().powf(p)
            }
        })
        .sum()
}

/// (grid average of |f|^p)^{1/p}.
pub fn lp_norm(f: &PeriodicField, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok((sum_pow(f, p) / f.grid().len() as f64).powf(1.0 / p))
}

/// All multi-indices with |α| ≤ l, ascending degree.
pub fn multi_indices_up_to(d: usize, l: u32) -> Vec<Monomial> {
    (0..=l).flat_map(|q| Monomial::all_of_degree(d, q)).collect()
}

/// (Σ_{|α|≤l} ‖∂_α f‖_p^p)^{1/p} with spectral derivatives.
///
/// For p = 2 the sum is evaluated in Fourier space through [`sobolev_weights`].
pub fn sobolev_norm(f: &PeriodicField, l: u32, p: f64) -> Result<f64> {
    check_p(p)?;
    let s = dft(f);
    if p == 2.0 {
        return Ok(sobolev_norm_l2_spectral(&s, &sobolev_weights(f.grid(), l)));
    }
    let m = f.grid().len() as f64;
    let mut total = 0.0;
    for alpha in multi_indices_up_to(f.grid().d(), l) {
        let da = if alpha.degree() == 0 {
            f.clone()
        } else {
            idft(&derivative_spectral(&s, &alpha)?)
        };
        total += sum_pow(&da, p) / m;
    }
    Ok(total.powf(1.0 / p))
}

/// w(ξ) = Σ_{|α|≤l} Π_a (2πξ_a)^{2α_a}, dropping α with an odd order on a Nyquist slot.
pub fn sobolev_weights(grid: &GridSpec, l: u32) -> Vec<f64> {
    let d = grid.d();
    // per_axis[a][e][i] = (2πk_i)^{2e}, zero for odd e on the Nyquist slot.
    let per_axis: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|a| {
            let n = grid.dims()[a];
            (0..=l)
                .map(|e| {
                    (0..n)
                        .map(|i| {
                            if e % 2 == 1 && grid.is_nyquist(a, i) {
                                0.0
                            } else {
                                (2.0 * PI * grid.frequency(a, i) as f64).powi(2 * e as i32)
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let alphas = multi_indices_up_to(d, l);
    let mut idx = vec![0usize; d];
    (0..grid.len())
        .map(|slot| {
            grid.unravel(slot, &mut idx);
            alphas
                .iter()
                .map(|alpha| {
                    alpha
                        .exponents()
                        .iter()
                        .enumerate()
                        .map(|(a, &e)| per_axis[a][e as usize][idx[a]])
                        .product::<f64>()
                })
                .sum()
        })
        .collect()
}

/// Parseval form of the W^{l,2} norm: (Σ_ξ w(ξ)|f̂(ξ)|²)^{1/2}.
pub fn sobolev_norm_l2_spectral(s: &SpectralField, weights: &[f64]) -> f64 {
    s.coeffs()
        .chunks_exact(s.n())
        .zip(weights)
        .map(|(block, w)| w * block.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(g: &GridSpec, n: usize, seed: u64) -> PeriodicField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PeriodicField::from_fn(g, n, |_, out| {
            out.iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn constant_field_norms() {
        let g = GridSpec::cubic(2, 8).unwrap();
        let f = PeriodicField::constant(&g, &[-3.0]);
        for p in [1.0, 2.0, 3.5] {
            assert!((lp_norm(&f, p).unwrap() - 3.0).abs() < 1e-14);
            assert!((sobolev_norm(&f, 2, p).unwrap() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cosine_l2_norm() {
        let g = GridSpec::cubic(2, 16).unwrap();
        let f = PeriodicField::from_fn(&g, 1, |x, out| out[0] = (2.0 * PI * x[0]).cos());
        assert!((lp_norm(&f, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
        // ‖f‖² + ‖∂₁f‖² = 1/2 + 4π²/2.
        let h1 = sobolev_norm(&f, 1, 2.0).unwrap();
        assert!((h1 - (0.5 + 2.0 * PI * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_order_sobolev_is_lp() {
        let g = GridSpec::new(&[8, 6]).unwrap();
        let f = random_field(&g, 2, 1);
        for p in [1.0, 2.0, 3.0] {
            let a = lp_norm(&f, p).unwrap();
            assert!((sobolev_norm(&f, 0, p).unwrap() - a).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn parseval_route_matches_physical_route() {
        let g = GridSpec::new(&[8, 8, 6]).unwrap();
        let f = random_field(&g, 3, 2);
        let s = dft(&f);
        let m = g.len() as f64;
        let mut physical = 0.0;
        for alpha in multi_indices_up_to(3, 3) {
            let da = idft(&derivative_spectral(&s, &alpha).unwrap());
            physical += sum_pow(&da, 2.0) / m;
        }
        let spectral = sobolev_norm(&f, 3, 2.0).unwrap();
        assert!(
            (physical.sqrt() - spectral).abs() <= 1e-12 * spectral,
            "{} vs {spectral}",
            physical.sqrt()
        );
        let l2 = lp_norm(&f, 2.0).unwrap();
        assert!((l2 - s.l2_norm()).abs() <= 1e-12 * l2);
    }

    #[test]
    fn rejects_bad_exponent() {
        let g = GridSpec::cubic(1, 4).unwrap();
        let f = PeriodicField::zeros(&g, 1);
        assert!(lp_norm(&f, 0.5).is_err());
        assert!(lp_norm(&f, f64::INFINITY).is_err());
    }
}
