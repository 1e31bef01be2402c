use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::field::{PeriodicField, SpectralField};
use super::grid::GridSpec;

/// In-place unnormalized d-dimensional FFT of one scalar component (x₁ fastest).
pub(crate) fn fft_nd(grid: &GridSpec, data: &mut [Complex64], direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let total = grid.len();
    let mut lines = vec![Complex64::new(0.0, 0.0); total];
    for (a, &n) in grid.dims().iter().enumerate() {
        let fft = planner.plan_fft(n, direction);
        let stride = grid.stride(a);
        let outer = total / (stride * n);
        // Gather every axis-a line into contiguous storage, transform all at once, scatter back.
        let mut line = 0;
        for o in 0..outer {
            for s in 0..stride {
                let base = o * stride * n + s;
                for i in 0..n {
                    lines[line * n + i] = data[base + i * stride];
                }
                line += 1;
            }
        }
        fft.process(&mut lines);
        let mut line = 0;
        for o in 0..outer {
            for s in 0..stride {
                let base = o * stride * n + s;
                for i in 0..n {
                    data[base + i * stride] = lines[line * n + i];
                }
                line += 1;
            }
        }
    }
}

fn split_components(grid: &GridSpec, n: usize, interleaved: impl Fn(usize) -> Complex64) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|c| (0..grid.len()).map(|p| interleaved(p * n + c)).collect())
        .collect()
}

/// Fourier coefficients Û(ξ) = (1/M) Σ_x U(x) e^{−2πiξ·x}, M = number of grid points.
pub fn dft(f: &PeriodicField) -> SpectralField {
    let grid = f.grid();
    let n = f.n();
    let values = f.values();
    let mut comps = split_components(grid, n, |i| Complex64::new(values[i], 0.0));
    let inv = 1.0 / grid.len() as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len() * n];
    for (c, comp) in comps.iter_mut().enumerate() {
        fft_nd(grid, comp, FftDirection::Forward);
        for (p, z) in comp.iter().enumerate() {
            out[p * n + c] = z * inv;
        }
    }
    SpectralField::from_coeffs(grid, n, out).expect("shape preserved")
}

/// Complex synthesis U(x) = Σ_ξ Û(ξ) e^{2πiξ·x}.
pub fn idft_complex(s: &SpectralField) -> Vec<Complex64> {
    let grid = s.grid();
    let n = s.n();
    let coeffs = s.coeffs();
    let mut comps = split_components(grid, n, |i| coeffs[i]);
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len() * n];
    for (c, comp) in comps.iter_mut().enumerate() {
        fft_nd(grid, comp, FftDirection::Inverse);
        for (p, z) in comp.iter().enumerate() {
            out[p * n + c] = *z;
        }
    }
    out
}

/// Real part of the synthesis; exact inverse of [`dft`] for conjugate-symmetric input.
pub fn idft(s: &SpectralField) -> PeriodicField {
    let values = idft_complex(s).into_iter().map(|z| z.re).collect();
    PeriodicField::from_values(s.grid(), s.n(), values).expect("finite synthesis")
}
