use rustfft::num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Real ℝ^N-valued samples on a torus grid, component index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    grid: GridSpec,
    n: usize,
    values: Vec<f64>,
}

impl PeriodicField {
    pub fn zeros(grid: &GridSpec, n: usize) -> Self {
        PeriodicField {
            grid: grid.clone(),
            n,
            values: vec![0.0; grid.len() * n],
        }
    }

    pub fn from_values(grid: &GridSpec, n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("fiber dimension must be positive".into()));
        }
        if values.len() != grid.len() * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values for {} points x {} components, got {}",
                grid.len() * n,
                grid.len(),
                n,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value at offset {pos}")));
        }
        Ok(PeriodicField {
            grid: grid.clone(),
            n,
            values,
        })
    }

    /// Samples `f(x, out)` at every node; `out` has length `n`.
    pub fn from_fn(grid: &GridSpec, n: usize, mut f: impl FnMut(&[f64], &mut [f64])) -> Self {
        let mut values = vec![0.0; grid.len() * n];
        let mut x = vec![0.0; grid.d()];
        for (p, out) in values.chunks_exact_mut(n).enumerate() {
            grid.node(p, &mut x);
            f(&x, out);
        }
        PeriodicField {
            grid: grid.clone(),
            n,
            values,
        }
    }

    pub fn constant(grid: &GridSpec, c: &[f64]) -> Self {
        PeriodicField::from_fn(grid, c.len(), |_, out| out.copy_from_slice(c))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Fiber dimension N.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, point: usize) -> &[f64] {
        &self.values[point * self.n..(point + 1) * self.n]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.n)
    }

    /// Largest absolute entry over all points and components.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Grid average of each component, summed sequentially in point order.
    pub fn mean(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.n];
        for p in self.points() {
            for (a, v) in acc.iter_mut().zip(p) {
                *a += v;
            }
        }
        let m = self.grid.len() as f64;
        acc.iter_mut().for_each(|a| *a /= m);
        acc
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        PeriodicField {
            grid: self.grid.clone(),
            n: self.n,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn check_same_shape(&self, other: &PeriodicField) -> Result<()> {
        if self.grid != other.grid || self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "fields on {:?}x{} and {:?}x{}",
                self.grid.dims(),
                self.n,
                other.grid.dims(),
                other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PeriodicField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PeriodicField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with(&self, other: &PeriodicField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(PeriodicField {
            grid: self.grid.clone(),
            n: self.n,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// max|self − other| / max|other|, or the absolute difference when `other` vanishes.
    pub fn relative_distance(&self, other: &PeriodicField) -> Result<f64> {
        let diff = self.sub(other)?.max_abs();
        let scale = other.max_abs();
        Ok(if scale > 0.0 { diff / scale } else { diff })
    }
}

/// Fourier coefficients Û(ξ), ξ ∈ ℤ^d, in FFT slot order with component index fastest.
///
/// Normalized so that U(x) = Σ_ξ Û(ξ) e^{2πiξ·x} on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    n: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &GridSpec, n: usize) -> Self {
        SpectralField {
            grid: grid.clone(),
            n,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len() * n],
        }
    }

    pub fn from_coeffs(grid: &GridSpec, n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients, got {}",
                grid.len() * n,
                coeffs.len()
            )));
        }
        Ok(SpectralField {
            grid: grid.clone(),
            n,
            coeffs,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn at(&self, slot: usize) -> &[Complex64] {
        &self.coeffs[slot * self.n..(slot + 1) * self.n]
    }

    pub fn at_mut(&mut self, slot: usize) -> &mut [Complex64] {
        &mut self.coeffs[slot * self.n..(slot + 1) * self.n]
    }

    /// Coefficient block at signed frequency ξ.
    pub fn at_frequency(&self, xi: &[i64]) -> &[Complex64] {
        let idx: Vec<usize> = xi.iter().enumerate().map(|(a, &k)| self.grid.slot(a, k)).collect();
        self.at(self.grid.ravel(&idx))
    }

    /// Spectral ℓ² norm (Σ_ξ |Û(ξ)|²)^{1/2}; equals the grid L² norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        SpectralField {
            grid: self.grid.clone(),
            n: self.n,
            coeffs: self.coeffs.iter().map(|z| z * c).collect(),
        }
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        if self.grid != other.grid || self.n != other.n {
            return Err(Error::DimensionMismatch("spectral fields of different shape".into()));
        }
        Ok(SpectralField {
            grid: self.grid.clone(),
            n: self.n,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    /// Largest |Û(ξ) − conj Û(−ξ)| over the grid, Nyquist slots included.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let g = &self.grid;
        let mut idx = vec![0; g.d()];
        let mut worst = 0.0f64;
        for slot in 0..g.len() {
            g.unravel(slot, &mut idx);
            let neg: Vec<usize> = idx.iter().zip(g.dims()).map(|(&i, &n)| (n - i) % n).collect();
            let mirror = g.ravel(&neg);
            for (a, b) in self.at(slot).iter().zip(self.at(mirror)) {
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst
    }
}
