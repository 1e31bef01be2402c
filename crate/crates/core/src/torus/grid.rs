use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on the unit torus [0,1)^d. Node i along axis a sits at i/dims[a].
///
/// Flat point index: x₁ fastest, then x₂, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    dims: Vec<usize>,
}

impl GridSpec {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one axis".into()));
        }
        for (a, &n) in dims.iter().enumerate() {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {a} has {n} samples; need an even count >= 4"
                )));
            }
        }
        if dims.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n)).is_none() {
            return Err(Error::InvalidGrid("too many grid points".into()));
        }
        Ok(GridSpec { dims: dims.to_vec() })
    }

    /// n^d grid.
    pub fn cubic(d: usize, n: usize) -> Result<Self> {
        GridSpec::new(&vec![n; d])
    }

    pub fn d(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_dim(&self) -> usize {
        self.dims.iter().copied().min().unwrap_or(0)
    }

    /// Stride of axis `a` in the flat point index.
    pub fn stride(&self, a: usize) -> usize {
        self.dims[..a].iter().product()
    }

    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for (o, &n) in out.iter_mut().zip(&self.dims) {
            *o = flat % n;
            flat /= n;
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.dims).rev().fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Signed frequency of FFT slot `i` on axis `a`; the Nyquist slot maps to +n/2.
    pub fn frequency(&self, a: usize, i: usize) -> i64 {
        let n = self.dims[a];
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// FFT slot of signed frequency `k` on axis `a`.
    pub fn slot(&self, a: usize, k: i64) -> usize {
        k.rem_euclid(self.dims[a] as i64) as usize
    }

    pub fn is_nyquist(&self, a: usize, i: usize) -> bool {
        i == self.dims[a] / 2
    }

    /// Signed frequency vector of flat spectral index `flat`.
    pub fn frequency_of(&self, flat: usize) -> Vec<i64> {
        let mut idx = vec![0; self.d()];
        self.unravel(flat, &mut idx);
        idx.iter().enumerate().map(|(a, &i)| self.frequency(a, i)).collect()
    }

    /// True if any coordinate of the spectral index sits on the Nyquist slot.
    pub fn touches_nyquist(&self, flat: usize) -> bool {
        let mut rest = flat;
        for &n in &self.dims {
            if rest % n == n / 2 {
                return true;
            }
            rest /= n;
        }
        false
    }

    /// Node coordinates of flat point index `flat`.
    pub fn node(&self, flat: usize, out: &mut [f64]) {
        let mut rest = flat;
        for (o, &n) in out.iter_mut().zip(&self.dims) {
            *o = (rest % n) as f64 / n as f64;
            rest /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small_axes() {
        assert!(GridSpec::new(&[8, 7]).is_err());
        assert!(GridSpec::new(&[2, 8]).is_err());
        assert!(GridSpec::new(&[]).is_err());
        assert_eq!(GridSpec::new(&[4, 6]).unwrap().len(), 24);
    }

    #[test]
    fn ravel_unravel_and_frequencies() {
        let g = GridSpec::new(&[4, 6, 8]).unwrap();
        let mut idx = [0; 3];
        for flat in 0..g.len() {
            g.unravel(flat, &mut idx);
            assert_eq!(g.ravel(&idx), flat);
        }
        assert_eq!(g.stride(2), 24);
        let freqs: Vec<i64> = (0..6).map(|i| g.frequency(1, i)).collect();
        assert_eq!(freqs, vec![0, 1, 2, 3, -2, -1]);
        assert_eq!(g.slot(1, -2), 4);
        assert!(g.is_nyquist(1, 3));
        assert!(g.touches_nyquist(g.ravel(&[1, 3, 0])));
        assert!(!g.touches_nyquist(g.ravel(&[1, 2, 7])));
    }
}
