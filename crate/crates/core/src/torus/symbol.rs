use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::fft::{dft, idft};
use super::field::{PeriodicField, SpectralField};
use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::polycore::{Monomial, MultiPoly, OperatorDescriptor, PolyMatrix, Rational};

/// i^k.
pub fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// tables[a][e][slot] = (2π k_slot)^e, with odd e zeroed on the Nyquist slot.
struct PowerTables {
    tables: Vec<Vec<Vec<f64>>>,
}

impl PowerTables {
    fn new(grid: &GridSpec, max_exp: &[u32]) -> Self {
        let tables = (0..grid.d())
            .map(|a| {
                let n = grid.dims()[a];
                let base: Vec<f64> = (0..n).map(|i| 2.0 * PI * grid.frequency(a, i) as f64).collect();
                (0..=max_exp[a])
                    .map(|e| {
                        let mut row: Vec<f64> = base.iter().map(|b| b.powi(e as i32)).collect();
                        if e % 2 == 1 {
                            row[n / 2] = 0.0;
                        }
                        row
                    })
                    .collect()
            })
            .collect();
        PowerTables { tables }
    }

    fn get(&self, a: usize, e: u32) -> &[f64] {
        &self.tables[a][e as usize]
    }
}

fn max_exponents<'a>(d: usize, monos: impl Iterator<Item = &'a Monomial>) -> Vec<u32> {
    let mut max = vec![0u32; d];
    for m in monos {
        for (mx, &e) in max.iter_mut().zip(m.exponents()) {
            *mx = (*mx).max(e);
        }
    }
    max
}

/// Values p(2πξ) on every spectral slot, contracting one axis at a time.
fn contract(grid: &GridSpec, p: &MultiPoly, tables: &PowerTables) -> Vec<f64> {
    let d = grid.d();
    if p.is_zero() {
        return vec![0.0; grid.len()];
    }
    // Keys are exponent prefixes α[..a]; arrays range over slots of axes a.. (earliest fastest).
    let mut stage: BTreeMap<Vec<u32>, Vec<f64>> = BTreeMap::new();
    for (mono, c) in p.terms() {
        let slot = stage.entry(mono.exponents().to_vec()).or_insert_with(|| vec![0.0]);
        slot[0] += c.to_f64();
    }
    for a in (0..d).rev() {
        let n = grid.dims()[a];
        let mut next: BTreeMap<Vec<u32>, Vec<f64>> = BTreeMap::new();
        for (key, arr) in stage {
            let t = tables.get(a, key[a]);
            let out = next
                .entry(key[..a].to_vec())
                .or_insert_with(|| vec![0.0; arr.len() * n]);
            for (r, &v) in arr.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let dst = &mut out[r * n..(r + 1) * n];
                for (o, &ti) in dst.iter_mut().zip(t) {
                    *o += v * ti;
                }
            }
        }
        stage = next;
    }
    stage.into_values().next().unwrap_or_else(|| vec![0.0; grid.len()])
}

/// Evaluates a scalar polynomial at 2πξ on every spectral slot of `grid`.
pub fn eval_poly_on_grid(p: &MultiPoly, grid: &GridSpec) -> Result<Vec<f64>> {
    if p.dim() != grid.d() {
        return Err(Error::DimensionMismatch(format!(
            "polynomial in {} variables on a {}-d grid",
            p.dim(),
            grid.d()
        )));
    }
    let tables = PowerTables::new(grid, &max_exponents(grid.d(), p.terms().map(|(m, _)| m)));
    Ok(contract(grid, p, &tables))
}

/// A polynomial matrix symbol tabulated at 2πξ on a spectral grid.
#[derive(Debug, Clone)]
pub struct GridSymbol {
    grid: GridSpec,
    rows: usize,
    cols: usize,
    entries: Vec<Option<Vec<f64>>>,
}

impl GridSymbol {
    pub fn new(m: &PolyMatrix, grid: &GridSpec) -> Result<Self> {
        if m.dim() != grid.d() {
            return Err(Error::DimensionMismatch(format!(
                "symbol in {} variables on a {}-d grid",
                m.dim(),
                grid.d()
            )));
        }
        let monos = m.entries().iter().flat_map(|p| p.terms().map(|(mono, _)| mono));
        let tables = PowerTables::new(grid, &max_exponents(grid.d(), monos));
        let entries = m
            .entries()
            .par_iter()
            .map(|p| (!p.is_zero()).then(|| contract(grid, p, &tables)))
            .collect();
        Ok(GridSymbol {
            grid: grid.clone(),
            rows: m.rows(),
            cols: m.cols(),
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn entry(&self, i: usize, j: usize, slot: usize) -> f64 {
        self.entries[i * self.cols + j].as_ref().map_or(0.0, |v| v[slot])
    }

    /// out(ξ) = factor · M(2πξ) in(ξ).
    pub fn apply(&self, input: &SpectralField, factor: Complex64) -> Result<SpectralField> {
        if input.grid() != &self.grid || input.n() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "symbol with {} columns applied to a {}-component field",
                self.cols,
                input.n()
            )));
        }
        let mut out = SpectralField::zeros(&self.grid, self.rows);
        let rows = self.rows;
        let cols = self.cols;
        out.coeffs_mut()
            .par_chunks_mut(rows)
            .enumerate()
            .for_each(|(slot, block)| {
                let u = input.at(slot);
                for (i, o) in block.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, uj) in u.iter().enumerate() {
                        if let Some(v) = &self.entries[i * cols + j] {
                            acc += uj * v[slot];
                        }
                    }
                    *o = acc * factor;
                }
            });
        Ok(out)
    }
}

/// Symbol of `op` applied in Fourier space: Û ↦ i^k op[2πξ] Û.
pub fn apply_operator_spectral(op: &OperatorDescriptor, f: &SpectralField) -> Result<SpectralField> {
    check_operator_field(op, f.grid(), f.n())?;
    let sym = GridSymbol::new(&op.symbol(), f.grid())?;
    sym.apply(f, i_pow(op.order() as i64))
}

/// Applies a constant-coefficient operator to a periodic field spectrally.
pub fn apply_operator(op: &OperatorDescriptor, f: &PeriodicField) -> Result<PeriodicField> {
    check_operator_field(op, f.grid(), f.n())?;
    Ok(idft(&apply_operator_spectral(op, &dft(f))?))
}

pub(crate) fn check_operator_field(op: &OperatorDescriptor, grid: &GridSpec, n: usize) -> Result<()> {
    if op.d() != grid.d() {
        return Err(Error::DimensionMismatch(format!(
            "operator on ℝ^{} applied on a {}-d grid",
            op.d(),
            grid.d()
        )));
    }
    if op.domain_dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "operator expects {} components, field has {}",
            op.domain_dim(),
            n
        )));
    }
    Ok(())
}

/// ∂_α in Fourier space: multiplication by (2πiξ)^α, odd orders zeroed on Nyquist slots.
pub fn derivative_spectral(f: &SpectralField, alpha: &Monomial) -> Result<SpectralField> {
    let grid = f.grid();
    if alpha.dim() != grid.d() {
        return Err(Error::DimensionMismatch(
            "multi-index length differs from grid dimension".into(),
        ));
    }
    let weights = eval_poly_on_grid(&MultiPoly::monomial(grid.d(), alpha.clone(), Rational::one()), grid)?;
    let factor = i_pow(alpha.degree() as i64);
    let n = f.n();
    let mut out = f.clone();
    out.coeffs_mut()
        .chunks_exact_mut(n)
        .zip(&weights)
        .for_each(|(block, &w)| block.iter_mut().for_each(|z| *z *= factor * w));
    Ok(out)
}
