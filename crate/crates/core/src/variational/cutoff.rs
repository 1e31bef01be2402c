use std::collections::BTreeMap;
use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::jet::Jet;
use crate::error::{Error, Result};
use crate::polycore::{Monomial, OperatorDescriptor};
use crate::synthesis::{leibniz_table, PotentialTriple};
use crate::torus::{apply_operator, dft, GridSpec, PeriodicField, SpectralField};

/// Cut-off functions χ_j(x) = Π_i φ_j(x_i − 1/2) on the unit cube.
///
/// φ_j = G_j·B_j with a Gaussian envelope G_j(s) = exp(−(s/σ_j)²) and a C^∞ plateau
/// B_j equal to 1 on |s| ≤ τ_j h_j and 0 for |s| ≥ h_j, where
/// h_j = j/(2(j+1)), τ_j = 1 − 3/(10j), σ_j = j h_j / 21.
///
/// All three parameters increase with j, so χ_j increases pointwise and tends to 1 on the
/// open cube, while the support stays inside |x_i − 1/2| < h_j. The envelope makes the
/// spectrum decay like a Gaussian: at j = 3 it is below 1e−12 where B_3 starts to fall, so
/// χ_3 is resolved to roundoff on 64-point axes. A plain plateau bump with the same support
/// is only resolved to about 1e−3 there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutoffSpec {
    j: u32,
}

impl CutoffSpec {
    pub fn new(j: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidArgument("cut-off index j must be positive".into()));
        }
        Ok(CutoffSpec { j })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// h_j: χ_j vanishes unless every |x_i − 1/2| < h_j.
    pub fn support_half_width(&self) -> f64 {
        let j = self.j as f64;
        j / (2.0 * (j + 1.0))
    }

    fn plateau_fraction(&self) -> f64 {
        1.0 - 0.3 / self.j as f64
    }

    fn envelope_width(&self) -> f64 {
        self.j as f64 * self.support_half_width() / 21.0
    }

    /// φ_j^{(k)}(s) for k = 0..=order.
    pub fn profile_derivatives(&self, s: f64, order: usize) -> Vec<f64> {
        let h = self.support_half_width();
        if s.abs() >= h {
            return vec![0.0; order + 1];
        }
        let sigma = self.envelope_width();
        let z = Jet::affine(s / sigma, 1.0 / sigma, order);
        let envelope = z.mul(&z).scale(-1.0).exp();
        let width = h * (1.0 - self.plateau_fraction());
        let u = Jet::affine((h - s.abs()) / width, -s.signum() / width, order);
        let plateau = if u.value() >= 1.0 {
            Jet::constant(1.0, order)
        } else {
            // S(u) = f(u)/(f(u) + f(1−u)), f(u) = e^{−1/u}: 0 at u = 0, 1 at u = 1, flat at both.
            let f = |v: &Jet| v.recip().scale(-1.0).exp();
            let fu = f(&u);
            let fv = f(&u.scale(-1.0).add(&Jet::constant(1.0, order)));
            fu.mul(&fu.add(&fv).recip())
        };
        envelope.mul(&plateau).derivatives()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|&xi| self.profile_derivatives(xi - 0.5, 0)[0]).product()
    }

    /// ∂_β χ_j(x).
    pub fn derivative(&self, beta: &[u32], x: &[f64]) -> f64 {
        x.iter()
            .zip(beta)
            .map(|(&xi, &b)| self.profile_derivatives(xi - 0.5, b as usize)[b as usize])
            .product()
    }

    /// ∂_β χ_j at every grid node.
    pub fn sample(&self, grid: &GridSpec, beta: &Monomial) -> Result<Vec<f64>> {
        if beta.dim() != grid.d() {
            return Err(Error::DimensionMismatch(format!(
                "{}-d multi-index on a {}-d grid",
                beta.dim(),
                grid.d()
            )));
        }
        let tables: Vec<Vec<f64>> = (0..grid.d())
            .map(|a| {
                let n = grid.dims()[a];
                let e = beta.exponents()[a] as usize;
                (0..n)
                    .map(|i| self.profile_derivatives(i as f64 / n as f64 - 0.5, e)[e])
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; grid.d()];
        Ok((0..grid.len())
            .map(|p| {
                grid.unravel(p, &mut idx);
                idx.iter().enumerate().map(|(a, &i)| tables[a][i]).product()
            })
            .collect())
    }
}

/// Trigonometric interpolants of grid fields, and their derivatives, evaluated at
/// y = a + R x for the grid nodes x. The Nyquist mode is the real cosine cos(πN y).
struct ZoomEvaluator {
    grid: GridSpec,
    /// tables[axis][e][i·n + slot] = d^e/dy^e of basis `slot` at y_i.
    tables: Vec<Vec<Vec<Complex64>>>,
}

impl ZoomEvaluator {
    fn new(grid: &GridSpec, a: &[usize], m: usize, max_order: u32) -> Self {
        let tables = (0..grid.d())
            .map(|axis| {
                let n = grid.dims()[axis];
                let nf = n as f64;
                (0..=max_order)
                    .map(|e| {
                        let mut t = vec![Complex64::new(0.0, 0.0); n * n];
                        for i in 0..n {
                            let y = a[axis] as f64 / nf + i as f64 / (m as f64 * nf);
                            for slot in 0..n {
                                t[i * n + slot] = if grid.is_nyquist(axis, slot) {
                                    let w = PI * nf;
                                    Complex64::new(w.powi(e as i32) * (w * y + e as f64 * PI / 2.0).cos(), 0.0)
                                } else {
                                    let w = 2.0 * PI * grid.frequency(axis, slot) as f64;
                                    Complex64::new(0.0, w).powu(e) * Complex64::from_polar(1.0, w * y)
                                };
                            }
                        }
                        t
                    })
                    .collect()
            })
            .collect();
        ZoomEvaluator {
            grid: grid.clone(),
            tables,
        }
    }

    /// ∂_α f̃(a + R x) at every node.
    fn eval(&self, f: &SpectralField, alpha: &[u32]) -> Result<PeriodicField> {
        let k = f.n();
        let mut data = f.coeffs().to_vec();
        let mut idx = vec![0usize; self.grid.d()];
        for (axis, &e) in alpha.iter().enumerate() {
            let n = self.grid.dims()[axis];
            let stride = self.grid.stride(axis);
            let table = &self.tables[axis][e as usize];
            let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
            for p in 0..self.grid.len() {
                self.grid.unravel(p, &mut idx);
                let i = idx[axis];
                let base = p - i * stride;
                let row = &table[i * n..(i + 1) * n];
                let dst = &mut out[p * k..(p + 1) * k];
                for (slot, w) in row.iter().enumerate() {
                    let q = base + slot * stride;
                    for (o, v) in dst.iter_mut().zip(&data[q * k..(q + 1) * k]) {
                        *o += w * v;
                    }
                }
            }
            data = out;
        }
        PeriodicField::from_values(&self.grid, k, data.iter().map(|z| z.re).collect())
    }
}

#[derive(Debug, Clone)]
pub struct CutoffResult {
    /// ℒ[χ R^{−l} Φ(a + R·)] computed spectrally, plus U(a + R·).
    pub direct: PeriodicField,
    /// Σ_{(α,β)} R^{|α|−l} L^{(α,β)} ∂_αΦ(a + R·) ∂_βχ, plus U(a + R·).
    pub expanded: PeriodicField,
    /// max|direct − expanded|.
    pub max_discrepancy: f64,
    /// max|𝒜 direct| / max|direct|.
    pub a_residual: f64,
}

/// Builds U_{j,R} = ℒ[χ_j R^{−l} Φ(a + R x)] + U(a + R x) with R = 1/m twice: by
/// spectral differentiation of the product and by the Leibniz expansion with exact
/// derivatives of χ_j and of the interpolant of Φ.
///
/// U(a + R·) is not periodic in x, so 𝒜 acts on it through the chain rule,
/// 𝒜_x[U(a + Rx)] = R^k (𝒜U)(a + Rx), while the periodic part is differentiated spectrally.
pub fn cutoff_construct(
    t: &PotentialTriple,
    phi: &PeriodicField,
    u: &PeriodicField,
    chi: &CutoffSpec,
    a: &[usize],
    m: usize,
) -> Result<CutoffResult> {
    let grid = phi.grid();
    if u.grid() != grid || grid.d() != t.d() {
        return Err(Error::DimensionMismatch(format!(
            "potential on {:?}, field on {:?}, {}-d operator",
            grid.dims(),
            u.grid().dims(),
            t.d()
        )));
    }
    if phi.n() != t.l().domain_dim() || u.n() != t.n() {
        return Err(Error::DimensionMismatch(format!(
            "potential with {} and field with {} components for ℒ: R^{} -> R^{}",
            phi.n(),
            u.n(),
            t.l().domain_dim(),
            t.n()
        )));
    }
    if m == 0 || grid.dims().iter().any(|&n| n % m != 0) {
        return Err(Error::InvalidArgument(format!(
            "R = 1/{m} does not divide the grid {:?}",
            grid.dims()
        )));
    }
    if a.len() != grid.d() || a.iter().zip(grid.dims()).any(|(&ai, &n)| ai >= n) {
        return Err(Error::InvalidArgument(format!(
            "{a:?} is not a node of {:?}",
            grid.dims()
        )));
    }
    let l = t.l_order();
    let k = t.k();
    let r = 1.0 / m as f64;
    let zoom = ZoomEvaluator::new(grid, a, m, l.max(k));
    let phi_hat = dft(phi);
    let u_hat = dft(u);
    let zero = vec![0u32; grid.d()];
    let u_zoom = zoom.eval(&u_hat, &zero)?;

    let chi0 = chi.sample(grid, &Monomial::one(grid.d()))?;
    let mut product = zoom.eval(&phi_hat, &zero)?;
    let rl = r.powi(-(l as i32));
    for (v, c) in product.values_mut().chunks_exact_mut(phi.n()).zip(&chi0) {
        v.iter_mut().for_each(|x| *x *= c * rl);
    }
    let periodic = apply_operator(t.l(), &product)?;
    let direct = periodic.add(&u_zoom)?;

    let mut dphi: BTreeMap<Monomial, PeriodicField> = BTreeMap::new();
    let mut dchi: BTreeMap<Monomial, Vec<f64>> = BTreeMap::new();
    let mut expanded = u_zoom.clone();
    for ((alpha, beta), mat) in leibniz_table(t.l()).entries() {
        if !dphi.contains_key(alpha) {
            dphi.insert(alpha.clone(), zoom.eval(&phi_hat, alpha.exponents())?);
        }
        if !dchi.contains_key(beta) {
            dchi.insert(beta.clone(), chi.sample(grid, beta)?);
        }
        let mat = mat.to_f64();
        let weight = r.powi(alpha.degree() as i32 - l as i32);
        let (dp, dc) = (&dphi[alpha], &dchi[beta]);
        for (p, out) in expanded.values_mut().chunks_exact_mut(t.n()).enumerate() {
            let c = weight * dc[p];
            if c == 0.0 {
                continue;
            }
            let src = dp.at(p);
            for (i, o) in out.iter_mut().enumerate() {
                *o += c * (0..src.len()).map(|j| mat[(i, j)] * src[j]).sum::<f64>();
            }
        }
    }
    let max_discrepancy = direct.sub(&expanded)?.max_abs();

    let mut a_direct = apply_operator(t.a(), &periodic)?;
    add_chain_rule_term(t.a(), &zoom, &u_hat, r.powi(k as i32), &mut a_direct)?;
    let scale = direct.max_abs();
    let a_residual = if scale > 0.0 { a_direct.max_abs() / scale } else { 0.0 };
    Ok(CutoffResult {
        direct,
        expanded,
        max_discrepancy,
        a_residual,
    })
}

/// out += R^k Σ_γ A^γ ∂_γŨ(a + R·).
fn add_chain_rule_term(
    a: &OperatorDescriptor,
    zoom: &ZoomEvaluator,
    u_hat: &SpectralField,
    rk: f64,
    out: &mut PeriodicField,
) -> Result<()> {
    for (gamma, mat) in a.terms() {
        let du = zoom.eval(u_hat, gamma.exponents())?;
        let mat = mat.to_f64();
        for (o, src) in out.values_mut().chunks_exact_mut(a.target_dim()).zip(du.points()) {
            for (i, oi) in o.iter_mut().enumerate() {
                *oi += rk * (0..src.len()).map(|j| mat[(i, j)] * src[j]).sum::<f64>();
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::synthesis::SynthesisOptions;
    use crate::torus::{gen_afree, gen_afree_sample, idft};

    #[test]
    fn profile_is_a_monotone_family_of_bumps() {
        let xs: Vec<f64> = (0..=400).map(|i| i as f64 / 400.0).collect();
        for j in 1..8 {
            let (c, next) = (CutoffSpec::new(j).unwrap(), CutoffSpec::new(j + 1).unwrap());
            for &x in &xs {
                let v = c.value(&[x]);
                assert!((0.0..=1.0).contains(&v));
                assert!(next.value(&[x]) >= v, "j = {j}, x = {x}");
                if (x - 0.5).abs() >= c.support_half_width() {
                    assert_eq!(v, 0.0);
                }
            }
            assert!((c.value(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
        }
        assert!(CutoffSpec::new(400).unwrap().value(&[0.1, 0.85]) > 0.99);
        assert!(CutoffSpec::new(0).is_err());
    }

    #[test]
    fn profile_derivatives_match_finite_differences() {
        let c = CutoffSpec::new(2).unwrap();
        let h = 1e-5;
        // Points in the envelope region and in the plateau transition.
        for s in [0.05, -0.12, 0.2, 0.3, -0.31] {
            let d = c.profile_derivatives(s, 3);
            for k in 0..3 {
                let fp = c.profile_derivatives(s + h, k)[k];
                let fm = c.profile_derivatives(s - h, k)[k];
                let fd = (fp - fm) / (2.0 * h);
                assert!(
                    (fd - d[k + 1]).abs() <= 1e-6 * (1.0 + d[k + 1].abs()),
                    "s = {s}, k = {k}"
                );
            }
        }
    }

    #[test]
    fn sampled_derivative_is_a_product() {
        let c = CutoffSpec::new(3).unwrap();
        let g = GridSpec::new(&[16, 8]).unwrap();
        let beta = Monomial::new(&[1, 2]);
        let s = c.sample(&g, &beta).unwrap();
        let mut x = [0.0; 2];
        for (p, v) in s.iter().enumerate() {
            g.node(p, &mut x);
            assert_eq!(*v, c.derivative(&[1, 2], &x));
        }
    }

    fn div2() -> PotentialTriple {
        PotentialTriple::synthesize(&fixtures::divergence(2), &SynthesisOptions::default()).unwrap()
    }

    #[test]
    fn zoom_of_a_trig_polynomial_is_exact() {
        let g = GridSpec::cubic(2, 16).unwrap();
        let f = |y: &[f64]| (2.0 * PI * (3.0 * y[0] - y[1])).cos() + (2.0 * PI * 2.0 * y[1]).sin();
        let field = PeriodicField::from_fn(&g, 1, |x, out| out[0] = f(x));
        let zoom = ZoomEvaluator::new(&g, &[5, 2], 4, 1);
        let z = zoom.eval(&dft(&field), &[0, 0]).unwrap();
        let dz = zoom.eval(&dft(&field), &[1, 0]).unwrap();
        let mut x = [0.0; 2];
        for p in 0..g.len() {
            g.node(p, &mut x);
            let y = [5.0 / 16.0 + x[0] / 4.0, 2.0 / 16.0 + x[1] / 4.0];
            assert!((z.at(p)[0] - f(&y)).abs() < 1e-13);
            let d = -6.0 * PI * (2.0 * PI * (3.0 * y[0] - y[1])).sin();
            assert!((dz.at(p)[0] - d).abs() < 1e-11);
        }
    }

    #[test]
    fn zero_potential_gives_the_rescaled_field() {
        let t = div2();
        let g = GridSpec::cubic(2, 16).unwrap();
        let u = gen_afree(&t, &g, 3, 1).unwrap();
        let phi = PeriodicField::zeros(&g, 2);
        let res = cutoff_construct(&t, &phi, &u, &CutoffSpec::new(3).unwrap(), &[0, 0], 1).unwrap();
        assert_eq!(res.direct, res.expanded);
        assert!(res.direct.relative_distance(&u).unwrap() < 1e-13);
        assert!(res.a_residual < 1e-12);
    }

    #[test]
    fn leibniz_expansion_matches_direct_construction() {
        let t = div2();
        let g = GridSpec::cubic(2, 64).unwrap();
        let phi = idft(&gen_afree_sample(&t, &g, 4, 5).unwrap().potential);
        let u = gen_afree(&t, &g, 4, 6).unwrap();
        let res = cutoff_construct(&t, &phi, &u, &CutoffSpec::new(3).unwrap(), &[16, 40], 4).unwrap();
        let scale = res.direct.max_abs();
        assert!(res.max_discrepancy <= 1e-8 * scale, "{}", res.max_discrepancy / scale);
        assert!(res.a_residual <= 1e-9, "{}", res.a_residual);
    }

    #[test]
    fn rejects_incompatible_zoom() {
        let t = div2();
        let g = GridSpec::cubic(2, 16).unwrap();
        let f = PeriodicField::zeros(&g, 2);
        let chi = CutoffSpec::new(1).unwrap();
        assert!(cutoff_construct(&t, &f, &f, &chi, &[0, 0], 3).is_err());
        assert!(cutoff_construct(&t, &f, &f, &chi, &[16, 0], 4).is_err());
        assert!(cutoff_construct(&t, &f, &PeriodicField::zeros(&g, 3), &chi, &[0, 0], 4).is_err());
    }
}
