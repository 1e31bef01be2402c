use serde::Serialize;

use super::encoding::Encoding;
use crate::error::{Error, Result};
use crate::torus::PeriodicField;

/// Slack below zero still counted as membership, relative to max(1, |v|).
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// Positive semidefinite matrices.
    Psd(Encoding),
    /// ⟨h_i, v⟩ ≥ c_i with unit normals h_i.
    HalfSpaces(Vec<(Vec<f64>, f64)>),
}

/// A closed convex set K ⊂ ℝ^N with an interior point Y.
///
/// The boundary distance is signed: positive inside, negative outside. For PSD it is the
/// smallest eigenvalue (the Frobenius distance to the boundary of the cone), for
/// half-spaces the smallest ⟨h_i, v⟩ − c_i.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSet {
    shape: Shape,
    interior: Vec<f64>,
    margin: f64,
}

impl ConvexSet {
    /// The PSD cone for `dm × dm` matrices in `n` components, with interior point `interior`.
    pub fn psd(dm: usize, interior: Vec<f64>) -> Result<Self> {
        let enc = Encoding::matrix(dm, interior.len())?;
        let mut k = ConvexSet {
            shape: Shape::Psd(enc),
            interior,
            margin: 0.0,
        };
        k.set_margin()?;
        Ok(k)
    }

    /// The PSD cone with the identity as interior point.
    pub fn psd_identity(enc: Encoding) -> Result<Self> {
        let dm = enc
            .matrix_dim()
            .ok_or_else(|| Error::InvalidArgument("PSD needs a matrix encoding".into()))?;
        ConvexSet::psd(dm, enc.identity(0))
    }

    /// ∩_i {⟨h_i, v⟩ ≥ c_i}; normals are rescaled to unit length.
    pub fn half_spaces(faces: Vec<(Vec<f64>, f64)>, interior: Vec<f64>) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::InvalidArgument("need at least one half-space".into()));
        }
        let mut unit = Vec::with_capacity(faces.len());
        for (h, c) in faces {
            if h.len() != interior.len() {
                return Err(Error::DimensionMismatch(format!(
                    "normal of length {} in R^{}",
                    h.len(),
                    interior.len()
                )));
            }
            let norm = h.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > 0.0 && norm.is_finite() && c.is_finite()) {
                return Err(Error::InvalidArgument(
                    "half-space normals must be finite and nonzero".into(),
                ));
            }
            unit.push((h.iter().map(|x| x / norm).collect(), c / norm));
        }
        let mut k = ConvexSet {
            shape: Shape::HalfSpaces(unit),
            interior,
            margin: 0.0,
        };
        k.set_margin()?;
        Ok(k)
    }

    fn set_margin(&mut self) -> Result<()> {
        let margin = self.boundary_distance(&self.interior)?;
        if margin.is_nan() || margin <= 0.0 {
            return Err(Error::NotInConvexSet(format!(
                "interior point has boundary distance {margin:e}"
            )));
        }
        self.margin = margin;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.interior.len()
    }

    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    /// Boundary distance of the interior point Y.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// The matrix encoding for PSD sets, `Vector` otherwise.
    pub fn encoding(&self) -> Encoding {
        match &self.shape {
            Shape::Psd(e) => *e,
            Shape::HalfSpaces(_) => Encoding::Vector,
        }
    }

    pub fn boundary_distance(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.interior.len() {
            return Err(Error::DimensionMismatch(format!(
                "point in R^{} for a set in R^{}",
                v.len(),
                self.interior.len()
            )));
        }
        match &self.shape {
            Shape::Psd(enc) => {
                // A non-symmetric full matrix lies outside the cone by its antisymmetric part.
                let asym = enc.asymmetry(v)?;
                let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
                if asym > MEMBERSHIP_TOL * scale {
                    return Ok(-asym);
                }
                enc.min_eigenvalue(v)
            }
            Shape::HalfSpaces(faces) => Ok(faces
                .iter()
                .map(|(h, c)| h.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() - c)
                .fold(f64::INFINITY, f64::min)),
        }
    }

    pub fn contains(&self, v: &[f64]) -> Result<bool> {
        let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        Ok(self.boundary_distance(v)? >= -MEMBERSHIP_TOL * scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectReport {
    pub member: bool,
    pub min_boundary_distance: f64,
}

/// Membership of every grid value in K and the smallest signed boundary distance.
pub fn project_check(k: &ConvexSet, f: &PeriodicField) -> Result<ProjectReport> {
    if f.n() != k.dim() {
        return Err(Error::DimensionMismatch(format!(
            "field with {} components for a set in R^{}",
            f.n(),
            k.dim()
        )));
    }
    let mut member = true;
    let mut dist = f64::INFINITY;
    for v in f.points() {
        dist = dist.min(k.boundary_distance(v)?);
        member &= k.contains(v)?;
    }
    Ok(ProjectReport {
        member,
        min_boundary_distance: dist,
    })
}

/// V_n = (1 − 1/n)(f − Y) + Y, which moves a K-valued field at least dist(Y, ∂K)/n
/// inside K.
pub fn shrink_to_interior(k: &ConvexSet, f: &PeriodicField, n: u32) -> Result<PeriodicField> {
    if n == 0 {
        return Err(Error::InvalidArgument("shrink factor n must be positive".into()));
    }
    let report = project_check(k, f)?;
    if !report.member {
        return Err(Error::NotInConvexSet(format!(
            "field reaches boundary distance {:e}",
            report.min_boundary_distance
        )));
    }
    let t = 1.0 - 1.0 / n as f64;
    let y = k.interior();
    let mut out = f.clone();
    for v in out.values_mut().chunks_exact_mut(y.len()) {
        for (x, c) in v.iter_mut().zip(y) {
            *x = t * (*x - c) + c;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::GridSpec;

    #[test]
    fn constant_interior_field_has_the_margin() {
        let k = ConvexSet::psd(2, vec![2.0, 0.5, 1.0]).unwrap();
        let g = GridSpec::cubic(2, 4).unwrap();
        let f = PeriodicField::constant(&g, k.interior());
        let r = project_check(&k, &f).unwrap();
        assert!(r.member);
        assert_eq!(r.min_boundary_distance, k.margin());
        let expected = 1.5 - (0.25f64 + 0.25).sqrt();
        assert!((k.margin() - expected).abs() < 1e-15);
    }

    #[test]
    fn indefinite_node_is_not_a_member() {
        let k = ConvexSet::psd_identity(Encoding::Symmetric(2)).unwrap();
        let g = GridSpec::cubic(2, 4).unwrap();
        let mut f = PeriodicField::constant(&g, &[1.0, 0.0, 1.0]);
        f.values_mut()[3 * 5..3 * 6].copy_from_slice(&[1.0, 2.0, 1.0]);
        let r = project_check(&k, &f).unwrap();
        assert!(!r.member);
        assert!((r.min_boundary_distance + 1.0).abs() < 1e-14);
        assert!(matches!(shrink_to_interior(&k, &f, 2), Err(Error::NotInConvexSet(_))));
    }

    #[test]
    fn asymmetric_full_matrix_is_outside() {
        let k = ConvexSet::psd_identity(Encoding::Full(2)).unwrap();
        assert!(!k.contains(&[1.0, 1.0, -1.0, 1.0]).unwrap());
        assert!(!k.contains(&[1.0, 0.1, -0.1, 1.0]).unwrap());
        assert!(k.contains(&[1.0, 0.5, 0.5, 1.0]).unwrap());
    }

    #[test]
    fn half_spaces_use_unit_normals() {
        let k = ConvexSet::half_spaces(vec![(vec![2.0, 0.0], 0.0), (vec![0.0, 1.0], -1.0)], vec![1.0, 0.0]).unwrap();
        assert!((k.margin() - 1.0).abs() < 1e-15);
        assert!((k.boundary_distance(&[3.0, -0.5]).unwrap() - 0.5).abs() < 1e-15);
        assert!(ConvexSet::half_spaces(vec![(vec![1.0, 0.0], 2.0)], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn shrinking_collapses_at_n_one() {
        let k = ConvexSet::psd_identity(Encoding::Symmetric(2)).unwrap();
        let g = GridSpec::cubic(2, 4).unwrap();
        let f = PeriodicField::from_fn(&g, 3, |x, out| out.copy_from_slice(&[1.0 + x[0], 0.1, 2.0]));
        let v1 = shrink_to_interior(&k, &f, 1).unwrap();
        assert_eq!(v1, PeriodicField::constant(&g, &[1.0, 0.0, 1.0]));
        for n in [2, 10, 1000] {
            let vn = shrink_to_interior(&k, &f, n).unwrap();
            let diff = vn.sub(&f).unwrap().max_abs();
            let expected = f.sub(&v1).unwrap().max_abs() / n as f64;
            assert!((diff - expected).abs() < 1e-14);
        }
    }
}
