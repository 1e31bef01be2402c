//! Bundled operators used by tests, the CLI `fixtures` command and the
//! experiments.

use crate::polycore::{Monomial, OperatorDescriptor, Rational, RationalMatrix};

fn unit_alpha(d: usize, axis: usize) -> Monomial {
    Monomial::var(d, axis)
}

fn build(d: usize, k: u32, n: usize, m: usize, entries: &[(usize, usize, usize, i64)]) -> OperatorDescriptor {
    // entries: (axis of ∂, row, col, coefficient) for first-order operators.
    let mut mats: Vec<RationalMatrix> = vec![RationalMatrix::zeros(m, n); d];
    for &(axis, row, col, c) in entries {
        let v = mats[axis].get(row, col) + &Rational::from(c);
        mats[axis].set(row, col, v);
    }
    OperatorDescriptor::new(
        d,
        k,
        n,
        m,
        mats.into_iter()
            .enumerate()
            .map(|(axis, mat)| (unit_alpha(d, axis), mat)),
    )
    .expect("fixture operators are valid")
}

/// div u = Σ_i ∂_i u_i for u: 𝕋^d → ℝ^d.
pub fn divergence(d: usize) -> OperatorDescriptor {
    let entries: Vec<_> = (0..d).map(|i| (i, 0, i, 1)).collect();
    build(d, 1, d, 1, &entries)
}

/// Component index of S_ij (i ≤ j) in the unscaled upper-triangular encoding
/// (S11, S12, …, S1d, S22, …, Sdd).
pub fn sym_index(dm: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dm - i * (i + 1) / 2 + j
}

/// Row-wise divergence (div S)_i = Σ_j ∂_j S_ij on symmetric fields in the
/// unscaled upper-triangular encoding, N = dm(dm+1)/2.
pub fn symmetric_divergence(dm: usize) -> OperatorDescriptor {
    let n = dm * (dm + 1) / 2;
    let mut entries = Vec::new();
    for i in 0..dm {
        for j in 0..dm {
            entries.push((j, i, sym_index(dm, i, j), 1));
        }
    }
    build(dm, 1, n, dm, &entries)
}

/// Row-wise divergence on full matrix fields, component i·dm + j holding S_ij.
pub fn row_divergence(dm: usize) -> OperatorDescriptor {
    let mut entries = Vec::new();
    for i in 0..dm {
        for j in 0..dm {
            entries.push((j, i, i * dm + j, 1));
        }
    }
    build(dm, 1, dm * dm, dm, &entries)
}

/// Scalar curl ∂₁u₂ − ∂₂u₁ in two dimensions.
pub fn curl2() -> OperatorDescriptor {
    build(2, 1, 2, 1, &[(0, 0, 1, 1), (1, 0, 0, -1)])
}

/// curl u = ∇ × u in three dimensions.
pub fn curl3() -> OperatorDescriptor {
    build(
        3,
        1,
        3,
        3,
        &[
            (1, 0, 2, 1),
            (2, 0, 1, -1),
            (2, 1, 0, 1),
            (0, 1, 2, -1),
            (0, 2, 1, 1),
            (1, 2, 0, -1),
        ],
    )
}

/// Scalar Laplacian Σ_i ∂_i².
pub fn laplacian(d: usize) -> OperatorDescriptor {
    OperatorDescriptor::new(
        d,
        2,
        1,
        1,
        (0..d).map(|i| {
            let mut e = vec![0; d];
            e[i] = 2;
            (Monomial::new(&e), RationalMatrix::identity(1))
        }),
    )
    .expect("valid")
}

/// Zeroth-order identity operator on ℝ^n.
pub fn identity(d: usize, n: usize) -> OperatorDescriptor {
    OperatorDescriptor::new(d, 0, n, n, [(Monomial::one(d), RationalMatrix::identity(n))]).expect("valid")
}

/// Gradient ∇φ of a scalar, d components.
pub fn gradient(d: usize) -> OperatorDescriptor {
    let entries: Vec<_> = (0..d).map(|i| (i, i, 0, 1)).collect();
    build(d, 1, 1, d, &entries)
}

/// The operator fixtures used in the acceptance suite, with file stems.
pub fn all() -> Vec<(&'static str, OperatorDescriptor)> {
    vec![
        ("div2", divergence(2)),
        ("div3", divergence(3)),
        ("symdiv2", symmetric_divergence(2)),
        ("symdiv3", symmetric_divergence(3)),
        ("curl2", curl2()),
        ("curl3", curl3()),
    ]
}

/// Looks up a bundled operator by its file stem.
pub fn by_name(name: &str) -> Option<OperatorDescriptor> {
    match name {
        "rowdiv2" => Some(row_divergence(2)),
        "rowdiv3" => Some(row_divergence(3)),
        "lap2" => Some(laplacian(2)),
        "lap3" => Some(laplacian(3)),
        _ => all().into_iter().find(|(n, _)| *n == name).map(|(_, op)| op),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_encoding_is_a_bijection() {
        for dm in 2..=4 {
            let mut seen = vec![false; dm * (dm + 1) / 2];
            for i in 0..dm {
                for j in i..dm {
                    let k = sym_index(dm, i, j);
                    assert!(!seen[k]);
                    seen[k] = true;
                    assert_eq!(k, sym_index(dm, j, i));
                }
            }
            assert!(seen.into_iter().all(|s| s));
        }
    }

    #[test]
    fn divergence_symbol_is_row_xi() {
        let s = divergence(2).symbol();
        assert_eq!((s.rows(), s.cols()), (1, 2));
        assert_eq!(s.get(0, 0).to_string(), "x1");
        assert_eq!(s.get(0, 1).to_string(), "x2");
    }

    #[test]
    fn curl3_symbol_is_skew() {
        let s = curl3().symbol();
        assert_eq!(s.adjoint(), s.neg());
    }
}
