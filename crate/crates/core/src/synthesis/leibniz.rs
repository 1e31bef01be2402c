use std::collections::BTreeMap;

use crate::polycore::{Monomial, OperatorDescriptor, Rational, RationalMatrix};

/// Coefficients of the general Leibniz rule for an order-l operator applied to
/// a scalar times a vector field:
/// ℒ(χΦ) = Σ_{|α|+|β|=l} L^{(α,β)} (∂_αΦ)(∂_βχ), with L^{(α,β)} = binom(α+β, α)·L^{α+β}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeibnizTable {
    d: usize,
    order: u32,
    entries: BTreeMap<(Monomial, Monomial), RationalMatrix>,
}

impl LeibnizTable {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Nonzero blocks keyed by (α, β): α differentiates Φ, β differentiates χ.
    pub fn entries(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &RationalMatrix)> {
        self.entries.iter()
    }

    pub fn get(&self, alpha: &Monomial, beta: &Monomial) -> Option<&RationalMatrix> {
        self.entries.get(&(alpha.clone(), beta.clone()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn leibniz_table(l: &OperatorDescriptor) -> LeibnizTable {
    let d = l.d();
    let mut entries = BTreeMap::new();
    for (gamma, mat) in l.terms() {
        for deg_a in 0..=gamma.degree() {
            for alpha in Monomial::all_of_degree(d, deg_a) {
                let Some(beta) = gamma.checked_div(&alpha) else {
                    continue;
                };
                let c = Rational::from_bigint(gamma.binomial(&alpha));
                entries.insert((alpha, beta), mat.scale(&c));
            }
        }
    }
    LeibnizTable {
        d,
        order: l.order(),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::synthesis::{potential_operator, SynthesisOptions};

    #[test]
    fn product_rule_in_one_dimension() {
        let ddx = OperatorDescriptor::new(1, 1, 1, 1, [(Monomial::new(&[1]), RationalMatrix::identity(1))]).unwrap();
        let t = leibniz_table(&ddx);
        assert_eq!(t.len(), 2);
        assert_eq!(
            t.get(&Monomial::new(&[1]), &Monomial::new(&[0])),
            Some(&RationalMatrix::identity(1))
        );
        assert_eq!(
            t.get(&Monomial::new(&[0]), &Monomial::new(&[1])),
            Some(&RationalMatrix::identity(1))
        );
    }

    #[test]
    fn beta_zero_slice_reproduces_coefficients() {
        let l = potential_operator(&fixtures::symmetric_divergence(2), &SynthesisOptions::default()).unwrap();
        let t = leibniz_table(&l);
        let zero = Monomial::one(2);
        for (alpha, mat) in l.terms() {
            assert_eq!(t.get(alpha, &zero), Some(mat));
        }
        let count = t.entries().filter(|((_, b), _)| *b == zero).count();
        assert_eq!(count, l.terms().count());
    }

    #[test]
    fn second_order_cross_terms() {
        // ∂₁∂₂(χφ) = χ∂₁₂φ + ∂₁χ∂₂φ + ∂₂χ∂₁φ + φ∂₁₂χ.
        let op = OperatorDescriptor::new(2, 2, 1, 1, [(Monomial::new(&[1, 1]), RationalMatrix::identity(1))]).unwrap();
        let t = leibniz_table(&op);
        assert_eq!(t.len(), 4);
        assert!(t.entries().all(|(_, m)| m == &RationalMatrix::identity(1)));
        let lap = leibniz_table(&fixtures::laplacian(2));
        let two = RationalMatrix::identity(1).scale(&Rational::from(2));
        assert_eq!(lap.get(&Monomial::new(&[1, 0]), &Monomial::new(&[1, 0])), Some(&two));
    }
}
