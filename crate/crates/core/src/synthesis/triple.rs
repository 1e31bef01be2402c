use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycore::{
    decell_with_char_data, rank_profile, CharPolyData, CharPolyWire, Homogeneity, OperatorDescriptor, OperatorWire,
    PolyMatrix, PolyMatrixWire, ScaledPseudoInverse,
};

/// Sampling parameters for the constant-rank precondition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisOptions {
    pub rank_samples: usize,
    pub seed: u64,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            rank_samples: 64,
            seed: 20_240_917,
        }
    }
}

/// Symbol s·Id − P·M = s·(Id − M†M) of the projector onto ker M[ξ], scaled by
/// the Decell denominator so that it is polynomial, then reduced to coprime
/// integer coefficients.
struct KernelSynthesis {
    symbol: PolyMatrix,
    order: u32,
    pinv: ScaledPseudoInverse,
    char_data: CharPolyData,
}

fn kernel_synthesis(m: &PolyMatrix) -> Result<KernelSynthesis> {
    let k = match m.homogeneity() {
        Homogeneity::Of(k) => k,
        Homogeneity::Zero => 0,
        Homogeneity::Mixed => {
            return Err(Error::InvalidOperator("symbol is not homogeneous".into()));
        }
    };
    let out = decell_with_char_data(m);
    let r = out.char_data.rank_index() as u32;
    let n = m.cols();
    let s_id = PolyMatrix::identity(m.dim(), n).mul_poly(out.pinv.denominator());
    let pm = out.pinv.numerator().matmul(m)?;
    let raw = s_id.sub(&pm)?;
    let symbol = raw.primitive();
    let order = 2 * k * r;
    match symbol.homogeneity() {
        Homogeneity::Zero => {}
        Homogeneity::Of(q) if q == order => {}
        other => {
            return Err(Error::InvalidOperator(format!(
                "synthesized symbol is {other:?}, expected degree {order}"
            )))
        }
    }
    Ok(KernelSynthesis {
        symbol,
        order,
        pinv: out.pinv,
        char_data: out.char_data,
    })
}

fn check_constant_rank(symbol: &PolyMatrix, opts: &SynthesisOptions) -> Result<()> {
    let profile = rank_profile(symbol, opts.rank_samples.max(1), opts.seed);
    if profile.constant_rank {
        Ok(())
    } else {
        Err(Error::NonConstantRank {
            observed: profile.observed.into_iter().collect(),
        })
    }
}

/// Potential operator ℒ with ker 𝒜[ξ] = im ℒ[ξ]: ℒ[ξ] = a_r(ξ)(Id − 𝒜†[ξ]𝒜[ξ]),
/// up to a positive rational normalization.
pub fn potential_operator(a: &OperatorDescriptor, opts: &SynthesisOptions) -> Result<OperatorDescriptor> {
    let symbol = a.symbol();
    if symbol.is_zero() {
        return Err(Error::ZeroOperator);
    }
    check_constant_rank(&symbol, opts)?;
    let ks = kernel_synthesis(&symbol)?;
    if ks.char_data.rank_index() == 0 {
        return Err(Error::ZeroOperator);
    }
    OperatorDescriptor::from_symbol(&ks.symbol, ks.order)
}

/// Annihilator 𝒢 with ker ℒ[ξ] = im 𝒢[ξ], built from ℒ exactly as ℒ is built from 𝒜.
/// A zero ℒ is allowed and yields 𝒢 = Id.
pub fn annihilator_operator(l: &OperatorDescriptor, opts: &SynthesisOptions) -> Result<OperatorDescriptor> {
    let symbol = l.symbol();
    check_constant_rank(&symbol, opts)?;
    let ks = kernel_synthesis(&symbol)?;
    OperatorDescriptor::from_symbol(&ks.symbol, ks.order)
}

/// The synthesized chain W →𝒢 W →ℒ W →𝒜 V with cached symbols, characteristic
/// data and pseudo-inverses.
#[derive(Debug, Clone)]
pub struct PotentialTriple {
    a: OperatorDescriptor,
    l: OperatorDescriptor,
    g: OperatorDescriptor,
    a_symbol: PolyMatrix,
    l_symbol: PolyMatrix,
    g_symbol: PolyMatrix,
    char_a: CharPolyData,
    char_l: CharPolyData,
    pinv_a: ScaledPseudoInverse,
    pinv_l: ScaledPseudoInverse,
}

impl PotentialTriple {
    /// Synthesizes ℒ and 𝒢 from a constant-rank operator 𝒜.
    pub fn synthesize(a: &OperatorDescriptor, opts: &SynthesisOptions) -> Result<Self> {
        let a_symbol = a.symbol();
        if a_symbol.is_zero() {
            return Err(Error::ZeroOperator);
        }
        check_constant_rank(&a_symbol, opts)?;
        let ka = kernel_synthesis(&a_symbol)?;
        if ka.char_data.rank_index() == 0 {
            return Err(Error::ZeroOperator);
        }
        let l = OperatorDescriptor::from_symbol(&ka.symbol, ka.order)?;
        check_constant_rank(&ka.symbol, opts)?;
        let kl = kernel_synthesis(&ka.symbol)?;
        let g = OperatorDescriptor::from_symbol(&kl.symbol, kl.order)?;
        Ok(PotentialTriple {
            a: a.clone(),
            l,
            g,
            a_symbol,
            l_symbol: ka.symbol,
            g_symbol: kl.symbol,
            char_a: ka.char_data,
            char_l: kl.char_data,
            pinv_a: ka.pinv,
            pinv_l: kl.pinv,
        })
    }

    /// Assembles a triple from given operators without checking exactness;
    /// characteristic data and pseudo-inverses are recomputed from 𝒜 and ℒ.
    pub fn from_operators(a: OperatorDescriptor, l: OperatorDescriptor, g: OperatorDescriptor) -> Result<Self> {
        if l.domain_dim() != a.domain_dim() || l.target_dim() != a.domain_dim() {
            return Err(Error::DimensionMismatch(format!(
                "ℒ must be {n}x{n} for 𝒜 with N = {n}",
                n = a.domain_dim()
            )));
        }
        if g.domain_dim() != l.domain_dim() || g.target_dim() != l.domain_dim() {
            return Err(Error::DimensionMismatch(
                "𝒢 must be square with ℒ's fiber dimension".into(),
            ));
        }
        if a.d() != l.d() || l.d() != g.d() {
            return Err(Error::DimensionMismatch(
                "operators act on different space dimensions".into(),
            ));
        }
        let a_symbol = a.symbol();
        let l_symbol = l.symbol();
        let g_symbol = g.symbol();
        let da = decell_with_char_data(&a_symbol);
        let dl = decell_with_char_data(&l_symbol);
        Ok(PotentialTriple {
            a,
            l,
            g,
            a_symbol,
            l_symbol,
            g_symbol,
            char_a: da.char_data,
            char_l: dl.char_data,
            pinv_a: da.pinv,
            pinv_l: dl.pinv,
        })
    }

    pub fn a(&self) -> &OperatorDescriptor {
        &self.a
    }

    pub fn l(&self) -> &OperatorDescriptor {
        &self.l
    }

    pub fn g(&self) -> &OperatorDescriptor {
        &self.g
    }

    pub fn a_symbol(&self) -> &PolyMatrix {
        &self.a_symbol
    }

    pub fn l_symbol(&self) -> &PolyMatrix {
        &self.l_symbol
    }

    pub fn g_symbol(&self) -> &PolyMatrix {
        &self.g_symbol
    }

    /// Characteristic data of 𝒜[ξ]𝒜*[ξ].
    pub fn char_a(&self) -> &CharPolyData {
        &self.char_a
    }

    /// Characteristic data of ℒ[ξ]ℒ*[ξ].
    pub fn char_l(&self) -> &CharPolyData {
        &self.char_l
    }

    pub fn pinv_a(&self) -> &ScaledPseudoInverse {
        &self.pinv_a
    }

    pub fn pinv_l(&self) -> &ScaledPseudoInverse {
        &self.pinv_l
    }

    pub fn d(&self) -> usize {
        self.a.d()
    }

    /// Fiber dimension N of potentials and of 𝒜's domain.
    pub fn n(&self) -> usize {
        self.a.domain_dim()
    }

    pub fn k(&self) -> u32 {
        self.a.order()
    }

    /// Order l of ℒ (the homogeneity degree of ℒ[ξ]).
    pub fn l_order(&self) -> u32 {
        self.l.order()
    }

    pub fn g_order(&self) -> u32 {
        self.g.order()
    }

    /// l = 2k·r^a.
    pub fn degree_law_l(&self) -> bool {
        self.l_order() == 2 * self.k() * self.char_a.rank_index() as u32
    }

    /// deg 𝒢 = 2l·r^l.
    pub fn degree_law_g(&self) -> bool {
        self.g_order() == 2 * self.l_order() * self.char_l.rank_index() as u32
    }

    pub fn g_is_symmetric(&self) -> bool {
        self.g_symbol.adjoint() == self.g_symbol
    }

    pub fn to_json(&self) -> String {
        let wire = TripleWire {
            a: self.a.to_wire(),
            l: self.l.to_wire(),
            g: self.g.to_wire(),
            k: self.k(),
            l_order: self.l_order(),
            g_order: self.g_order(),
            char_a: self.char_a.to_wire(),
            char_l: self.char_l.to_wire(),
            symbols: SymbolsWire {
                a: self.a_symbol.to_wire(),
                l: self.l_symbol.to_wire(),
                g: self.g_symbol.to_wire(),
            },
        };
        let mut s = serde_json::to_string_pretty(&wire).expect("serializable");
        s.push('\n');
        s
    }

    /// Reads a triple; only the operators are trusted, everything else is recomputed.
    pub fn from_json(s: &str) -> Result<Self> {
        let wire: TripleWireIn = serde_json::from_str(s)?;
        Self::from_operators(
            OperatorDescriptor::from_wire(&wire.a, false)?,
            OperatorDescriptor::from_wire(&wire.l, true)?,
            OperatorDescriptor::from_wire(&wire.g, true)?,
        )
    }

    /// Human-readable synthesis summary.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let ra = self.char_a.rank_index();
        let rl = self.char_l.rank_index();
        out.push_str(&format!(
            "operator A: d = {}, k = {}, N = {}, m = {}\n",
            self.d(),
            self.k(),
            self.n(),
            self.a.target_dim()
        ));
        out.push_str(&format!(
            "rank index r^a = {ra}, a^a_r = {}\n",
            self.char_a.last_nonzero()
        ));
        out.push_str(&format!(
            "potential L: order l = {} (2k·r^a = {}){}\n",
            self.l_order(),
            2 * self.k() * ra as u32,
            if self.l_order() != 2 * self.k() {
                "; differs from 2k"
            } else {
                ""
            }
        ));
        out.push_str(&format!("L[xi] =\n{}\n", matrix_text(&self.l_symbol)));
        out.push_str(&format!("rank index r^l = {rl}\n"));
        out.push_str(&format!(
            "annihilator G: order {} (2l·r^l = {}), symmetric: {}\n",
            self.g_order(),
            2 * self.l_order() * rl as u32,
            self.g_is_symmetric()
        ));
        out.push_str(&format!("G[xi] =\n{}\n", matrix_text(&self.g_symbol)));
        out
    }
}

fn matrix_text(m: &PolyMatrix) -> String {
    (0..m.rows())
        .map(|i| {
            let row: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
            format!("  [{}]", row.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Serialize)]
struct SymbolsWire {
    #[serde(rename = "A")]
    a: PolyMatrixWire,
    #[serde(rename = "L")]
    l: PolyMatrixWire,
    #[serde(rename = "G")]
    g: PolyMatrixWire,
}

#[derive(Serialize)]
struct TripleWire {
    #[serde(rename = "A")]
    a: OperatorWire,
    #[serde(rename = "L")]
    l: OperatorWire,
    #[serde(rename = "G")]
    g: OperatorWire,
    k: u32,
    l_order: u32,
    g_order: u32,
    char_a: CharPolyWire,
    char_l: CharPolyWire,
    symbols: SymbolsWire,
}

#[derive(Deserialize)]
struct TripleWireIn {
    #[serde(rename = "A")]
    a: OperatorWire,
    #[serde(rename = "L")]
    l: OperatorWire,
    #[serde(rename = "G")]
    g: OperatorWire,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::polycore::MultiPoly;

    fn xi(i: usize) -> MultiPoly {
        MultiPoly::var(2, i)
    }

    fn norm2() -> MultiPoly {
        xi(0).mul(&xi(0)).add(&xi(1).mul(&xi(1)))
    }

    fn outer() -> PolyMatrix {
        PolyMatrix::from_fn(2, 2, 2, |i, j| xi(i).mul(&xi(j)))
    }

    #[test]
    fn divergence_potential_is_norm_minus_outer_product() {
        let l = potential_operator(&fixtures::divergence(2), &SynthesisOptions::default()).unwrap();
        let expected = PolyMatrix::identity(2, 2).mul_poly(&norm2()).sub(&outer()).unwrap();
        assert_eq!(l.symbol(), expected);
        assert_eq!(l.order(), 2);
    }

    #[test]
    fn divergence_annihilator_is_norm_times_outer_product() {
        let t = PotentialTriple::synthesize(&fixtures::divergence(2), &SynthesisOptions::default()).unwrap();
        let simplified = outer().mul_poly(&norm2());
        let displayed = outer()
            .mul_poly(&norm2())
            .scale(&crate::polycore::Rational::from(2))
            .sub(&outer().matmul(&outer()).unwrap())
            .unwrap();
        assert_eq!(t.g_symbol(), &simplified);
        assert_eq!(t.g_symbol(), &displayed);
        assert_eq!(t.g_order(), 4);
        assert!(t.degree_law_l() && t.degree_law_g());
    }

    #[test]
    fn injective_operator_has_zero_potential() {
        let t = PotentialTriple::synthesize(&fixtures::identity(2, 2), &SynthesisOptions::default()).unwrap();
        assert!(t.l().is_zero());
        assert_eq!(t.l_order(), 0);
        assert_eq!(t.g_symbol(), &PolyMatrix::identity(2, 2));
    }

    #[test]
    fn full_rank_potential_has_zero_annihilator() {
        let g = annihilator_operator(&fixtures::identity(2, 3), &SynthesisOptions::default()).unwrap();
        assert!(g.is_zero());
    }

    #[test]
    fn divergence_in_three_dimensions() {
        let t = PotentialTriple::synthesize(&fixtures::divergence(3), &SynthesisOptions::default()).unwrap();
        let x = |i| MultiPoly::var(3, i);
        let n2 = (0..3).fold(MultiPoly::zero(3), |acc, i| acc.add(&x(i).mul(&x(i))));
        let expected = PolyMatrix::identity(3, 3)
            .mul_poly(&n2)
            .sub(&PolyMatrix::from_fn(3, 3, 3, |i, j| x(i).mul(&x(j))))
            .unwrap();
        assert_eq!(t.l_symbol(), &expected);
        assert!(t.a_symbol().matmul(t.l_symbol()).unwrap().is_zero());
    }

    #[test]
    fn non_constant_rank_is_rejected() {
        let diag = OperatorDescriptor::new(
            2,
            1,
            2,
            2,
            [
                (
                    crate::polycore::Monomial::new(&[1, 0]),
                    crate::polycore::RationalMatrix::from_i64(&[&[1, 0], &[0, 0]]),
                ),
                (
                    crate::polycore::Monomial::new(&[0, 1]),
                    crate::polycore::RationalMatrix::from_i64(&[&[0, 0], &[0, 1]]),
                ),
            ],
        )
        .unwrap();
        let err = potential_operator(&diag, &SynthesisOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NonConstantRank { .. }), "{err}");
    }

    #[test]
    fn curl3_has_rank_index_two() {
        let t = PotentialTriple::synthesize(&fixtures::curl3(), &SynthesisOptions::default()).unwrap();
        assert_eq!(t.char_a().rank_index(), 2);
        assert_eq!(t.l_order(), 4);
        assert_eq!(t.g_order(), 8);
        assert!(t.degree_law_l() && t.degree_law_g());
    }

    #[test]
    fn json_round_trip() {
        let t = PotentialTriple::synthesize(&fixtures::curl2(), &SynthesisOptions::default()).unwrap();
        let back = PotentialTriple::from_json(&t.to_json()).unwrap();
        assert_eq!(back.to_json(), t.to_json());
    }
}
