use rayon::prelude::*;

use super::triple::PotentialTriple;
use crate::polycore::{LatticeSampler, MultiPoly, PolyMatrix, Rational};

/// Ranks of the three symbols at one sample point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankSample {
    pub point: Vec<i64>,
    pub rank_a: usize,
    pub rank_l: usize,
    pub rank_g: usize,
}

#[derive(Debug, Clone)]
pub struct ExactnessReport {
    /// 𝒜[ξ]ℒ[ξ] is the zero polynomial matrix.
    pub al_zero: bool,
    /// ℒ[ξ]𝒢[ξ] is the zero polynomial matrix.
    pub lg_zero: bool,
    /// A sampled ξ where 𝒜[ξ]ℒ[ξ] ≠ 0, if any.
    pub al_witness: Option<Vec<i64>>,
    pub lg_witness: Option<Vec<i64>>,
    pub samples: usize,
    /// Samples where rank 𝒜 + rank ℒ ≠ N or rank ℒ + rank 𝒢 ≠ N.
    pub rank_failures: Vec<RankSample>,
}

impl ExactnessReport {
    pub fn passed(&self) -> bool {
        self.al_zero && self.lg_zero && self.rank_failures.is_empty()
    }
}

fn draw_points(d: usize, samples: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut sampler = LatticeSampler::new(d, seed);
    (0..samples).map(|_| sampler.next_integers()).collect()
}

fn to_rational(p: &[i64]) -> Vec<Rational> {
    p.iter().map(|&v| Rational::from(v)).collect()
}

fn nonzero_witness(product: &PolyMatrix, points: &[Vec<i64>]) -> Option<Vec<i64>> {
    points
        .iter()
        .find(|p| !product.eval_rational(&to_rational(p)).is_zero())
        .cloned()
}

/// Checks 𝒜ℒ = 0 and ℒ𝒢 = 0 symbolically and the exact-sequence dimension
/// counts at `samples` seeded lattice points. Failures are reported, not raised.
pub fn verify_exactness(t: &PotentialTriple, samples: usize, seed: u64) -> ExactnessReport {
    let points = draw_points(t.d(), samples, seed);
    let al = t.a_symbol().matmul(t.l_symbol()).expect("𝒜ℒ shapes agree");
    let lg = t.l_symbol().matmul(t.g_symbol()).expect("ℒ𝒢 shapes agree");
    let al_zero = al.is_zero();
    let lg_zero = lg.is_zero();
    let n = t.n();
    let ranks: Vec<RankSample> = points
        .par_iter()
        .map(|p| {
            let x = to_rational(p);
            RankSample {
                point: p.clone(),
                rank_a: t.a_symbol().eval_rational(&x).rank(),
                rank_l: t.l_symbol().eval_rational(&x).rank(),
                rank_g: t.g_symbol().eval_rational(&x).rank(),
            }
        })
        .collect();
    ExactnessReport {
        al_zero,
        lg_zero,
        al_witness: if al_zero { None } else { nonzero_witness(&al, &points) },
        lg_witness: if lg_zero { None } else { nonzero_witness(&lg, &points) },
        samples,
        rank_failures: ranks
            .into_iter()
            .filter(|s| s.rank_a + s.rank_l != n || s.rank_l + s.rank_g != n)
            .collect(),
    }
}

/// Positive rational λ with `a == λ·b`; both-zero gives λ = 1.
pub(crate) fn positive_ratio(a: &PolyMatrix, b: &PolyMatrix) -> Option<Rational> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return None;
    }
    match (a.is_zero(), b.is_zero()) {
        (true, true) => return Some(Rational::one()),
        (true, false) | (false, true) => return None,
        _ => {}
    }
    let (pb, (mono, cb)) = b
        .entries()
        .iter()
        .enumerate()
        .find_map(|(idx, p)| p.terms().next().map(|t| (idx, t)))?;
    let lambda = a.entries()[pb].coefficient(mono) / cb;
    (lambda.is_positive() && b.scale(&lambda) == *a).then_some(lambda)
}

#[derive(Debug, Clone)]
pub struct ExpansionReport {
    /// 𝒢 ∝ (−1)^r [a^l_r Id + Σ_{j<r} a^l_j (ℒ*ℒ)^{r−j}] with a positive factor.
    pub g_matches_l_expansion: bool,
    /// 𝒢 ∝ (−1)^r [a^l_r Id + (Σ_{j<r} a^l_j (a^a_r)^{2(r−j)}) (Id − 𝒜†𝒜)], made polynomial.
    pub g_matches_a_expansion: bool,
    /// ℒℒ* = κ (a^a_r)² (Id − 𝒜†𝒜) at every sampled ξ with one constant κ > 0
    /// (κ = 1 for the unnormalized ℒ).
    pub gram_identity_holds: bool,
    /// Normalization factor c with ℒ = c·a_r(Id − 𝒜†𝒜), when ℒ has that form.
    pub l_scale: Option<Rational>,
    /// First differing entry of 𝒢 against the 𝒜-expansion.
    pub mismatch: Option<(usize, usize)>,
    pub samples: usize,
}

impl ExpansionReport {
    pub fn passed(&self) -> bool {
        self.g_matches_l_expansion && self.g_matches_a_expansion && self.gram_identity_holds
    }
}

fn sign_matrix(m: PolyMatrix, r: usize) -> PolyMatrix {
    if r % 2 == 1 {
        m.neg()
    } else {
        m
    }
}

/// Recomputes 𝒢[ξ] from the characteristic data of ℒℒ* and from 𝒜†𝒜 alone and
/// compares both with the synthesized annihilator.
pub fn expand_g_in_a(t: &PotentialTriple, samples: usize, seed: u64) -> ExpansionReport {
    let d = t.d();
    let n = t.n();
    let id = PolyMatrix::identity(d, n);
    let l = t.l_symbol();
    let char_l = t.char_l();
    let r = char_l.rank_index();

    // Route 1: Cayley–Hamilton form in ℒ*ℒ.
    let ltl = l.adjoint().matmul(l).expect("square");
    let mut l_sum = id.mul_poly(char_l.a(r));
    let mut power = id.clone();
    for m in 1..=r {
        power = power.matmul(&ltl).expect("square");
        l_sum = l_sum.add(&power.mul_poly(char_l.a(r - m))).expect("same shape");
    }
    let l_expansion = sign_matrix(l_sum, r);
    let g_matches_l_expansion = positive_ratio(t.g_symbol(), &l_expansion).is_some();

    // Route 2: through 𝒜 only. Λ = s_A Id − P_A 𝒜 = s_A (Id − 𝒜†𝒜).
    let s_a = t.pinv_a().denominator();
    let lambda_sym = id
        .mul_poly(s_a)
        .sub(&t.pinv_a().numerator().matmul(t.a_symbol()).expect("shapes"))
        .expect("shapes");
    let l_scale = positive_ratio(l, &lambda_sym);
    let (g_matches_a_expansion, mismatch) = match &l_scale {
        Some(c) => {
            // (ℒ*ℒ)^m = c^{2m} s_A^{2m−1} Λ for m ≥ 1.
            let c2 = c * c;
            let mut scalar = MultiPoly::zero(d);
            for j in 0..r {
                let m = (r - j) as u32;
                let term = char_l.a(j).mul(&s_a.pow(2 * m - 1)).scale(&c2.pow(m));
                scalar = scalar.add(&term);
            }
            let expansion = sign_matrix(
                id.mul_poly(char_l.a(r))
                    .add(&lambda_sym.mul_poly(&scalar))
                    .expect("shapes"),
                r,
            );
            match positive_ratio(t.g_symbol(), &expansion) {
                Some(_) => (true, None),
                None => (false, t.g_symbol().primitive().first_difference(&expansion.primitive())),
            }
        }
        None => (false, t.g_symbol().first_difference(&lambda_sym)),
    };

    // ℒℒ* = κ s_A Λ at sampled points.
    let llt = l.matmul(&l.adjoint()).expect("square");
    let rhs = lambda_sym.mul_poly(s_a);
    let points = draw_points(d, samples, seed);
    let mut kappa: Option<Rational> = None;
    let mut gram_identity_holds = true;
    for p in &points {
        let x = to_rational(p);
        let lhs_v = llt.eval_rational(&x);
        let rhs_v = rhs.eval_rational(&x);
        if rhs_v.is_zero() {
            gram_identity_holds &= lhs_v.is_zero();
            continue;
        }
        let (idx, denom) = rhs_v
            .entries()
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_zero())
            .expect("nonzero matrix");
        let ratio = &lhs_v.entries()[idx] / denom;
        let k = kappa.get_or_insert_with(|| ratio.clone());
        if !k.is_positive() || *k != ratio || rhs_v.scale(k) != lhs_v {
            gram_identity_holds = false;
        }
    }

    ExpansionReport {
        g_matches_l_expansion,
        g_matches_a_expansion,
        gram_identity_holds,
        l_scale,
        mismatch,
        samples,
    }
}
