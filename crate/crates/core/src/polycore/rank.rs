use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pmatrix::PolyMatrix;
use super::rational::Rational;

/// Largest absolute coordinate of a lattice sample point.
pub const SAMPLE_RADIUS: i64 = 10;

/// Seeded source of nonzero integer points ξ ∈ {−10..10}^d \ {0}.
#[derive(Debug, Clone)]
pub struct LatticeSampler {
    dim: usize,
    rng: ChaCha8Rng,
}

impl LatticeSampler {
    pub fn new(dim: usize, seed: u64) -> Self {
        LatticeSampler {
            dim,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_integers(&mut self) -> Vec<i64> {
        loop {
            let p: Vec<i64> = (0..self.dim)
                .map(|_| self.rng.random_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS))
                .collect();
            if p.iter().any(|&v| v != 0) {
                return p;
            }
        }
    }

    pub fn next_point(&mut self) -> Vec<Rational> {
        self.next_integers().into_iter().map(Rational::from).collect()
    }
}

/// Ranks of a symbol observed at sampled nonzero lattice points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile {
    pub observed: BTreeSet<usize>,
    pub constant_rank: bool,
    /// One sample point per observed rank, for diagnostics.
    pub witnesses: Vec<(usize, Vec<i64>)>,
}

/// Exact ranks of `m` at `samples` seeded nonzero lattice points.
pub fn rank_profile(m: &PolyMatrix, samples: usize, seed: u64) -> RankProfile {
    assert!(samples >= 1, "rank_profile needs at least one sample");
    let mut sampler = LatticeSampler::new(m.dim(), seed);
    let mut observed = BTreeSet::new();
    let mut witnesses = Vec::new();
    for _ in 0..samples {
        let ints = sampler.next_integers();
        let point: Vec<Rational> = ints.iter().map(|&v| Rational::from(v)).collect();
        let rank = m.eval_rational(&point).rank();
        if observed.insert(rank) {
            witnesses.push((rank, ints));
        }
    }
    RankProfile {
        constant_rank: observed.len() == 1,
        observed,
        witnesses,
    }
}
