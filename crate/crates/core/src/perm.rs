//! Permutations of `[n]` derived from short seeds.
//!
//! `PrfShuffle` keys ChaCha20 with the seed bits (little-endian bytes,
//! zero-padded to 32 bytes, longer seeds XOR-folded), selects stream
//! [`PRF_STREAM`], and runs Fisher–Yates from the last position down, drawing
//! each swap index with [`uniform_below`]. Its dependence parameter is not
//! certified and is reported as assumed.
//!
//! `ExactTinyRejection` (n ≤ 8) maps the seed, read as an integer, to the
//! permutation of that rank modulo `n!` in lexicographic order. Seeds are
//! drawn by rejection below the largest multiple of `n!` that fits in the seed
//! space, so every permutation is exactly equally likely.
//!
//! `Identity` always returns the identity and serves as a degenerate control.

use std::collections::HashMap;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitWord;
use crate::confidence_radius;
use crate::dist::DEFAULT_ETA;
use crate::error::{Error, Result};
use crate::inner::combinations;
use crate::report::{CheckMode, PropertyReport};
use crate::rng::{random_word, uniform_below, RngSeed};

/// ChaCha20 stream id used by the shuffle (`"perm"` in ASCII).
pub const PRF_STREAM: u64 = 0x7065_726d;

/// Largest domain for the exact table backend.
pub const MAX_EXACT_TINY: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermBackend {
    PrfShuffle,
    ExactTinyRejection,
    Identity,
}

/// Domain size, independence order, seed length and backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermSpec {
    pub n: usize,
    pub ell: usize,
    pub seed_bits: usize,
    pub backend: PermBackend,
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

impl PermSpec {
    pub fn new(n: usize, ell: usize, seed_bits: usize, backend: PermBackend) -> Result<Self> {
        if n == 0 || n > u32::MAX as usize {
            return Err(Error::InvalidParams(format!("domain size {n}")));
        }
        if ell > n {
            return Err(Error::InvalidParams(format!("ℓ = {ell} exceeds n = {n}")));
        }
        if backend == PermBackend::ExactTinyRejection {
            if n > MAX_EXACT_TINY {
                return Err(Error::InvalidParams(format!("exact table backend needs n ≤ {MAX_EXACT_TINY}")));
            }
            if seed_bits > 62 || (1u64 << seed_bits) < factorial(n) {
                return Err(Error::InvalidParams(format!(
                    "exact table backend needs 2^k1 ≥ n! = {} and k1 ≤ 62",
                    factorial(n)
                )));
            }
        }
        Ok(Self { n, ell, seed_bits, backend })
    }

    /// How the dependence parameter is justified.
    pub fn delta_status(&self) -> &'static str {
        match self.backend {
            PermBackend::PrfShuffle => "assumed (keyed Fisher–Yates shuffle, heuristic)",
            PermBackend::ExactTinyRejection => "exact (uniform over all n! permutations)",
            PermBackend::Identity => "degenerate (identity control)",
        }
    }

    /// Number of seeds accepted by [`PermSpec::sample_seed`].
    pub fn accepted_seeds(&self) -> u128 {
        let space = 1u128 << self.seed_bits.min(127);
        match self.backend {
            PermBackend::ExactTinyRejection => {
                let f = factorial(self.n) as u128;
                space / f * f
            }
            _ => space,
        }
    }

    /// A seed distributed so that the derived permutation has its intended law.
    pub fn sample_seed<R: RngCore + ?Sized>(&self, rng: &mut R) -> BitWord {
        loop {
            let z = random_word(rng, self.seed_bits);
            if self.backend != PermBackend::ExactTinyRejection || (z.to_u64() as u128) < self.accepted_seeds() {
                return z;
            }
        }
    }
}

/// A bijection on `[n]` with its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PermRepr", into = "PermRepr")]
pub struct Permutation {
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PermRepr {
    forward: Vec<u32>,
}

impl TryFrom<PermRepr> for Permutation {
    type Error = Error;
    fn try_from(r: PermRepr) -> Result<Self> {
        Permutation::new(r.forward)
    }
}

impl From<Permutation> for PermRepr {
    fn from(p: Permutation) -> Self {
        PermRepr { forward: p.forward }
    }
}

impl Permutation {
    /// Checks bijectivity.
    pub fn new(forward: Vec<u32>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![u32::MAX; n];
        for (i, &f) in forward.iter().enumerate() {
            if f as usize >= n || inverse[f as usize] != u32::MAX {
                return Err(Error::InvalidParams(format!("not a permutation: {forward:?}")));
            }
            inverse[f as usize] = i as u32;
        }
        Ok(Self { forward, inverse })
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n as u32).collect()).expect("identity is a bijection")
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[u32] {
        &self.forward
    }

    pub fn inverse(&self) -> &[u32] {
        &self.inverse
    }

    /// `Π(x)`: input bit `i` moves to position `forward[i]`.
    pub fn apply(&self, x: &BitWord) -> Result<BitWord> {
        self.check(x)?;
        let mut out = BitWord::zeros(x.len());
        for (i, &f) in self.forward.iter().enumerate() {
            if x.get(i) {
                out.set(f as usize, true);
            }
        }
        Ok(out)
    }

    /// `Π^{-1}(x)`: output bit `i` is input bit `forward[i]`.
    pub fn invert(&self, x: &BitWord) -> Result<BitWord> {
        self.check(x)?;
        let mut out = BitWord::zeros(x.len());
        for (i, &f) in self.forward.iter().enumerate() {
            if x.get(f as usize) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// [`Permutation::apply`] on a packed word of at most 64 bits.
    pub fn apply_u64(&self, x: u64) -> u64 {
        self.forward.iter().enumerate().fold(0, |acc, (i, &f)| acc | (x >> i & 1) << f)
    }

    /// [`Permutation::invert`] on a packed word of at most 64 bits.
    pub fn invert_u64(&self, x: u64) -> u64 {
        self.forward.iter().enumerate().fold(0, |acc, (i, &f)| acc | (x >> f & 1) << i)
    }

    fn check(&self, x: &BitWord) -> Result<()> {
        if x.len() != self.forward.len() {
            return Err(Error::LengthMismatch { expected: self.forward.len(), actual: x.len() });
        }
        Ok(())
    }
}

/// The permutation of rank `rank` (< n!) in lexicographic order.
pub fn nth_permutation(n: usize, mut rank: u64) -> Vec<u32> {
    let mut pool: Vec<u32> = (0..n as u32).collect();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let f = factorial(i);
        out.push(pool.remove((rank / f) as usize));
        rank %= f;
    }
    out
}

fn prf_key(z: &BitWord) -> [u8; 32] {
    let mut key = [0u8; 32];
    for (i, b) in z.to_bytes().into_iter().enumerate() {
        key[i % 32] ^= b;
    }
    key
}

/// `Perm(z)`.
pub fn derive_permutation(spec: &PermSpec, z: &BitWord) -> Result<Permutation> {
    if z.len() != spec.seed_bits {
        return Err(Error::LengthMismatch { expected: spec.seed_bits, actual: z.len() });
    }
    let forward = match spec.backend {
        PermBackend::Identity => (0..spec.n as u32).collect(),
        PermBackend::ExactTinyRejection => nth_permutation(spec.n, z.to_u64() % factorial(spec.n)),
        PermBackend::PrfShuffle => {
            let mut rng = ChaCha20Rng::from_seed(prf_key(z));
            rng.set_stream(PRF_STREAM);
            let mut a: Vec<u32> = (0..spec.n as u32).collect();
            for i in (1..spec.n).rev() {
                let j = uniform_below(&mut rng, i as u64 + 1) as usize;
                a.swap(i, j);
            }
            a
        }
    };
    Permutation::new(forward)
}

fn falling_factorial(n: usize, ell: usize) -> u128 {
    (0..ell).map(|i| (n - i) as u128).product()
}

/// `½ Σ |c/total − 1/P|` over all `P = n!/(n−ℓ)!` injective tuples.
fn tuple_distance(counts: &HashMap<Vec<u32>, u64>, total: u64, n: usize, ell: usize) -> f64 {
    let p = falling_factorial(n, ell) as f64;
    let seen: f64 = counts.values().map(|&c| (c as f64 / total as f64 - 1.0 / p).abs()).sum();
    let unseen = (p - counts.len() as f64) / p;
    0.5 * (seen + unseen)
}

fn index_sets(n: usize, ell: usize, max_sets: usize, rng: &mut impl RngCore) -> Vec<Vec<usize>> {
    let all = combinations(n, ell);
    if all.len() <= max_sets {
        return all;
    }
    (0..max_sets).map(|_| all[uniform_below(rng, all.len() as u64) as usize].clone()).collect()
}

/// Index sets examined per dependence test.
pub const MAX_INDEX_SETS: usize = 64;

/// For up to [`MAX_INDEX_SETS`] index sets `T` of size `ell`, compares the
/// empirical law of `(Π(t))_{t∈T}` over `trials` seeds with the uniform
/// permutation's marginal. Passes when the largest distance is at most
/// `delta` plus the confidence radius.
pub fn test_lwise_dependence(
    spec: &PermSpec,
    ell: usize,
    trials: u64,
    delta: f64,
    seed: &RngSeed,
) -> Result<PropertyReport> {
    if ell == 0 || ell > spec.n {
        return Err(Error::InvalidParams(format!("ℓ = {ell} outside 1..=n")));
    }
    if trials == 0 {
        return Err(Error::EmptySamples);
    }
    let mut rng = seed.rng();
    let sets = index_sets(spec.n, ell, MAX_INDEX_SETS, &mut rng);
    let mut counts: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); sets.len()];
    for _ in 0..trials {
        let p = derive_permutation(spec, &spec.sample_seed(&mut rng))?;
        for (set, c) in sets.iter().zip(counts.iter_mut()) {
            *c.entry(set.iter().map(|&t| p.forward[t]).collect()).or_insert(0) += 1;
        }
    }
    let (d, worst) = sets
        .iter()
        .zip(&counts)
        .map(|(s, c)| (tuple_distance(c, trials, spec.n, ell), s))
        .fold((0.0, &sets[0]), |a, b| if b.0 > a.0 { b } else { a });
    let radius = confidence_radius(trials, DEFAULT_ETA);
    Ok(PropertyReport::new(
        format!("{ell}-wise dependence ≤ {delta} ({})", spec.delta_status()),
        CheckMode::Sampled { samples: trials, radius },
        sets.len() as u64,
        d,
        delta,
        format!("index set {worst:?}: distance {d}"),
        d <= delta + radius,
    ))
}

/// Exact dependence over every accepted seed and every index set of size `ell`.
pub fn exact_lwise_distance(spec: &PermSpec, ell: usize, guard: u128) -> Result<f64> {
    let seeds = spec.accepted_seeds();
    let sets = combinations(spec.n, ell);
    let work = seeds * sets.len() as u128;
    if work > guard || spec.seed_bits > 64 {
        return Err(Error::GuardExceeded { what: "exact dependence sweep".into(), size: work, guard });
    }
    let mut counts: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); sets.len()];
    for z in 0..seeds as u64 {
        let p = derive_permutation(spec, &BitWord::from_u64(z, spec.seed_bits))?;
        for (set, c) in sets.iter().zip(counts.iter_mut()) {
            *c.entry(set.iter().map(|&t| p.forward[t]).collect()).or_insert(0) += 1;
        }
    }
    Ok(counts.iter().map(|c| tuple_distance(c, seeds as u64, spec.n, ell)).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_table() {
        assert_eq!(nth_permutation(3, 0), vec![0, 1, 2]);
        assert_eq!(nth_permutation(3, 5), vec![2, 1, 0]);
        let mut all: Vec<_> = (0..6).map(|r| nth_permutation(3, r)).collect();
        all.dedup();
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn exact_tiny_hits_table_uniformly() {
        let spec = PermSpec::new(3, 3, 4, PermBackend::ExactTinyRejection).unwrap();
        assert_eq!(spec.accepted_seeds(), 12);
        let mut hits = HashMap::new();
        for z in 0..12 {
            let p = derive_permutation(&spec, &BitWord::from_u64(z, 4)).unwrap();
            *hits.entry(p.forward().to_vec()).or_insert(0) += 1;
        }
        assert_eq!(hits.len(), 6);
        assert!(hits.values().all(|&c| c == 2));
        assert_eq!(exact_lwise_distance(&spec, 2, 1 << 20).unwrap(), 0.0);
    }

    #[test]
    fn swap_and_round_trip() {
        let p = Permutation::new(vec![1, 0]).unwrap();
        let x = BitWord::from_bit_str("10").unwrap();
        assert_eq!(p.apply(&x).unwrap().to_string(), "01");
        let spec = PermSpec::new(40, 2, 128, PermBackend::PrfShuffle).unwrap();
        let mut rng = RngSeed::from_u64(8).rng();
        for _ in 0..200 {
            let p = derive_permutation(&spec, &spec.sample_seed(&mut rng)).unwrap();
            let x = random_word(&mut rng, 40);
            assert_eq!(p.invert(&p.apply(&x).unwrap()).unwrap(), x);
            assert_eq!(p.apply(&x).unwrap().to_u64(), p.apply_u64(x.to_u64()));
            assert_eq!(p.invert(&x).unwrap().to_u64(), p.invert_u64(x.to_u64()));
        }
    }

    #[test]
    fn derivation_is_deterministic() {
        let spec = PermSpec::new(32, 1, 3, PermBackend::PrfShuffle).unwrap();
        let z = BitWord::from_u64(5, 3);
        assert_eq!(derive_permutation(&spec, &z).unwrap(), derive_permutation(&spec, &z).unwrap());
        assert!(derive_permutation(&spec, &BitWord::from_u64(5, 4)).is_err());
    }

    #[test]
    fn identity_control_fails() {
        let spec = PermSpec::new(4, 1, 16, PermBackend::Identity).unwrap();
        let r = test_lwise_dependence(&spec, 1, 1000, 0.01, &RngSeed::from_u64(1)).unwrap();
        assert!(!r.pass);
        assert!((r.worst_value - 0.75).abs() < 1e-12);
    }

    #[test]
    fn bad_permutations_rejected() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(serde_json::from_str::<Permutation>(r#"{"forward":[2,0]}"#).is_err());
        let p: Permutation = serde_json::from_str(r#"{"forward":[2,0,1]}"#).unwrap();
        assert_eq!(p.inverse(), &[1, 2, 0]);
    }
}
