//! Sampling, encoding and decoding of the probabilistic inner code.

use std::collections::{HashMap, HashSet};

use rand::RngCore;

use crate::bits::BitWord;
use crate::error::{Error, Result};
use crate::rng::{uniform_below, uniform_bits, RngSeed};
use crate::scheme::CodingScheme;
use crate::symbol::Symbol;

use super::params::InnerParams;

/// Consecutive rejected draws tolerated before sampling gives up.
pub const REJECTION_BUDGET: u64 = 1 << 16;

/// Block lengths up to this use a dense `2^n` decode table.
const DENSE_DECODE_BITS: usize = 22;

/// Block lengths up to this track removed words in a `2^n`-bit bitmap.
const DENSE_REMOVED_BITS: usize = 26;

#[derive(Clone, Debug)]
enum DecodeTable {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

const NO_MESSAGE: u32 = u32::MAX;

/// A sampled inner code. Codewords of message `s` are
/// `codebook[s·t .. (s+1)·t]`, with `s` read as an integer (bit `i` weighted `2^i`).
#[derive(Clone, Debug)]
pub struct InnerCode {
    params: InnerParams,
    seed: RngSeed,
    codebook: Vec<u64>,
    decode: DecodeTable,
}

enum Removed {
    Bitmap(Vec<u64>),
    Set(HashSet<u64>),
}

impl Removed {
    fn new(n: usize) -> Self {
        if n <= DENSE_REMOVED_BITS {
            Removed::Bitmap(vec![0; (1usize << n).div_ceil(64)])
        } else {
            Removed::Set(HashSet::new())
        }
    }

    fn contains(&self, w: u64) -> bool {
        match self {
            Removed::Bitmap(b) => (b[(w / 64) as usize] >> (w % 64)) & 1 == 1,
            Removed::Set(s) => s.contains(&w),
        }
    }

    fn insert(&mut self, w: u64) {
        match self {
            Removed::Bitmap(b) => b[(w / 64) as usize] |= 1 << (w % 64),
            Removed::Set(s) => {
                s.insert(w);
            }
        }
    }
}

/// Calls `visit` on every word within Hamming distance `r` of `center`.
pub(crate) fn for_each_in_ball(center: u64, n: usize, r: usize, visit: &mut impl FnMut(u64)) {
    fn rec(w: u64, start: usize, n: usize, left: usize, visit: &mut impl FnMut(u64)) {
        visit(w);
        if left == 0 {
            return;
        }
        for i in start..n {
            rec(w ^ (1 << i), i + 1, n, left - 1, visit);
        }
    }
    rec(center, 0, n, r, visit);
}

impl InnerCode {
    /// Samples the code: messages in increasing order, `t` codewords each,
    /// every codeword uniform over words not yet removed, then removing its
    /// Hamming ball of radius `⌊δn⌋`.
    pub fn sample(params: InnerParams, seed: &RngSeed) -> Result<Self> {
        let n = params.n;
        let r = params.radius();
        let mut rng = seed.rng();
        let mut removed = Removed::new(n);
        let mut codebook = Vec::with_capacity(params.codebook_size() as usize);
        for index in 0..params.codebook_size() {
            let mut rejections = 0;
            let w = loop {
                let w = uniform_bits(&mut rng, n);
                if !removed.contains(w) {
                    break w;
                }
                rejections += 1;
                if rejections == REJECTION_BUDGET {
                    return Err(Error::RejectionBudget { budget: REJECTION_BUDGET, index });
                }
            };
            for_each_in_ball(w, n, r, &mut |v| removed.insert(v));
            codebook.push(w);
        }
        Self::from_codebook(params, *seed, codebook)
    }

    /// Builds a code from an explicit codebook, checking distinctness and the
    /// distance invariant.
    pub fn from_codebook(params: InnerParams, seed: RngSeed, codebook: Vec<u64>) -> Result<Self> {
        if codebook.len() as u64 != params.codebook_size() {
            return Err(Error::InvalidParams(format!(
                "codebook has {} words, expected {}",
                codebook.len(),
                params.codebook_size()
            )));
        }
        let n = params.n;
        let t = params.t as usize;
        let mut decode = if n <= DENSE_DECODE_BITS {
            DecodeTable::Dense(vec![NO_MESSAGE; 1 << n])
        } else {
            DecodeTable::Sparse(HashMap::with_capacity(codebook.len()))
        };
        for (i, &w) in codebook.iter().enumerate() {
            if w >> n != 0 {
                return Err(Error::InvalidParams(format!("codeword {w:#x} exceeds {n} bits")));
            }
            let msg = (i / t) as u32;
            let clash = match &mut decode {
                DecodeTable::Dense(d) => std::mem::replace(&mut d[w as usize], msg) != NO_MESSAGE,
                DecodeTable::Sparse(d) => d.insert(w, msg).is_some(),
            };
            if clash {
                return Err(Error::InvalidParams(format!("duplicate codeword {w:#x}")));
            }
        }
        let code = Self { params, seed, codebook, decode };
        let r = params.radius();
        if r > 0 {
            for &w in &code.codebook {
                let mut bad = None;
                for_each_in_ball(w, n, r, &mut |v| {
                    if v != w && code.decode_u64(v).is_some() {
                        bad = Some(v);
                    }
                });
                if let Some(v) = bad {
                    return Err(Error::InvalidParams(format!(
                        "codewords {w:#x} and {v:#x} are within distance {r}"
                    )));
                }
            }
        }
        Ok(code)
    }

    pub fn params(&self) -> &InnerParams {
        &self.params
    }

    pub fn seed(&self) -> &RngSeed {
        &self.seed
    }

    /// All codewords, message-major.
    pub fn codebook(&self) -> &[u64] {
        &self.codebook
    }

    /// `E(s)` for message index `s`.
    pub fn codewords_of(&self, s: u64) -> &[u64] {
        let t = self.params.t as usize;
        &self.codebook[s as usize * t..(s as usize + 1) * t]
    }

    /// The `i`-th codeword of message index `s`.
    pub fn encode_index(&self, s: u64, i: u64) -> u64 {
        self.codebook[(s * self.params.t + i) as usize]
    }

    /// Uniform element of `E(s)`.
    pub fn encode_u64<R: RngCore + ?Sized>(&self, s: u64, rng: &mut R) -> u64 {
        self.encode_index(s, uniform_below(rng, self.params.t))
    }

    /// Message index of `w`, or `None` for ⊥.
    pub fn decode_u64(&self, w: u64) -> Option<u64> {
        let m = match &self.decode {
            DecodeTable::Dense(d) => d.get(w as usize).copied().unwrap_or(NO_MESSAGE),
            DecodeTable::Sparse(d) => d.get(&w).copied().unwrap_or(NO_MESSAGE),
        };
        (m != NO_MESSAGE).then_some(m as u64)
    }

    fn check_message(&self, s: &BitWord) -> Result<()> {
        if s.len() != self.params.k {
            return Err(Error::LengthMismatch { expected: self.params.k, actual: s.len() });
        }
        Ok(())
    }

    /// Uniform element of `E(s)`.
    pub fn encode<R: RngCore + ?Sized>(&self, s: &BitWord, rng: &mut R) -> Result<BitWord> {
        self.check_message(s)?;
        Ok(BitWord::from_u64(self.encode_u64(s.to_u64(), rng), self.params.n))
    }

    /// The unique `s` with `w ∈ E(s)`, or ⊥.
    pub fn decode(&self, w: &BitWord) -> Result<Symbol> {
        if w.len() != self.params.n {
            return Err(Error::LengthMismatch { expected: self.params.n, actual: w.len() });
        }
        Ok(match self.decode_u64(w.to_u64()) {
            Some(m) => Symbol::Message(BitWord::from_u64(m, self.params.k)),
            None => Symbol::Bottom,
        })
    }

    /// Smallest pairwise Hamming distance, by checking all pairs.
    pub fn min_pairwise_distance(&self) -> Option<u32> {
        let mut best = None;
        for (i, a) in self.codebook.iter().enumerate() {
            for b in &self.codebook[i + 1..] {
                let d = (a ^ b).count_ones();
                best = Some(best.map_or(d, |x: u32| x.min(d)));
            }
        }
        best
    }
}

impl CodingScheme for InnerCode {
    fn message_bits(&self) -> usize {
        self.params.k
    }

    fn codeword_bits(&self) -> usize {
        self.params.n
    }

    fn coin_space(&self, _s: &BitWord) -> u128 {
        self.params.t as u128
    }

    fn encode_with_coins(&self, s: &BitWord, coins: u128) -> Result<BitWord> {
        self.check_message(s)?;
        if coins >= self.params.t as u128 {
            return Err(Error::InvalidParams(format!("coin value {coins} ≥ t")));
        }
        Ok(BitWord::from_u64(self.encode_index(s.to_u64(), coins as u64), self.params.n))
    }

    fn decode(&self, w: &BitWord) -> Result<Symbol> {
        InnerCode::decode(self, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_code_is_total() {
        let p = InnerParams::new_unpacked(4, 4, 1, 0, 1).unwrap();
        let c = InnerCode::sample(p, &RngSeed::from_u64(1)).unwrap();
        assert!((0..16).all(|w| c.decode_u64(w).is_some()));
        let mut sorted = c.codebook().to_vec();
        sorted.sort();
        assert_eq!(sorted, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn small_code_counts() {
        let p = InnerParams::new(4, 1, 2, 0, 1).unwrap();
        let c = InnerCode::sample(p, &RngSeed::from_u64(2)).unwrap();
        assert_eq!((0..16).filter(|&w| c.decode_u64(w).is_some()).count(), 4);
    }

    #[test]
    fn deterministic_in_seed() {
        let p = InnerParams::new(10, 3, 8, 0, 1).unwrap();
        let a = InnerCode::sample(p, &RngSeed::from_u64(5)).unwrap();
        let b = InnerCode::sample(p, &RngSeed::from_u64(5)).unwrap();
        let c = InnerCode::sample(p, &RngSeed::from_u64(6)).unwrap();
        assert_eq!(a.codebook(), b.codebook());
        assert_ne!(a.codebook(), c.codebook());
    }

    #[test]
    fn distance_respected() {
        let p = InnerParams::new(14, 2, 4, 2, 14).unwrap();
        let c = InnerCode::sample(p, &RngSeed::from_u64(9)).unwrap();
        assert!(c.min_pairwise_distance().unwrap() > 2);
        for &w in c.codebook() {
            for i in 0..14 {
                assert_eq!(c.decode_u64(w ^ (1 << i)), None);
            }
        }
    }

    #[test]
    fn rejection_budget_signals_overfull_params() {
        let p = InnerParams::new_unpacked(6, 3, 8, 1, 6).unwrap();
        assert!(matches!(InnerCode::sample(p, &RngSeed::from_u64(1)), Err(Error::RejectionBudget { .. })));
    }

    #[test]
    fn sparse_decode_for_long_blocks() {
        let p = InnerParams::new(30, 4, 4, 0, 1).unwrap();
        let c = InnerCode::sample(p, &RngSeed::from_u64(3)).unwrap();
        for s in 0..16u64 {
            for &w in c.codewords_of(s) {
                assert_eq!(c.decode_u64(w), Some(s));
            }
        }
        assert_eq!(c.decode_u64(c.codebook()[0] ^ 1).is_none(), !c.codebook().contains(&(c.codebook()[0] ^ 1)));
    }
}
