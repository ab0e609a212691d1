//! Encoder and decoder of the concatenated code.
//!
//! `Enc(s)`: draw a seed `Z` and encode it with the seed code into `Z'`;
//! encode `s` with the LECSS into `S'`; cut `S'` into `n_b` contiguous blocks
//! of `b` bits and inner-encode each with fresh coins into `C`; output
//! `(Z', Π(C))` with `Π = Perm(Z)`. Bits `0..n1` hold `Z'`, bits `n1..N`
//! hold `C'`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::plan::ConcatPlan;
use crate::bits::BitWord;
use crate::error::{Error, Result};
use crate::inner::InnerCode;
use crate::lecss::LecssCode;
use crate::perm::{derive_permutation, Permutation};
use crate::rng::{uniform_below, RngSeed};
use crate::scheme::CodingScheme;
use crate::symbol::Symbol;

/// Largest `2^k1 · n` for which all permutations are precomputed.
pub const PERM_CACHE_LIMIT: u128 = 1 << 24;

/// Stream labels for [`ConcatCode::encode_seeded`].
pub const LABEL_SEED: u64 = 1;
pub const LABEL_SEED_CODE: u64 = 2;
pub const LABEL_LECSS: u64 = 3;
pub const LABEL_INNER: u64 = 4;

/// `(Z', C')`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codeword {
    pub z_prime: BitWord,
    pub c_prime: BitWord,
}

impl Codeword {
    pub fn to_word(&self) -> BitWord {
        self.z_prime.concat(&self.c_prime)
    }

    pub fn from_word(w: &BitWord, n1: usize) -> Result<Self> {
        if w.len() < n1 {
            return Err(Error::LengthMismatch { expected: n1, actual: w.len() });
        }
        Ok(Self { z_prime: w.slice(0, n1), c_prime: w.slice(n1, w.len() - n1) })
    }
}

/// All randomness of one encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncoderCoins {
    /// The permutation seed as an integer.
    pub z: u64,
    /// Codeword index of the seed code.
    pub seed_code: u64,
    pub lecss: Vec<u16>,
    /// Codeword index per inner block.
    pub inner: Vec<u64>,
}

/// A concatenated code built from a plan.
pub struct ConcatCode {
    plan: ConcatPlan,
    inner: InnerCode,
    c1: InnerCode,
    lecss: LecssCode,
    perms: Option<Vec<Permutation>>,
    identity_perm: bool,
}

impl ConcatCode {
    /// Samples both inner codes from the plan's seeds.
    pub fn new(plan: ConcatPlan) -> Result<Self> {
        let inner = InnerCode::sample(plan.inner, &plan.inner_seed)?;
        let c1 = InnerCode::sample(plan.c1, &plan.c1_seed)?;
        Self::from_parts(plan, inner, c1)
    }

    pub fn from_parts(plan: ConcatPlan, inner: InnerCode, c1: InnerCode) -> Result<Self> {
        if *inner.params() != plan.inner || *c1.params() != plan.c1 {
            return Err(Error::InvalidParams("inner codes do not match the plan".into()));
        }
        if plan.c1.k > 63 {
            return Err(Error::InvalidParams("seed length above 63 bits".into()));
        }
        let lecss = LecssCode::from_descriptor(&plan.lecss)?;
        let work = (plan.perm.accepted_seeds()).saturating_mul(plan.derived.n as u128);
        let perms = if work <= PERM_CACHE_LIMIT {
            let all = (0..plan.perm.accepted_seeds() as u64)
                .map(|z| derive_permutation(&plan.perm, &BitWord::from_u64(z, plan.perm.seed_bits)))
                .collect::<Result<Vec<_>>>()?;
            Some(all)
        } else {
            None
        };
        Ok(Self { plan, inner, c1, lecss, perms, identity_perm: false })
    }

    /// Test hook: replace every permutation by the identity.
    pub fn with_identity_permutation(mut self) -> Self {
        self.identity_perm = true;
        self
    }

    pub fn plan(&self) -> &ConcatPlan {
        &self.plan
    }

    pub fn inner_code(&self) -> &InnerCode {
        &self.inner
    }

    pub fn seed_code(&self) -> &InnerCode {
        &self.c1
    }

    pub fn lecss(&self) -> &LecssCode {
        &self.lecss
    }

    /// `Perm(z)`.
    pub fn permutation(&self, z: u64) -> Result<Permutation> {
        let n = self.plan.derived.n;
        if self.identity_perm {
            return Ok(Permutation::identity(n));
        }
        match &self.perms {
            Some(all) if (z as u128) < all.len() as u128 => Ok(all[z as usize].clone()),
            _ => derive_permutation(&self.plan.perm, &BitWord::from_u64(z, self.plan.perm.seed_bits)),
        }
    }

    fn with_permutation<T>(&self, z: u64, f: impl FnOnce(&Permutation) -> T) -> Result<T> {
        match &self.perms {
            Some(all) if !self.identity_perm && (z as u128) < all.len() as u128 => Ok(f(&all[z as usize])),
            _ => Ok(f(&self.permutation(z)?)),
        }
    }

    /// Sizes of the independent coin components, in mixed-radix order.
    fn radices(&self) -> (u128, u128, u128, u128, usize) {
        (
            self.plan.perm.accepted_seeds(),
            self.plan.c1.t as u128,
            self.lecss.randomness_space(),
            self.plan.inner.t as u128,
            self.plan.derived.n_b,
        )
    }

    /// Total number of coin values, saturating at `u128::MAX`.
    pub fn coin_count(&self) -> u128 {
        let (z, c1, l, t, n_b) = self.radices();
        let mut total = z.saturating_mul(c1).saturating_mul(l);
        for _ in 0..n_b {
            total = total.saturating_mul(t);
        }
        total
    }

    /// Coins for a mixed-radix index: seed first, then seed-code coin, LECSS
    /// randomness, and inner coins block by block.
    pub fn coins_from_index(&self, mut c: u128) -> EncoderCoins {
        let (z, c1, l, t, n_b) = self.radices();
        let mut digit = |r: u128| {
            let d = c % r;
            c /= r;
            d
        };
        let z = digit(z) as u64;
        let seed_code = digit(c1) as u64;
        let lecss = self.lecss.randomness_from_index(digit(l));
        let inner = (0..n_b).map(|_| digit(t) as u64).collect();
        EncoderCoins { z, seed_code, lecss, inner }
    }

    fn draw_seed<R: RngCore + ?Sized>(&self, rng: &mut R) -> u64 {
        self.plan.perm.sample_seed(rng).to_u64()
    }

    /// Coins drawn in sequence from one generator.
    pub fn coins_from_rng<R: RngCore + ?Sized>(&self, rng: &mut R) -> EncoderCoins {
        let z = self.draw_seed(rng);
        let seed_code = uniform_below(rng, self.plan.c1.t);
        let q = self.lecss.q() as u64;
        let lecss = (0..self.lecss.k0()).map(|_| uniform_below(rng, q) as u16).collect();
        let inner = (0..self.plan.derived.n_b).map(|_| uniform_below(rng, self.plan.inner.t)).collect();
        EncoderCoins { z, seed_code, lecss, inner }
    }

    /// Coins from disjoint labeled streams of one seed.
    pub fn coins_from_seed(&self, seed: &RngSeed) -> EncoderCoins {
        let z = self.draw_seed(&mut seed.derive(LABEL_SEED).rng());
        let seed_code = uniform_below(&mut seed.derive(LABEL_SEED_CODE).rng(), self.plan.c1.t);
        let mut lr = seed.derive(LABEL_LECSS).rng();
        let q = self.lecss.q() as u64;
        let lecss = (0..self.lecss.k0()).map(|_| uniform_below(&mut lr, q) as u16).collect();
        let mut ir = seed.derive(LABEL_INNER).rng();
        let inner = (0..self.plan.derived.n_b).map(|_| uniform_below(&mut ir, self.plan.inner.t)).collect();
        EncoderCoins { z, seed_code, lecss, inner }
    }

    /// The inner blocks `C` (before permutation) for LECSS output `s_prime`.
    pub fn inner_blocks(&self, s_prime: &BitWord, coins: &[u64]) -> BitWord {
        let (big_b, b) = (self.plan.inner.n, self.plan.inner.k);
        let blocks: Vec<BitWord> = coins
            .iter()
            .enumerate()
            .map(|(i, &c)| BitWord::from_u64(self.inner.encode_index(s_prime.slice(i * b, b).to_u64(), c), big_b))
            .collect();
        BitWord::concat_all(&blocks)
    }

    pub fn encode_with(&self, s: &BitWord, coins: &EncoderCoins) -> Result<Codeword> {
        if coins.inner.len() != self.plan.derived.n_b {
            return Err(Error::LengthMismatch { expected: self.plan.derived.n_b, actual: coins.inner.len() });
        }
        let z_prime = BitWord::from_u64(self.c1.encode_index(coins.z, coins.seed_code), self.plan.c1.n);
        let s_prime = self.lecss.encode_with_randomness(s, &coins.lecss)?;
        let c = self.inner_blocks(&s_prime, &coins.inner);
        let c_prime = self.with_permutation(coins.z, |p| p.apply(&c))??;
        Ok(Codeword { z_prime, c_prime })
    }

    pub fn encode_seeded(&self, s: &BitWord, seed: &RngSeed) -> Result<Codeword> {
        self.encode_with(s, &self.coins_from_seed(seed))
    }

    /// Decodes `(Z̄', C̄')`; a seed-code `⊥` is read as the all-zero seed.
    pub fn decode_codeword(&self, w: &Codeword) -> Result<Symbol> {
        let d = &self.plan.derived;
        if w.z_prime.len() != d.n1 || w.c_prime.len() != d.n {
            return Err(Error::LengthMismatch { expected: d.n1 + d.n, actual: w.z_prime.len() + w.c_prime.len() });
        }
        let z = self.c1.decode_u64(w.z_prime.to_u64()).unwrap_or(0);
        let c = self.with_permutation(z, |p| p.invert(&w.c_prime))??;
        let (big_b, b) = (self.plan.inner.n, self.plan.inner.k);
        let mut s_prime = Vec::with_capacity(d.n_b);
        for i in 0..d.n_b {
            match self.inner.decode_u64(c.slice(i * big_b, big_b).to_u64()) {
                Some(v) => s_prime.push(BitWord::from_u64(v, b)),
                None => return Ok(Symbol::Bottom),
            }
        }
        self.lecss.decode(&BitWord::concat_all(&s_prime))
    }
}

impl CodingScheme for ConcatCode {
    fn message_bits(&self) -> usize {
        self.plan.derived.message_bits
    }

    fn codeword_bits(&self) -> usize {
        self.plan.derived.big_n
    }

    fn coin_space(&self, _s: &BitWord) -> u128 {
        self.coin_count()
    }

    fn encode_with_coins(&self, s: &BitWord, coins: u128) -> Result<BitWord> {
        Ok(self.encode_with(s, &self.coins_from_index(coins))?.to_word())
    }

    fn decode(&self, w: &BitWord) -> Result<Symbol> {
        if w.len() != self.plan.derived.big_n {
            return Err(Error::LengthMismatch { expected: self.plan.derived.big_n, actual: w.len() });
        }
        self.decode_codeword(&Codeword::from_word(w, self.plan.derived.n1)?)
    }

    fn encode(&self, s: &BitWord, rng: &mut dyn RngCore) -> Result<BitWord> {
        Ok(self.encode_with(s, &self.coins_from_rng(rng))?.to_word())
    }
}
