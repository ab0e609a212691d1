//! Seeded, stream-split randomness.
//!
//! Every random choice in the crate is drawn from ChaCha20 keyed by a 32-byte
//! seed, with the 64-bit stream id selecting an independent keystream. Integer
//! sampling uses only `next_u64`, so outputs are identical across platforms.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 32-byte seed plus a stream id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    #[serde(with = "hex_seed")]
    pub seed: [u8; 32],
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(seed: [u8; 32], stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Seed whose first eight bytes are `value` little-endian.
    pub fn from_u64(value: u64) -> Self {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&value.to_le_bytes());
        Self { seed, stream_id: 0 }
    }

    /// Parses up to 64 hex digits; shorter strings are zero-padded on the right.
    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.strip_prefix("0x").unwrap_or(s);
        if s.is_empty() || s.len() > 64 || !s.len().is_multiple_of(2) {
            return Err(Error::Parse(format!(
                "seed must be 2 to 64 hex digits, even count, got {s:?}"
            )));
        }
        let mut seed = [0u8; 32];
        for (i, b) in seed.iter_mut().enumerate().take(s.len() / 2) {
            *b = u8::from_str_radix(&s[2 * i..2 * i + 2], 16)
                .map_err(|_| Error::Parse(format!("bad hex seed {s:?}")))?;
        }
        Ok(Self { seed, stream_id: 0 })
    }

    pub fn to_hex(&self) -> String {
        self.seed.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Same key, different keystream.
    pub fn with_stream(&self, stream_id: u64) -> Self {
        Self { seed: self.seed, stream_id }
    }

    /// Child seed for a labelled sub-task: 32 bytes read from this seed's
    /// keystream at word offset `label · 2^32`, with stream id 0.
    pub fn derive(&self, label: u64) -> Self {
        let mut rng = self.rng();
        rng.set_word_pos((label as u128) << 32);
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        Self { seed, stream_id: 0 }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::from_seed(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Uniform integer in `0..bound` by rejection on `next_u64`.
pub fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0, "uniform_below(0)");
    if bound.is_power_of_two() {
        return rng.next_u64() & (bound - 1);
    }
    let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

/// Uniform `len`-bit value (`len <= 64`).
pub fn uniform_bits<R: RngCore + ?Sized>(rng: &mut R, len: usize) -> u64 {
    rng.next_u64() & crate::bits::low_mask(len)
}

/// Uniform float in `[0, 1)` with 53 bits of precision.
pub fn uniform_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

mod hex_seed {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&seed.iter().map(|b| format!("{b:02x}")).collect::<String>())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let s = String::deserialize(d)?;
        super::RngSeed::from_hex(&s)
            .map(|r| r.seed)
            .map_err(serde::de::Error::custom)
    }
}

/// Uniform word of length `len`.
pub fn random_word<R: RngCore + ?Sized>(rng: &mut R, len: usize) -> crate::bits::BitWord {
    let words: Vec<u64> = (0..len.div_ceil(64)).map(|_| rng.next_u64()).collect();
    crate::bits::BitWord::from_words(&words, len)
}
