//! Fixed-length bit strings.
//!
//! Coordinate `i` lives in bit `i % 64` of word `i / 64`. Unused high bits of
//! the last word are always zero so that equality and hashing are structural.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};

type Words = SmallVec<[u64; 2]>;

/// A bit string of fixed length. Index 0 is the first coordinate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitWord {
    len: usize,
    words: Words,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitWord {
    /// The all-zero word of length `len`.
    pub fn zeros(len: usize) -> Self {
        let mut words = Words::new();
        words.resize(word_count(len), 0);
        Self { len, words }
    }

    /// Builds a word from explicit bits.
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut w = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            w.set(i, b);
        }
        w
    }

    /// Word of length `len <= 64` whose bit `i` is `(value >> i) & 1`.
    /// Bits of `value` at or above `len` are dropped.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 bits");
        let mut w = Self::zeros(len);
        if len > 0 {
            w.words[0] = value & low_mask(len);
        }
        w
    }

    /// Word of length `len <= 128` whose bit `i` is `(value >> i) & 1`.
    pub fn from_u128(value: u128, len: usize) -> Self {
        assert!(len <= 128, "from_u128 supports at most 128 bits");
        let mut w = Self::zeros(len);
        if len > 0 {
            w.words[0] = value as u64;
        }
        if len > 64 {
            w.words[1] = (value >> 64) as u64;
        }
        w.clear_tail();
        w
    }

    /// Builds from packed little-endian words; extra bits are cleared.
    pub fn from_words(words: &[u64], len: usize) -> Self {
        let mut w = Self::zeros(len);
        for (dst, src) in w.words.iter_mut().zip(words) {
            *dst = *src;
        }
        w.clear_tail();
        w
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let mut w = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => w.set(i, true),
                other => return Err(Error::Parse(format!("bad bit character {other:?}"))),
            }
        }
        Ok(w)
    }

    /// The value as an integer, bit `i` weighted by `2^i`. Requires `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64, "to_u64 on a {}-bit word", self.len);
        self.words.first().copied().unwrap_or(0)
    }

    /// The value as an integer, bit `i` weighted by `2^i`. Requires `len <= 128`.
    pub fn to_u128(&self) -> u128 {
        assert!(self.len <= 128, "to_u128 on a {}-bit word", self.len);
        let lo = self.words.first().copied().unwrap_or(0) as u128;
        let hi = self.words.get(1).copied().unwrap_or(0) as u128;
        lo | (hi << 64)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Number of one bits.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Bitwise XOR. Lengths must agree.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        check_len(self.len, other.len)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(out)
    }

    /// Bits `start..start + len` as a new word.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = Self::zeros(len);
        if start.is_multiple_of(64) {
            let first = start / 64;
            for (j, dst) in out.words.iter_mut().enumerate() {
                *dst = self.words[first + j];
            }
            out.clear_tail();
            return out;
        }
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    /// The restriction `self|_T` listing bits in the order of `indices`.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let mut out = Self::zeros(indices.len());
        for (j, &i) in indices.iter().enumerate() {
            if self.get(i) {
                out.set(j, true);
            }
        }
        out
    }

    /// `self ‖ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        if self.len.is_multiple_of(64) {
            let base = self.len / 64;
            out.words[base..base + other.words.len()].copy_from_slice(&other.words);
        } else {
            for i in 0..other.len {
                if other.get(i) {
                    out.set(self.len + i, true);
                }
            }
        }
        out
    }

    /// Concatenates a sequence of words.
    pub fn concat_all<'a>(parts: impl IntoIterator<Item = &'a BitWord>) -> Self {
        let parts: Vec<&BitWord> = parts.into_iter().collect();
        let total = parts.iter().map(|p| p.len).sum();
        let mut out = Self::zeros(total);
        let mut pos = 0;
        for p in parts {
            for i in 0..p.len {
                if p.get(i) {
                    out.set(pos + i, true);
                }
            }
            pos += p.len;
        }
        out
    }

    /// Little-endian byte packing: bit `i` is bit `i % 8` of byte `i / 8`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(nbytes);
        for b in 0..nbytes {
            out.push((self.words[b / 8] >> (8 * (b % 8))) as u8);
        }
        out
    }

    /// Inverse of [`BitWord::to_bytes`]. Surplus bits in the last byte must be zero.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Parse(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let mut w = Self::zeros(len);
        for (b, &byte) in bytes.iter().enumerate() {
            w.words[b / 8] |= (byte as u64) << (8 * (b % 8));
        }
        let before = w.words.clone();
        w.clear_tail();
        if before != w.words {
            return Err(Error::Parse("nonzero padding bits".into()));
        }
        Ok(w)
    }

    /// Lowercase hex of [`BitWord::to_bytes`], byte 0 first.
    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str, len: usize) -> Result<Self> {
        if !s.len().is_multiple_of(2) {
            return Err(Error::Parse(format!("odd-length hex string {s:?}")));
        }
        let bytes = (0..s.len())
            .step_by(2)
            .map(|i| {
                u8::from_str_radix(&s[i..i + 2], 16)
                    .map_err(|_| Error::Parse(format!("bad hex string {s:?}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bytes(&bytes, len)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= low_mask(rem);
            }
        }
    }
}

/// Mask with the low `len` bits set (`len <= 64`).
pub fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// Number of coordinates where `x` and `y` differ.
pub fn hamming_distance(x: &BitWord, y: &BitWord) -> Result<usize> {
    check_len(x.len, y.len)?;
    Ok(x.words
        .iter()
        .zip(&y.words)
        .map(|(a, b)| (a ^ b).count_ones() as usize)
        .sum())
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

impl fmt::Display for BitWord {
    /// Bits in coordinate order, e.g. `0110`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        BitWord::from_bit_str(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_example() {
        let x = BitWord::from_bit_str("0011").unwrap();
        let y = BitWord::from_bit_str("0101").unwrap();
        assert_eq!(hamming_distance(&x, &y).unwrap(), 2);
    }

    #[test]
    fn hamming_length_mismatch() {
        let x = BitWord::zeros(3);
        let y = BitWord::zeros(4);
        assert!(matches!(
            hamming_distance(&x, &y),
            Err(Error::LengthMismatch { expected: 3, actual: 4 })
        ));
    }

    #[test]
    fn empty_word() {
        let e = BitWord::zeros(0);
        assert!(e.is_empty());
        assert_eq!(e.to_hex(), "");
        assert_eq!(BitWord::from_hex("", 0).unwrap(), e);
        assert_eq!(e.concat(&e).len(), 0);
    }

    #[test]
    fn slice_and_concat_across_word_boundary() {
        let bits: Vec<bool> = (0..150).map(|i| (i * 7) % 3 == 0).collect();
        let w = BitWord::from_bits(&bits);
        let a = w.slice(0, 70);
        let b = w.slice(70, 80);
        assert_eq!(a.concat(&b), w);
        assert_eq!(BitWord::concat_all([&a, &b]), w);
        assert_eq!(w.slice(64, 64).to_u64(), {
            let mut v = 0u64;
            for i in 0..64 {
                if bits[64 + i] {
                    v |= 1 << i;
                }
            }
            v
        });
    }

    #[test]
    fn hex_rejects_padding_bits() {
        assert!(BitWord::from_hex("ff", 4).is_err());
        assert_eq!(BitWord::from_hex("0f", 4).unwrap().weight(), 4);
    }

    #[test]
    fn display_is_coordinate_order() {
        let w = BitWord::from_u64(0b0110, 4);
        assert_eq!(w.to_string(), "0110");
        assert!(w.get(1) && w.get(2));
    }
}
