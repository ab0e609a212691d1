//! Reed–Solomon based linear error-correcting secret sharing.
//!
//! The generator `G` is the `k × n` Vandermonde matrix with `G[i][j] = x_j^i`.
//! A message of `k − k0` symbols is encoded as `(r_1..r_{k0}, s_1..s_{k−k0}) · G`
//! with `r` uniform, i.e. the polynomial with those coefficients (low degree
//! first) evaluated at the points `x_j`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bits::BitWord;
use crate::error::{Error, Result};
use crate::rng::uniform_below;
use crate::scheme::CodingScheme;
use crate::symbol::Symbol;

use super::gf::GaloisField;

/// A linear error-correcting secret sharing scheme over GF(2^m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LecssCode {
    field: GaloisField,
    n: usize,
    k: usize,
    k0: usize,
    eval_points: Vec<u16>,
    /// `generator[i][j] = x_j^i`.
    generator: Vec<Vec<u16>>,
    /// Inverse of the first `k` columns of the generator.
    head_inverse: Vec<Vec<u16>>,
}

/// JSON descriptor `{q, n, k, k0, modulus, eval_points}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LecssDescriptor {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub k0: usize,
    pub modulus: u32,
    pub eval_points: Vec<u16>,
}

fn invert(field: &GaloisField, m: &[Vec<u16>]) -> Option<Vec<Vec<u16>>> {
    let k = m.len();
    let mut a: Vec<Vec<u16>> = m.to_vec();
    let mut inv: Vec<Vec<u16>> = (0..k).map(|i| (0..k).map(|j| (i == j) as u16).collect()).collect();
    for col in 0..k {
        let pivot = (col..k).find(|&r| a[r][col] != 0)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = field.inv(a[col][col])?;
        for j in 0..k {
            a[col][j] = field.mul(a[col][j], p);
            inv[col][j] = field.mul(inv[col][j], p);
        }
        for r in 0..k {
            if r != col && a[r][col] != 0 {
                let factor = a[r][col];
                for j in 0..k {
                    a[r][j] ^= field.mul(factor, a[col][j]);
                    inv[r][j] ^= field.mul(factor, inv[col][j]);
                }
            }
        }
    }
    Some(inv)
}

impl LecssCode {
    /// Code over GF(2^m) with evaluation points `0, 1, …, n−1`.
    pub fn new(m: usize, n: usize, k: usize, k0: usize) -> Result<Self> {
        Self::with_points(m, k, k0, (0..n as u32).map(|x| x as u16).collect())
    }

    pub fn with_points(m: usize, k: usize, k0: usize, eval_points: Vec<u16>) -> Result<Self> {
        let field = GaloisField::new(m)?;
        let n = eval_points.len();
        if !(1 <= k0 && k0 < k && k <= n && n as u32 <= field.order()) {
            return Err(Error::InvalidParams(format!(
                "need 1 ≤ k0 < k ≤ n ≤ q, got k0 = {k0}, k = {k}, n = {n}, q = {}",
                field.order()
            )));
        }
        let mut sorted = eval_points.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != n || sorted.last().is_some_and(|&x| x as u32 >= field.order()) {
            return Err(Error::InvalidParams("evaluation points must be distinct field elements".into()));
        }
        let generator: Vec<Vec<u16>> =
            (0..k).map(|i| eval_points.iter().map(|&x| field.pow(x, i as u32)).collect()).collect();
        let head: Vec<Vec<u16>> = generator.iter().map(|row| row[..k].to_vec()).collect();
        let head_inverse = invert(&field, &head)
            .ok_or_else(|| Error::InvalidParams("Vandermonde head is singular".into()))?;
        Ok(Self { field, n, k, k0, eval_points, generator, head_inverse })
    }

    pub fn from_descriptor(d: &LecssDescriptor) -> Result<Self> {
        if !d.q.is_power_of_two() || d.q < 2 {
            return Err(Error::InvalidParams(format!("q = {} is not a power of two", d.q)));
        }
        let m = d.q.trailing_zeros() as usize;
        let code = Self::with_points(m, d.k, d.k0, d.eval_points.clone())?;
        if code.field.modulus() != d.modulus || code.n != d.n {
            return Err(Error::InvalidParams("descriptor modulus or length disagrees with the fixed table".into()));
        }
        Ok(code)
    }

    pub fn descriptor(&self) -> LecssDescriptor {
        LecssDescriptor {
            q: self.field.order(),
            n: self.n,
            k: self.k,
            k0: self.k0,
            modulus: self.field.modulus(),
            eval_points: self.eval_points.clone(),
        }
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    /// Bits per symbol, `log q`.
    pub fn symbol_bits(&self) -> usize {
        self.field.bits()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn k0(&self) -> usize {
        self.k0
    }

    /// Message length in bits, `(k − k0)·log q`.
    pub fn message_len(&self) -> usize {
        (self.k - self.k0) * self.symbol_bits()
    }

    /// Block length in bits, `n·log q`.
    pub fn block_len(&self) -> usize {
        self.n * self.symbol_bits()
    }

    /// Minimum distance in symbols, `n − k + 1`.
    pub fn distance(&self) -> usize {
        self.n - self.k + 1
    }

    pub fn generator(&self) -> &[Vec<u16>] {
        &self.generator
    }

    /// Symbols to bits: each symbol little-endian in `log q` bits, in order.
    pub fn pack(&self, symbols: &[u16]) -> BitWord {
        let m = self.symbol_bits();
        let mut w = BitWord::zeros(symbols.len() * m);
        for (j, &s) in symbols.iter().enumerate() {
            for b in 0..m {
                if s >> b & 1 == 1 {
                    w.set(j * m + b, true);
                }
            }
        }
        w
    }

    pub fn unpack(&self, w: &BitWord) -> Vec<u16> {
        let m = self.symbol_bits();
        (0..w.len() / m)
            .map(|j| (0..m).fold(0u16, |acc, b| acc | (w.get(j * m + b) as u16) << b))
            .collect()
    }

    /// `coefficients · G`.
    pub fn encode_coefficients(&self, coefficients: &[u16]) -> Vec<u16> {
        let mut out = vec![0u16; self.n];
        for (c, row) in coefficients.iter().zip(&self.generator) {
            if *c == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(row) {
                *o ^= self.field.mul(*c, g);
            }
        }
        out
    }

    /// Codeword symbols for message symbols `msg` and randomness `rand`.
    pub fn encode_symbols(&self, rand: &[u16], msg: &[u16]) -> Vec<u16> {
        assert_eq!(rand.len(), self.k0);
        assert_eq!(msg.len(), self.k - self.k0);
        let coefficients: Vec<u16> = rand.iter().chain(msg).copied().collect();
        self.encode_coefficients(&coefficients)
    }

    /// Message symbols of a codeword, or `None` when `w` is not a codeword.
    pub fn decode_symbols(&self, w: &[u16]) -> Option<Vec<u16>> {
        let mut coefficients = vec![0u16; self.k];
        for (j, &wj) in w[..self.k].iter().enumerate() {
            if wj == 0 {
                continue;
            }
            for (c, &h) in coefficients.iter_mut().zip(&self.head_inverse[j]) {
                *c ^= self.field.mul(wj, h);
            }
        }
        (self.encode_coefficients(&coefficients) == w).then(|| coefficients[self.k0..].to_vec())
    }

    fn check_message(&self, s: &BitWord) -> Result<()> {
        if s.len() != self.message_len() {
            return Err(Error::LengthMismatch { expected: self.message_len(), actual: s.len() });
        }
        Ok(())
    }

    /// Encoding of `s` with explicit randomness symbols.
    pub fn encode_with_randomness(&self, s: &BitWord, rand: &[u16]) -> Result<BitWord> {
        self.check_message(s)?;
        if rand.len() != self.k0 || rand.iter().any(|&r| r as u32 >= self.q()) {
            return Err(Error::InvalidParams("randomness must be k0 field elements".into()));
        }
        Ok(self.pack(&self.encode_symbols(rand, &self.unpack(s))))
    }

    pub fn encode<R: RngCore + ?Sized>(&self, s: &BitWord, rng: &mut R) -> Result<BitWord> {
        let rand: Vec<u16> = (0..self.k0).map(|_| uniform_below(rng, self.q() as u64) as u16).collect();
        self.encode_with_randomness(s, &rand)
    }

    pub fn decode(&self, w: &BitWord) -> Result<Symbol> {
        if w.len() != self.block_len() {
            return Err(Error::LengthMismatch { expected: self.block_len(), actual: w.len() });
        }
        Ok(match self.decode_symbols(&self.unpack(w)) {
            Some(msg) => Symbol::Message(self.pack(&msg)),
            None => Symbol::Bottom,
        })
    }

    /// Randomness vector for coin index `c`: base-`q` digits, least significant first.
    pub fn randomness_from_index(&self, mut c: u128) -> Vec<u16> {
        let q = self.q() as u128;
        (0..self.k0)
            .map(|_| {
                let d = (c % q) as u16;
                c /= q;
                d
            })
            .collect()
    }

    pub fn randomness_space(&self) -> u128 {
        (self.q() as u128).pow(self.k0 as u32)
    }
}

impl CodingScheme for LecssCode {
    fn message_bits(&self) -> usize {
        self.message_len()
    }

    fn codeword_bits(&self) -> usize {
        self.block_len()
    }

    fn coin_space(&self, _s: &BitWord) -> u128 {
        self.randomness_space()
    }

    fn encode_with_coins(&self, s: &BitWord, coins: u128) -> Result<BitWord> {
        self.encode_with_randomness(s, &self.randomness_from_index(coins))
    }

    fn decode(&self, w: &BitWord) -> Result<Symbol> {
        LecssCode::decode(self, w)
    }
}

/// Builds the code for target length `n` and slack `α`: `q` is the least power
/// of two `≥ n`, `k = ⌈n(1 − α/2)⌉`, `k0 = ⌊αn/2⌋`.
pub fn build_lecss(n: usize, alpha: f64) -> Result<LecssCode> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!("α = {alpha} outside (0, 1)")));
    }
    if n < 2 {
        return Err(Error::InvalidParams(format!("n = {n} too small")));
    }
    let m = (n.next_power_of_two().trailing_zeros() as usize).max(1);
    let k = (n as f64 * (1.0 - alpha / 2.0) - 1e-9).ceil() as usize;
    let k0 = (alpha * n as f64 / 2.0 + 1e-9).floor() as usize;
    if k0 == 0 {
        return Err(Error::Infeasible { inequality: "k0 = ⌊αn/2⌋ ≥ 1".into(), detail: format!("α = {alpha}, n = {n}") });
    }
    LecssCode::new(m, n, k, k0)
}
