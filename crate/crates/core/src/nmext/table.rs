//! Two-source functions `{0,1}^n × {0,1}^n → {0,1}^m` as explicit tables.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{uniform_bits, RngSeed};

/// Largest half-source length for any table.
pub const MAX_EXT_HALF_BITS: usize = 8;
/// Largest output length.
pub const MAX_EXT_OUTPUT_BITS: usize = 16;

/// Entry `(x, y)` lives at index `x·2^n + y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractorTable {
    n: usize,
    m: usize,
    seed: Option<RngSeed>,
    table: Vec<u16>,
}

/// JSON header stored next to the raw table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractorHeader {
    pub n: usize,
    pub m: usize,
    pub seed: Option<RngSeed>,
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n == 0 || n > MAX_EXT_HALF_BITS {
        return Err(Error::GuardExceeded { what: "extractor half length".into(), size: n as u128, guard: MAX_EXT_HALF_BITS as u128 });
    }
    if m > MAX_EXT_OUTPUT_BITS {
        return Err(Error::InvalidParams(format!("output length {m} above {MAX_EXT_OUTPUT_BITS}")));
    }
    Ok(())
}

impl ExtractorTable {
    pub fn new(n: usize, m: usize, table: Vec<u16>) -> Result<Self> {
        check_dims(n, m)?;
        if table.len() != 1 << (2 * n) {
            return Err(Error::LengthMismatch { expected: 1 << (2 * n), actual: table.len() });
        }
        if let Some(v) = table.iter().find(|&&v| (v as u32) >> m != 0) {
            return Err(Error::InvalidParams(format!("entry {v} exceeds {m} bits")));
        }
        Ok(Self { n, m, seed: None, table })
    }

    pub fn from_fn(n: usize, m: usize, f: impl Fn(u32, u32) -> u16) -> Result<Self> {
        check_dims(n, m)?;
        let size = 1u32 << n;
        let table = (0..size).flat_map(|x| (0..size).map(move |y| (x, y))).map(|(x, y)| f(x, y)).collect();
        Self::new(n, m, table)
    }

    /// `⟨x, y⟩ mod 2`.
    pub fn inner_product(n: usize) -> Result<Self> {
        Self::from_fn(n, 1, |x, y| ((x & y).count_ones() & 1) as u16)
    }

    /// XOR of all `2n` input bits.
    pub fn parity(n: usize) -> Result<Self> {
        Self::from_fn(n, 1, |x, y| ((x ^ y).count_ones() & 1) as u16)
    }

    pub fn constant(n: usize, m: usize, v: u16) -> Result<Self> {
        Self::from_fn(n, m, |_, _| v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> Option<&RngSeed> {
        self.seed.as_ref()
    }

    pub fn entries(&self) -> &[u16] {
        &self.table
    }

    pub fn get(&self, x: u32, y: u32) -> u16 {
        self.table[((x as usize) << self.n) | y as usize]
    }

    /// Keeps the first `k` output bits.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k > self.m {
            return Err(Error::InvalidParams(format!("cannot truncate {} bits to {k}", self.m)));
        }
        let mask = ((1u32 << k) - 1) as u16;
        Ok(Self { n: self.n, m: k, seed: self.seed, table: self.table.iter().map(|v| v & mask).collect() })
    }

    pub fn header(&self) -> ExtractorHeader {
        ExtractorHeader { n: self.n, m: self.m, seed: self.seed }
    }

    /// Entries as a little-endian bit stream of `m` bits each, in index order.
    pub fn to_raw(&self) -> Vec<u8> {
        let mut out = vec![0u8; (self.table.len() * self.m).div_ceil(8)];
        for (i, &v) in self.table.iter().enumerate() {
            for b in 0..self.m {
                if v >> b & 1 == 1 {
                    let p = i * self.m + b;
                    out[p / 8] |= 1 << (p % 8);
                }
            }
        }
        out
    }

    pub fn from_raw(header: &ExtractorHeader, raw: &[u8]) -> Result<Self> {
        check_dims(header.n, header.m)?;
        let entries = 1usize << (2 * header.n);
        let expected = (entries * header.m).div_ceil(8);
        if raw.len() != expected {
            return Err(Error::Parse(format!("raw table has {} bytes, expected {expected}", raw.len())));
        }
        let m = header.m;
        let table = (0..entries)
            .map(|i| (0..m).fold(0u16, |acc, b| {
                let p = i * m + b;
                acc | ((raw[p / 8] >> (p % 8) & 1) as u16) << b
            }))
            .collect();
        let mut t = Self::new(header.n, m, table)?;
        t.seed = header.seed;
        Ok(t)
    }

    pub fn write<W: Write, H: Write>(&self, header: H, mut raw: W) -> Result<()> {
        serde_json::to_writer_pretty(header, &self.header())?;
        raw.write_all(&self.to_raw())?;
        Ok(())
    }

    pub fn read<H: Read, R: Read>(header: H, mut raw: R) -> Result<Self> {
        let h: ExtractorHeader = serde_json::from_reader(header)?;
        let mut bytes = Vec::new();
        raw.read_to_end(&mut bytes)?;
        Self::from_raw(&h, &bytes)
    }
}

/// A uniformly random table: entry `i` is the `i`-th draw of `m` bits.
pub fn sample_random_extractor(n: usize, m: usize, seed: &RngSeed) -> Result<ExtractorTable> {
    check_dims(n, m)?;
    let mut rng = seed.rng();
    let table = (0..1usize << (2 * n)).map(|_| uniform_bits(&mut rng, m) as u16).collect();
    let mut t = ExtractorTable::new(n, m, table)?;
    t.seed = Some(*seed);
    Ok(t)
}
