//! Arithmetic in GF(2^m), 1 ≤ m ≤ 16, by log/antilog tables.
//!
//! Each field uses the fixed primitive modulus in [`PRIMITIVE_MODULI`], so
//! element encodings agree across implementations. Element `a` is the
//! polynomial whose coefficient of `x^i` is bit `i` of `a`.

use crate::error::{Error, Result};

/// Modulus for `m = index + 1`, leading term included.
///
/// | m | modulus | polynomial |
/// |---|---------|------------|
/// | 1 | 0x3 | x + 1 |
/// | 2 | 0x7 | x² + x + 1 |
/// | 3 | 0xB | x³ + x + 1 |
/// | 4 | 0x13 | x⁴ + x + 1 |
/// | 5 | 0x25 | x⁵ + x² + 1 |
/// | 6 | 0x43 | x⁶ + x + 1 |
/// | 7 | 0x89 | x⁷ + x³ + 1 |
/// | 8 | 0x11D | x⁸ + x⁴ + x³ + x² + 1 |
/// | 9 | 0x211 | x⁹ + x⁴ + 1 |
/// | 10 | 0x409 | x¹⁰ + x³ + 1 |
/// | 11 | 0x805 | x¹¹ + x² + 1 |
/// | 12 | 0x1053 | x¹² + x⁶ + x⁴ + x + 1 |
/// | 13 | 0x201B | x¹³ + x⁴ + x³ + x + 1 |
/// | 14 | 0x4443 | x¹⁴ + x¹⁰ + x⁶ + x + 1 |
/// | 15 | 0x8003 | x¹⁵ + x + 1 |
/// | 16 | 0x1100B | x¹⁶ + x¹² + x³ + x + 1 |
pub const PRIMITIVE_MODULI: [u32; 16] = [
    0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
];

pub const MAX_FIELD_BITS: usize = 16;

/// The field GF(2^m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisField {
    m: usize,
    modulus: u32,
    exp: Vec<u16>,
    log: Vec<u16>,
}

/// A field element tagged with its field size, for checked construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GfElement {
    pub value: u16,
    pub q: u32,
}

impl GaloisField {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > MAX_FIELD_BITS {
            return Err(Error::InvalidParams(format!("field bits m = {m} outside 1..=16")));
        }
        let modulus = PRIMITIVE_MODULI[m - 1];
        let q = 1usize << m;
        let order = q - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; q];
        let mut a: u32 = 1;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            if i > 0 && a == 1 {
                return Err(Error::InvalidParams(format!("modulus {modulus:#x} is not primitive")));
            }
            *slot = a as u16;
            log[a as usize] = i as u16;
            a <<= 1;
            if a & (1 << m) != 0 {
                a ^= modulus;
            }
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(Self { m, modulus, exp, log })
    }

    pub fn bits(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> u32 {
        1 << self.m
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn element(&self, value: u32) -> Result<GfElement> {
        if value >= self.order() {
            return Err(Error::InvalidParams(format!("{value} is not an element of GF({})", self.order())));
        }
        Ok(GfElement { value: value as u16, q: self.order() })
    }

    pub fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u16) -> Option<u16> {
        if a == 0 {
            return None;
        }
        let order = (self.order() - 1) as usize;
        Some(self.exp[(order - self.log[a as usize] as usize) % order])
    }

    /// `a^e` with `0^0 = 1`.
    pub fn pow(&self, a: u16, e: u32) -> u16 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.order() - 1) as u64;
        self.exp[(self.log[a as usize] as u64 * e as u64 % order) as usize]
    }
}
