//! Flat two-source distributions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest half length whose flat sources are enumerated (`2^(2^n)` subsets).
pub const MAX_ENUMERATED_SOURCE_BITS: usize = 4;

/// Uniform `X` on one support times uniform `Y` on another.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatSourcePair {
    n: usize,
    x: Vec<u32>,
    y: Vec<u32>,
}

fn normalize(n: usize, mut s: Vec<u32>, name: &str) -> Result<Vec<u32>> {
    s.sort_unstable();
    s.dedup();
    if s.is_empty() {
        return Err(Error::InvalidParams(format!("{name} support is empty")));
    }
    if s.last().is_some_and(|&v| v >> n != 0) {
        return Err(Error::InvalidParams(format!("{name} support exceeds {n} bits")));
    }
    Ok(s)
}

impl FlatSourcePair {
    pub fn new(n: usize, x: Vec<u32>, y: Vec<u32>) -> Result<Self> {
        Ok(Self { n, x: normalize(n, x, "X")?, y: normalize(n, y, "Y")? })
    }

    /// Both halves uniform on `{0,1}^n`.
    pub fn full(n: usize) -> Self {
        let all: Vec<u32> = (0..1u32 << n).collect();
        Self { n, x: all.clone(), y: all }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &[u32] {
        &self.x
    }

    pub fn y(&self) -> &[u32] {
        &self.y
    }

    /// `log2 |X_support|`.
    pub fn k1(&self) -> f64 {
        (self.x.len() as f64).log2()
    }

    pub fn k2(&self) -> f64 {
        (self.y.len() as f64).log2()
    }
}

/// Every nonempty subset of `{0,1}^n`, as sorted supports.
pub fn flat_supports(n: usize) -> Result<Vec<Vec<u32>>> {
    if n > MAX_ENUMERATED_SOURCE_BITS {
        return Err(Error::GuardExceeded {
            what: "flat source enumeration".into(),
            size: 1u128 << (1usize << n).min(127),
            guard: 1 << (1 << MAX_ENUMERATED_SOURCE_BITS),
        });
    }
    let size = 1u32 << n;
    Ok((1u64..1 << size)
        .map(|mask| (0..size).filter(|&v| mask >> v & 1 == 1).collect())
        .collect())
}
