//! Tampering functions: bit-wise and split-state.

use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bits::BitWord;
use crate::error::{Error, Result};
use crate::rng::{uniform_below, uniform_f64};

pub use crate::concat::{canonical_adversaries, case1_adversaries};

/// Largest `n` for which [`enumerate_bit_tampers`] runs by default (`4^n` functions).
pub const DEFAULT_ENUMERATION_GUARD: usize = 10;

/// Largest half length for split-state lookup tables.
pub const MAX_SPLIT_HALF_BITS: usize = 20;

/// Anything that maps codewords to codewords.
pub trait Tamper: Sync {
    fn input_bits(&self) -> usize;
    fn apply(&self, x: &BitWord) -> Result<BitWord>;
}

/// Per-coordinate action of a bit-tampering function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BitAction {
    Keep,
    Flip,
    Set0,
    Set1,
}

impl BitAction {
    pub const ALL: [BitAction; 4] = [BitAction::Keep, BitAction::Flip, BitAction::Set0, BitAction::Set1];

    pub fn as_char(self) -> char {
        match self {
            BitAction::Keep => 'K',
            BitAction::Flip => 'F',
            BitAction::Set0 => '0',
            BitAction::Set1 => '1',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'K' => Ok(BitAction::Keep),
            'F' => Ok(BitAction::Flip),
            '0' => Ok(BitAction::Set0),
            '1' => Ok(BitAction::Set1),
            other => Err(Error::Parse(format!("bad bit action {other:?}"))),
        }
    }

    pub fn is_frozen(self) -> bool {
        matches!(self, BitAction::Set0 | BitAction::Set1)
    }

    fn apply(self, b: bool) -> bool {
        match self {
            BitAction::Keep => b,
            BitAction::Flip => !b,
            BitAction::Set0 => false,
            BitAction::Set1 => true,
        }
    }
}

/// `f(x)_i = f_i(x_i)` with each `f_i` one of keep, flip, set-0, set-1.
///
/// Applied as `((x & pass) ^ flip) | one` on packed words.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BitsRepr", into = "BitsRepr")]
pub struct BitTamperFn {
    actions: Vec<BitAction>,
    pass: BitWord,
    flip: BitWord,
    one: BitWord,
}

#[derive(Serialize, Deserialize)]
struct BitsRepr {
    actions: String,
}

impl TryFrom<BitsRepr> for BitTamperFn {
    type Error = Error;
    fn try_from(r: BitsRepr) -> Result<Self> {
        BitTamperFn::parse(&r.actions)
    }
}

impl From<BitTamperFn> for BitsRepr {
    fn from(f: BitTamperFn) -> Self {
        BitsRepr { actions: f.action_string() }
    }
}

/// Index sets of a bit-tampering function.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitPartition {
    pub frozen: Vec<usize>,
    pub flipped: Vec<usize>,
    pub kept: Vec<usize>,
}

impl BitTamperFn {
    pub fn new(actions: Vec<BitAction>) -> Self {
        let n = actions.len();
        let (mut pass, mut flip, mut one) = (BitWord::zeros(n), BitWord::zeros(n), BitWord::zeros(n));
        for (i, a) in actions.iter().enumerate() {
            match a {
                BitAction::Keep => pass.set(i, true),
                BitAction::Flip => {
                    pass.set(i, true);
                    flip.set(i, true);
                }
                BitAction::Set0 => {}
                BitAction::Set1 => one.set(i, true),
            }
        }
        Self { actions, pass, flip, one }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![BitAction::Keep; n])
    }

    /// The constant function with value `c`.
    pub fn constant(c: &BitWord) -> Self {
        Self::new(c.bits().map(|b| if b { BitAction::Set1 } else { BitAction::Set0 }).collect())
    }

    /// Parses a string over `K`, `F`, `0`, `1`.
    pub fn parse(s: &str) -> Result<Self> {
        Ok(Self::new(s.chars().map(BitAction::from_char).collect::<Result<_>>()?))
    }

    /// The `index`-th function in base-4 order: coordinate `i` takes action
    /// `ALL[(index >> 2i) & 3]`.
    pub fn from_index(n: usize, index: u128) -> Self {
        Self::new((0..n).map(|i| BitAction::ALL[((index >> (2 * i)) & 3) as usize]).collect())
    }

    pub fn actions(&self) -> &[BitAction] {
        &self.actions
    }

    pub fn action_string(&self) -> String {
        self.actions.iter().map(|a| a.as_char()).collect()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.actions.iter().all(|&a| a == BitAction::Keep)
    }

    pub fn is_constant(&self) -> bool {
        self.actions.iter().all(|a| a.is_frozen())
    }

    pub fn partition(&self) -> BitPartition {
        let mut p = BitPartition::default();
        for (i, a) in self.actions.iter().enumerate() {
            match a {
                BitAction::Keep => p.kept.push(i),
                BitAction::Flip => p.flipped.push(i),
                _ => p.frozen.push(i),
            }
        }
        p
    }

    /// Restriction to coordinates `start..start + len`.
    pub fn segment(&self, start: usize, len: usize) -> BitTamperFn {
        BitTamperFn::new(self.actions[start..start + len].to_vec())
    }

    /// Concatenation of two bit-tampering functions.
    pub fn join(&self, other: &BitTamperFn) -> BitTamperFn {
        let mut a = self.actions.clone();
        a.extend_from_slice(&other.actions);
        BitTamperFn::new(a)
    }

    /// Applies to a packed value of at most 64 bits.
    pub fn apply_u64(&self, x: u64) -> u64 {
        ((x & self.pass.to_u64()) ^ self.flip.to_u64()) | self.one.to_u64()
    }

    pub fn masks(&self) -> (&BitWord, &BitWord, &BitWord) {
        (&self.pass, &self.flip, &self.one)
    }
}

impl Tamper for BitTamperFn {
    fn input_bits(&self) -> usize {
        self.actions.len()
    }

    fn apply(&self, x: &BitWord) -> Result<BitWord> {
        if x.len() != self.actions.len() {
            return Err(Error::LengthMismatch { expected: self.actions.len(), actual: x.len() });
        }
        let words: Vec<u64> = x
            .words()
            .iter()
            .zip(self.pass.words())
            .zip(self.flip.words())
            .zip(self.one.words())
            .map(|(((x, p), f), o)| ((x & p) ^ f) | o)
            .collect();
        Ok(BitWord::from_words(&words, x.len()))
    }
}

impl fmt::Debug for BitTamperFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitTamperFn({})", self.action_string())
    }
}

/// Reference implementation, coordinate by coordinate.
pub fn apply_bitwise_naive(f: &BitTamperFn, x: &BitWord) -> BitWord {
    BitWord::from_bits(&f.actions.iter().zip(x.bits()).map(|(a, b)| a.apply(b)).collect::<Vec<_>>())
}

/// `f(x, y) = (f1(x), f2(y))` on two halves of `n` bits each, given by lookup
/// tables. The first half is bits `0..n`, read as an integer with bit `i`
/// weighted `2^i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SplitRepr", into = "SplitRepr")]
pub struct SplitStateTamperFn {
    half_bits: usize,
    f1: Vec<u32>,
    f2: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct SplitRepr {
    f1: Vec<u32>,
    f2: Vec<u32>,
}

impl TryFrom<SplitRepr> for SplitStateTamperFn {
    type Error = Error;
    fn try_from(r: SplitRepr) -> Result<Self> {
        SplitStateTamperFn::new(r.f1, r.f2)
    }
}

impl From<SplitStateTamperFn> for SplitRepr {
    fn from(f: SplitStateTamperFn) -> Self {
        SplitRepr { f1: f.f1, f2: f.f2 }
    }
}

impl SplitStateTamperFn {
    pub fn new(f1: Vec<u32>, f2: Vec<u32>) -> Result<Self> {
        if f1.len() != f2.len() || !f1.len().is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "split tables must have equal power-of-two sizes, got {} and {}",
                f1.len(),
                f2.len()
            )));
        }
        let half_bits = f1.len().trailing_zeros() as usize;
        if half_bits > MAX_SPLIT_HALF_BITS {
            return Err(Error::GuardExceeded {
                what: "split-state table".into(),
                size: 1 << half_bits,
                guard: 1 << MAX_SPLIT_HALF_BITS,
            });
        }
        let size = f1.len() as u32;
        if f1.iter().chain(&f2).any(|&v| v >= size) {
            return Err(Error::InvalidParams("split table value out of range".into()));
        }
        Ok(Self { half_bits, f1, f2 })
    }

    pub fn identity(half_bits: usize) -> Self {
        let t: Vec<u32> = (0..1u32 << half_bits).collect();
        Self::new(t.clone(), t).expect("identity tables are valid")
    }

    pub fn half_bits(&self) -> usize {
        self.half_bits
    }

    pub fn f1(&self) -> &[u32] {
        &self.f1
    }

    pub fn f2(&self) -> &[u32] {
        &self.f2
    }

    pub fn f1_fixed_point_free(&self) -> bool {
        self.f1.iter().enumerate().all(|(x, &v)| v as usize != x)
    }

    pub fn f2_fixed_point_free(&self) -> bool {
        self.f2.iter().enumerate().all(|(x, &v)| v as usize != x)
    }

    /// Applies to a pair of half values.
    pub fn apply_pair(&self, x: u32, y: u32) -> (u32, u32) {
        (self.f1[x as usize], self.f2[y as usize])
    }
}

impl Tamper for SplitStateTamperFn {
    fn input_bits(&self) -> usize {
        2 * self.half_bits
    }

    fn apply(&self, w: &BitWord) -> Result<BitWord> {
        let n = self.half_bits;
        if w.len() != 2 * n {
            return Err(Error::LengthMismatch { expected: 2 * n, actual: w.len() });
        }
        let x = w.slice(0, n).to_u64() as u32;
        let y = w.slice(n, n).to_u64() as u32;
        let (a, b) = self.apply_pair(x, y);
        Ok(BitWord::from_u64(a as u64, n).concat(&BitWord::from_u64(b as u64, n)))
    }
}

/// Either kind of adversary, as read from JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TamperFn {
    Bits(BitTamperFn),
    Split(SplitStateTamperFn),
}

impl Tamper for TamperFn {
    fn input_bits(&self) -> usize {
        match self {
            TamperFn::Bits(f) => f.input_bits(),
            TamperFn::Split(f) => f.input_bits(),
        }
    }

    fn apply(&self, x: &BitWord) -> Result<BitWord> {
        match self {
            TamperFn::Bits(f) => f.apply(x),
            TamperFn::Split(f) => f.apply(x),
        }
    }
}

/// All `4^n` bit-tampering functions in base-4 index order.
pub fn enumerate_bit_tampers(n: usize, guard: usize) -> Result<impl Iterator<Item = BitTamperFn>> {
    if n > guard {
        return Err(Error::GuardExceeded {
            what: "bit-tamper enumeration".into(),
            size: 1u128 << (2 * n.min(63)),
            guard: 1u128 << (2 * guard.min(63)),
        });
    }
    Ok((0..1u128 << (2 * n)).map(move |i| BitTamperFn::from_index(n, i)))
}

/// Per-bit action probabilities for [`random_tamper`]; `set` is split evenly
/// between set-0 and set-1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TamperProfile {
    pub keep: f64,
    pub flip: f64,
    pub set: f64,
}

/// Tolerance on `keep + flip + set = 1`.
pub const PROFILE_SUM_TOLERANCE: f64 = 1e-9;

impl TamperProfile {
    pub fn new(keep: f64, flip: f64, set: f64) -> Result<Self> {
        let p = TamperProfile { keep, flip, set };
        let ok = [keep, flip, set].iter().all(|x| (0.0..=1.0).contains(x))
            && (keep + flip + set - 1.0).abs() <= PROFILE_SUM_TOLERANCE;
        if !ok {
            return Err(Error::InvalidParams(format!("bad tamper profile {p:?}")));
        }
        Ok(p)
    }

    /// Keeps each bit with probability `keep`, spreading the rest evenly.
    pub fn mostly_keep(keep: f64) -> Self {
        let rest = (1.0 - keep) / 2.0;
        TamperProfile { keep, flip: rest, set: rest }
    }
}

/// Bit tamper with i.i.d. actions drawn from `profile`.
pub fn random_tamper<R: RngCore + ?Sized>(n: usize, profile: &TamperProfile, rng: &mut R) -> Result<BitTamperFn> {
    let p = TamperProfile::new(profile.keep, profile.flip, profile.set)?;
    let actions = (0..n)
        .map(|_| {
            let u = uniform_f64(rng);
            if u < p.keep {
                BitAction::Keep
            } else if u < p.keep + p.flip || p.set == 0.0 {
                BitAction::Flip
            } else if rng.next_u32() & 1 == 0 {
                BitAction::Set0
            } else {
                BitAction::Set1
            }
        })
        .collect();
    Ok(BitTamperFn::new(actions))
}

/// Random split-state tamper on halves of `half_bits` bits. With
/// `fixed_point_free`, each table entry is uniform over values other than its
/// own index.
pub fn random_split_tamper<R: RngCore + ?Sized>(
    half_bits: usize,
    fixed_point_free: bool,
    rng: &mut R,
) -> Result<SplitStateTamperFn> {
    if half_bits == 0 && fixed_point_free {
        return Err(Error::InvalidParams("no fixed-point-free map on a single point".into()));
    }
    if half_bits > MAX_SPLIT_HALF_BITS {
        return Err(Error::GuardExceeded {
            what: "split-state table".into(),
            size: 1 << half_bits,
            guard: 1 << MAX_SPLIT_HALF_BITS,
        });
    }
    let size = 1u64 << half_bits;
    let table = |rng: &mut R| -> Vec<u32> {
        (0..size)
            .map(|x| {
                if fixed_point_free {
                    let v = uniform_below(rng, size - 1);
                    (if v >= x { v + 1 } else { v }) as u32
                } else {
                    uniform_below(rng, size) as u32
                }
            })
            .collect()
    };
    let f1 = table(rng);
    let f2 = table(rng);
    SplitStateTamperFn::new(f1, f2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;

    #[test]
    fn spec_example() {
        let f = BitTamperFn::parse("KF01").unwrap();
        let x = BitWord::from_bit_str("1010").unwrap();
        assert_eq!(f.apply(&x).unwrap().to_string(), "1101");
        let p = f.partition();
        assert_eq!(p.frozen, vec![2, 3]);
        assert_eq!(p.flipped, vec![1]);
        assert_eq!(p.kept, vec![0]);
    }

    #[test]
    fn enumeration_counts() {
        let all: Vec<_> = enumerate_bit_tampers(2, DEFAULT_ENUMERATION_GUARD).unwrap().collect();
        assert_eq!(all.len(), 16);
        assert_eq!(all.iter().filter(|f| f.is_identity()).count(), 1);
        assert_eq!(all.iter().filter(|f| f.is_constant()).count(), 4);
        assert!(enumerate_bit_tampers(11, DEFAULT_ENUMERATION_GUARD).is_err());
    }

    #[test]
    fn json_forms() {
        let f = TamperFn::Bits(BitTamperFn::parse("KF01").unwrap());
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"type":"bits","actions":"KF01"}"#);
        let g: TamperFn = serde_json::from_str(r#"{"type":"split","f1":[1,0],"f2":[0,0]}"#).unwrap();
        assert_eq!(g.input_bits(), 2);
        assert!(serde_json::from_str::<TamperFn>(r#"{"type":"split","f1":[1,0,2],"f2":[0,0,0]}"#).is_err());
        assert!(serde_json::from_str::<TamperFn>(r#"{"type":"bits","actions":"KX"}"#).is_err());
    }

    #[test]
    fn split_apply_and_fixed_points() {
        let f = SplitStateTamperFn::new(vec![1, 0], vec![1, 1]).unwrap();
        assert!(f.f1_fixed_point_free());
        assert!(!f.f2_fixed_point_free());
        let w = BitWord::from_bit_str("00").unwrap();
        assert_eq!(f.apply(&w).unwrap().to_string(), "11");
        let mut rng = RngSeed::from_u64(3).rng();
        let g = random_split_tamper(3, true, &mut rng).unwrap();
        assert!(g.f1_fixed_point_free() && g.f2_fixed_point_free());
    }

    #[test]
    fn profiles() {
        let mut rng = RngSeed::from_u64(4).rng();
        let id = random_tamper(12, &TamperProfile::new(1.0, 0.0, 0.0).unwrap(), &mut rng).unwrap();
        assert!(id.is_identity());
        let c = random_tamper(12, &TamperProfile::new(0.0, 0.0, 1.0).unwrap(), &mut rng).unwrap();
        assert!(c.is_constant());
        assert!(TamperProfile::new(0.5, 0.5, 0.5).is_err());
    }
}
