//! Coding schemes as black boxes, the `D_f` sampler, and non-malleability
//! error estimates.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitWord;
use crate::dist::{
    confidence_radius, statistical_distance, FiniteDist, Tally, DEFAULT_ETA,
};
use crate::error::{Error, Result};
use crate::rng::{random_word, uniform_below, RngSeed};
use crate::simulator::{code_rows, fit_simulator, Objective, SimulatorFit};
use crate::symbol::Symbol;
use crate::tamper::Tamper;

/// Default cap on `Σ_s |coins(s)|` for exact enumeration.
pub const DEFAULT_EXACT_GUARD: u128 = 1 << 28;

/// An encoder/decoder pair. The encoder's coins are a uniform index into a
/// finite space whose size may depend on the message.
pub trait CodingScheme: Sync {
    fn message_bits(&self) -> usize;
    fn codeword_bits(&self) -> usize;
    /// Number of equally likely coin values for message `s`.
    fn coin_space(&self, s: &BitWord) -> u128;
    /// Encoding of `s` under coin value `coins < coin_space(s)`.
    fn encode_with_coins(&self, s: &BitWord, coins: u128) -> Result<BitWord>;
    fn decode(&self, w: &BitWord) -> Result<Symbol>;

    fn encode(&self, s: &BitWord, rng: &mut dyn RngCore) -> Result<BitWord> {
        let space = self.coin_space(s);
        let coins = uniform_u128(rng, space);
        self.encode_with_coins(s, coins)
    }
}

/// Uniform integer below `bound` (any `u128`).
pub fn uniform_u128(rng: &mut dyn RngCore, bound: u128) -> u128 {
    assert!(bound > 0);
    if let Ok(b) = u64::try_from(bound) {
        return uniform_below(rng, b) as u128;
    }
    let bits = 128 - (bound - 1).leading_zeros();
    loop {
        let v = ((rng.next_u64() as u128) << 64 | rng.next_u64() as u128) >> (128 - bits);
        if v < bound {
            return v;
        }
    }
}

/// Exact enumeration or Monte-Carlo sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SimMode {
    Exact { guard: u128 },
    Sampled { samples: u64 },
}

impl SimMode {
    pub fn exact() -> Self {
        SimMode::Exact { guard: DEFAULT_EXACT_GUARD }
    }
}

/// Which messages an estimate ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "messages", rename_all = "snake_case")]
pub enum MessageSet {
    All,
    Sampled { count: u64 },
}

fn all_messages(k: usize) -> Result<Vec<BitWord>> {
    if k > 24 {
        return Err(Error::GuardExceeded {
            what: "message enumeration".into(),
            size: 1u128 << k.min(127),
            guard: 1 << 24,
        });
    }
    Ok((0..1u64 << k).map(|v| BitWord::from_u64(v, k)).collect())
}

/// Chosen messages, in a deterministic order.
pub fn choose_messages(k: usize, set: MessageSet, seed: &RngSeed) -> Result<Vec<BitWord>> {
    match set {
        MessageSet::All => all_messages(k),
        MessageSet::Sampled { count } => {
            let mut rng = seed.derive(0x6d65_7373).rng();
            Ok((0..count).map(|_| random_word(&mut rng, k)).collect())
        }
    }
}

fn outcome<S: CodingScheme + ?Sized, F: Tamper + ?Sized>(
    scheme: &S,
    f: &F,
    s: &BitWord,
    coins: u128,
) -> Result<Symbol> {
    let x = scheme.encode_with_coins(s, coins)?;
    scheme.decode(&f.apply(&x)?)
}

fn check_exact_guard<S: CodingScheme + ?Sized>(scheme: &S, messages: &[BitWord], guard: u128) -> Result<()> {
    let work: u128 = messages.iter().map(|s| scheme.coin_space(s)).sum();
    if work > guard {
        return Err(Error::GuardExceeded { what: "exact encoder enumeration".into(), size: work, guard });
    }
    Ok(())
}

/// Law of `Dec(f(Enc(s)))` for one message.
pub fn outcome_distribution<S: CodingScheme + ?Sized, F: Tamper + ?Sized>(
    scheme: &S,
    f: &F,
    s: &BitWord,
    mode: SimMode,
    seed: &RngSeed,
) -> Result<FiniteDist> {
    check_lengths(scheme, f)?;
    let k = scheme.message_bits();
    let mut t = Tally::new();
    match mode {
        SimMode::Exact { guard } => {
            check_exact_guard(scheme, std::slice::from_ref(s), guard)?;
            for c in 0..scheme.coin_space(s) {
                t.add(outcome(scheme, f, s, c)?, 1);
            }
            t.into_exact(k)
        }
        SimMode::Sampled { samples } => {
            let mut rng = seed.rng();
            for _ in 0..samples {
                let x = scheme.encode(s, &mut rng)?;
                t.add(scheme.decode(&f.apply(&x)?)?, 1);
            }
            t.into_empirical(k)
        }
    }
}

fn check_lengths<S: CodingScheme + ?Sized, F: Tamper + ?Sized>(scheme: &S, f: &F) -> Result<()> {
    if scheme.codeword_bits() != f.input_bits() {
        return Err(Error::LengthMismatch { expected: scheme.codeword_bits(), actual: f.input_bits() });
    }
    Ok(())
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// The sampler of `D_f`: draw `S` uniform, `X = f(Enc(S))`; emit `same` when
/// `Dec(X) = S` and `Dec(X)` otherwise.
///
/// Exact mode weights each message by `1/2^k` and each of its coins by
/// `1/|coins(s)|`, using the least common multiple of the coin-space sizes as
/// the common denominator.
pub fn simulate_df<S: CodingScheme + ?Sized, F: Tamper + ?Sized>(
    scheme: &S,
    f: &F,
    mode: SimMode,
    seed: &RngSeed,
) -> Result<FiniteDist> {
    check_lengths(scheme, f)?;
    let k = scheme.message_bits();
    let relabel = |s: &BitWord, y: Symbol| match &y {
        Symbol::Message(m) if m == s => Symbol::Same,
        _ => y,
    };
    match mode {
        SimMode::Exact { guard } => {
            let messages = all_messages(k)?;
            check_exact_guard(scheme, &messages, guard)?;
            let lcm = messages.iter().try_fold(1u128, |acc, s| {
                let c = scheme.coin_space(s);
                (acc / gcd(acc, c)).checked_mul(c)
            });
            let lcm = lcm.ok_or_else(|| Error::InvalidParams("coin-space lcm overflows".into()))?;
            let parts = messages
                .par_iter()
                .map(|s| {
                    let space = scheme.coin_space(s);
                    let mut t = Tally::new();
                    for c in 0..space {
                        t.add(relabel(s, outcome(scheme, f, s, c)?), lcm / space);
                    }
                    Ok(t)
                })
                .collect::<Result<Vec<Tally>>>()?;
            let mut total = Tally::new();
            for p in &parts {
                total.merge(p);
            }
            total.into_exact(k)
        }
        SimMode::Sampled { samples } => {
            let mut rng = seed.rng();
            let mut t = Tally::new();
            for _ in 0..samples {
                let s = random_word(&mut rng, k);
                let x = scheme.encode(&s, &mut rng)?;
                let y = scheme.decode(&f.apply(&x)?)?;
                t.add(relabel(&s, y), 1);
            }
            t.into_empirical(k)
        }
    }
}

/// A non-malleability error estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NmEstimate {
    pub eps: f64,
    /// Sampling uncertainty: zero for exact computations, otherwise the sum of
    /// the confidence radii of the empirical distributions being compared.
    pub radius: f64,
    pub worst_message: BitWord,
    pub per_message: Vec<(BitWord, f64)>,
}

/// `max_s SD(Dec(f(Enc(s))), copy(d_f, s))` over the chosen messages.
pub fn estimate_nm_error<S: CodingScheme + ?Sized, F: Tamper + ?Sized>(
    scheme: &S,
    f: &F,
    d_f: &FiniteDist,
    messages: MessageSet,
    mode: SimMode,
    seed: &RngSeed,
) -> Result<NmEstimate> {
    let chosen = choose_messages(scheme.message_bits(), messages, seed)?;
    if chosen.is_empty() {
        return Err(Error::EmptySamples);
    }
    let per_message = chosen
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let dist = outcome_distribution(scheme, f, s, mode, &seed.derive(1 + i as u64))?;
            Ok((s.clone(), statistical_distance(&dist, &d_f.push_copy(s)?)?))
        })
        .collect::<Result<Vec<(BitWord, f64)>>>()?;
    let (worst_message, eps) = per_message
        .iter()
        .fold((chosen[0].clone(), f64::NEG_INFINITY), |acc, (s, e)| if *e > acc.1 { (s.clone(), *e) } else { acc });
    let mut radius = 0.0;
    if let SimMode::Sampled { samples } = mode {
        radius += confidence_radius(samples, DEFAULT_ETA);
    }
    if let Some(n) = d_f.samples() {
        radius += confidence_radius(n, DEFAULT_ETA);
    }
    Ok(NmEstimate { eps, radius, worst_message, per_message })
}

/// Exact per-message outcome laws for every message.
pub fn all_outcome_distributions<S: CodingScheme + ?Sized, F: Tamper + ?Sized>(
    scheme: &S,
    f: &F,
    guard: u128,
) -> Result<Vec<(BitWord, FiniteDist)>> {
    let messages = all_messages(scheme.message_bits())?;
    check_exact_guard(scheme, &messages, guard)?;
    messages
        .par_iter()
        .map(|s| Ok((s.clone(), outcome_distribution(scheme, f, s, SimMode::Exact { guard }, &RngSeed::from_u64(0))?)))
        .collect()
}

/// The smallest achievable non-malleability error for `f` over all simulator
/// distributions, by exact enumeration and a linear program.
pub fn optimal_nm_error<S: CodingScheme + ?Sized, F: Tamper + ?Sized>(
    scheme: &S,
    f: &F,
    guard: u128,
) -> Result<SimulatorFit> {
    let per_message = all_outcome_distributions(scheme, f, guard)?;
    fit_simulator(&code_rows(&per_message), Objective::Worst, scheme.message_bits())
}
