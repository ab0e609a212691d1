//! Finite distributions over `{0,1}^k ∪ {⊥, same}` and statistical distance.
//!
//! Distributions built from integer tallies (exact enumeration or sampling)
//! keep their counts, and the distance between two such distributions is
//! computed as an exact rational.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bits::BitWord;
use crate::error::{Error, Result};
use crate::symbol::Symbol;

/// Failure probability used for every reported confidence radius.
pub const DEFAULT_ETA: f64 = 1e-6;

/// Tolerance when checking that real-valued probabilities sum to one.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// How a distribution was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistKind {
    Exact,
    Empirical { samples: u64 },
}

#[derive(Clone, Debug, PartialEq)]
enum Weights {
    Counts {
        counts: BTreeMap<Symbol, u128>,
        total: u128,
    },
    Real(BTreeMap<Symbol, f64>),
}

/// A probability distribution with finite support.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDist {
    message_bits: usize,
    kind: DistKind,
    weights: Weights,
}

/// Integer tally that becomes a [`FiniteDist`].
#[derive(Clone, Debug, Default)]
pub struct Tally {
    counts: BTreeMap<Symbol, u128>,
    total: u128,
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, sym: Symbol, weight: u128) {
        if weight == 0 {
            return;
        }
        *self.counts.entry(sym).or_insert(0) += weight;
        self.total += weight;
    }

    pub fn merge(&mut self, other: &Tally) {
        for (s, &c) in &other.counts {
            self.add(s.clone(), c);
        }
    }

    /// Multiplies every count by `factor`.
    pub fn scale(&mut self, factor: u128) {
        for c in self.counts.values_mut() {
            *c *= factor;
        }
        self.total *= factor;
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn count(&self, sym: &Symbol) -> u128 {
        self.counts.get(sym).copied().unwrap_or(0)
    }

    pub fn into_exact(self, message_bits: usize) -> Result<FiniteDist> {
        FiniteDist::from_counts(message_bits, DistKind::Exact, self.counts, self.total)
    }

    pub fn into_empirical(self, message_bits: usize) -> Result<FiniteDist> {
        let samples = u64::try_from(self.total)
            .map_err(|_| Error::InvalidParams("sample count exceeds u64".into()))?;
        FiniteDist::from_counts(message_bits, DistKind::Empirical { samples }, self.counts, self.total)
    }
}

fn check_symbol(sym: &Symbol, message_bits: usize) -> Result<()> {
    if let Symbol::Message(m) = sym {
        if m.len() != message_bits {
            return Err(Error::LengthMismatch { expected: message_bits, actual: m.len() });
        }
    }
    Ok(())
}

impl FiniteDist {
    fn from_counts(
        message_bits: usize,
        kind: DistKind,
        mut counts: BTreeMap<Symbol, u128>,
        total: u128,
    ) -> Result<Self> {
        if total == 0 {
            return Err(Error::EmptySamples);
        }
        counts.retain(|_, c| *c > 0);
        let sum: u128 = counts.values().sum();
        if sum != total {
            return Err(Error::InvalidParams(format!("counts sum to {sum}, expected {total}")));
        }
        for s in counts.keys() {
            check_symbol(s, message_bits)?;
        }
        Ok(Self { message_bits, kind, weights: Weights::Counts { counts, total } })
    }

    /// Exact distribution with probabilities `count / total`.
    pub fn exact_counts(
        message_bits: usize,
        counts: BTreeMap<Symbol, u128>,
        total: u128,
    ) -> Result<Self> {
        Self::from_counts(message_bits, DistKind::Exact, counts, total)
    }

    /// Exact distribution from real probabilities; they must sum to one.
    pub fn exact_from_probs(
        message_bits: usize,
        probs: impl IntoIterator<Item = (Symbol, f64)>,
    ) -> Result<Self> {
        Self::real(message_bits, DistKind::Exact, probs)
    }

    fn real(
        message_bits: usize,
        kind: DistKind,
        probs: impl IntoIterator<Item = (Symbol, f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (s, p) in probs {
            check_symbol(&s, message_bits)?;
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::InvalidParams(format!("probability {p} for {s:?}")));
            }
            if p > 0.0 {
                *map.entry(s).or_insert(0.0) += p;
            }
        }
        let sum: f64 = map.values().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidParams(format!("probabilities sum to {sum}")));
        }
        for p in map.values_mut() {
            *p /= sum;
        }
        Ok(Self { message_bits, kind, weights: Weights::Real(map) })
    }

    pub fn point_mass(message_bits: usize, sym: Symbol) -> Result<Self> {
        let mut t = Tally::new();
        t.add(sym, 1);
        t.into_exact(message_bits)
    }

    /// Uniform over all `2^k` messages.
    pub fn uniform_messages(message_bits: usize) -> Result<Self> {
        if message_bits > 24 {
            return Err(Error::GuardExceeded {
                what: "uniform message distribution".into(),
                size: 1u128 << message_bits,
                guard: 1 << 24,
            });
        }
        let mut t = Tally::new();
        for v in 0..1u64 << message_bits {
            t.add(Symbol::Message(BitWord::from_u64(v, message_bits)), 1);
        }
        t.into_exact(message_bits)
    }

    pub fn message_bits(&self) -> usize {
        self.message_bits
    }

    pub fn kind(&self) -> DistKind {
        self.kind
    }

    pub fn samples(&self) -> Option<u64> {
        match self.kind {
            DistKind::Empirical { samples } => Some(samples),
            DistKind::Exact => None,
        }
    }

    /// Whether probabilities are held as exact rationals.
    pub fn has_counts(&self) -> bool {
        matches!(self.weights, Weights::Counts { .. })
    }

    pub fn prob(&self, sym: &Symbol) -> f64 {
        match &self.weights {
            Weights::Counts { counts, total } => {
                counts.get(sym).map_or(0.0, |&c| c as f64 / *total as f64)
            }
            Weights::Real(map) => map.get(sym).copied().unwrap_or(0.0),
        }
    }

    /// Exact probability when the distribution holds counts.
    pub fn exact_prob(&self, sym: &Symbol) -> Option<Ratio<i128>> {
        match &self.weights {
            Weights::Counts { counts, total } => {
                let c = counts.get(sym).copied().unwrap_or(0);
                Some(Ratio::new(c as i128, *total as i128))
            }
            Weights::Real(_) => None,
        }
    }

    /// Support with probabilities, in symbol order.
    pub fn iter(&self) -> Vec<(Symbol, f64)> {
        match &self.weights {
            Weights::Counts { counts, total } => counts
                .iter()
                .map(|(s, &c)| (s.clone(), c as f64 / *total as f64))
                .collect(),
            Weights::Real(map) => map.iter().map(|(s, &p)| (s.clone(), p)).collect(),
        }
    }

    pub fn support_len(&self) -> usize {
        match &self.weights {
            Weights::Counts { counts, .. } => counts.len(),
            Weights::Real(map) => map.len(),
        }
    }

    /// `copy(D, s)`: the mass on `same` moves to the message `s`.
    pub fn push_copy(&self, s: &BitWord) -> Result<FiniteDist> {
        if s.len() != self.message_bits {
            return Err(Error::LengthMismatch { expected: self.message_bits, actual: s.len() });
        }
        let target = Symbol::Message(s.clone());
        let weights = match &self.weights {
            Weights::Counts { counts, total } => {
                let mut out = counts.clone();
                if let Some(c) = out.remove(&Symbol::Same) {
                    *out.entry(target).or_insert(0) += c;
                }
                Weights::Counts { counts: out, total: *total }
            }
            Weights::Real(map) => {
                let mut out = map.clone();
                if let Some(p) = out.remove(&Symbol::Same) {
                    *out.entry(target).or_insert(0.0) += p;
                }
                Weights::Real(out)
            }
        };
        Ok(FiniteDist { message_bits: self.message_bits, kind: self.kind, weights })
    }

    pub fn to_json(&self) -> DistJson {
        DistJson {
            kind: match self.kind {
                DistKind::Exact => "exact".into(),
                DistKind::Empirical { .. } => "empirical".into(),
            },
            samples: self.samples(),
            bits: self.message_bits,
            support: self
                .iter()
                .into_iter()
                .map(|(s, p)| DistEntry { sym: s.tag(), p })
                .collect(),
        }
    }

    pub fn from_json(j: &DistJson) -> Result<Self> {
        let entries = j
            .support
            .iter()
            .map(|e| Ok((Symbol::from_tag(&e.sym, j.bits)?, e.p)))
            .collect::<Result<Vec<_>>>()?;
        match (j.kind.as_str(), j.samples) {
            ("exact", _) => Self::exact_from_probs(j.bits, entries),
            ("empirical", Some(n)) => {
                let mut counts = BTreeMap::new();
                for (s, p) in entries {
                    counts.insert(s, (p * n as f64).round() as u128);
                }
                Self::from_counts(j.bits, DistKind::Empirical { samples: n }, counts, n as u128)
            }
            ("empirical", None) => Err(Error::Parse("empirical distribution without samples".into())),
            (other, _) => Err(Error::Parse(format!("unknown distribution kind {other:?}"))),
        }
    }
}

/// Serialized form of [`FiniteDist`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistJson {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<u64>,
    /// Message length, needed to parse message tags.
    pub bits: usize,
    pub support: Vec<DistEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistEntry {
    pub sym: String,
    pub p: f64,
}

impl Serialize for FiniteDist {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteDist {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DistJson::deserialize(d)?;
        FiniteDist::from_json(&j).map_err(serde::de::Error::custom)
    }
}

fn check_universe(p: &FiniteDist, q: &FiniteDist) -> Result<()> {
    if p.message_bits != q.message_bits {
        return Err(Error::UniverseMismatch { left: p.message_bits, right: q.message_bits });
    }
    Ok(())
}

/// `SD(p, q) = ½ Σ |p(x) − q(x)|` as an exact rational, when both sides hold counts.
pub fn statistical_distance_exact(p: &FiniteDist, q: &FiniteDist) -> Result<Option<Ratio<i128>>> {
    check_universe(p, q)?;
    let (Weights::Counts { counts: cp, total: tp }, Weights::Counts { counts: cq, total: tq }) =
        (&p.weights, &q.weights)
    else {
        return Ok(None);
    };
    let (tp, tq) = (*tp as i128, *tq as i128);
    let Some(den) = tp.checked_mul(tq).and_then(|d| d.checked_mul(2)) else {
        return Ok(None);
    };
    let mut num: i128 = 0;
    let mut visit = |a: u128, b: u128| -> bool {
        let term = (a as i128).checked_mul(tq).zip((b as i128).checked_mul(tp));
        match term.and_then(|(x, y)| num.checked_add((x - y).abs())) {
            Some(v) => {
                num = v;
                true
            }
            None => false,
        }
    };
    for (s, &a) in cp {
        if !visit(a, cq.get(s).copied().unwrap_or(0)) {
            return Ok(None);
        }
    }
    for (s, &b) in cq {
        if !cp.contains_key(s) && !visit(0, b) {
            return Ok(None);
        }
    }
    Ok(Some(Ratio::new(num, den)))
}

/// Statistical distance, exact whenever both inputs hold counts.
pub fn statistical_distance(p: &FiniteDist, q: &FiniteDist) -> Result<f64> {
    if let Some(r) = statistical_distance_exact(p, q)? {
        return Ok(ratio_to_f64(&r));
    }
    let mut keys: Vec<Symbol> = p.iter().into_iter().map(|(s, _)| s).collect();
    keys.extend(q.iter().into_iter().map(|(s, _)| s));
    keys.sort();
    keys.dedup();
    let l1: f64 = keys.iter().map(|s| (p.prob(s) - q.prob(s)).abs()).sum();
    Ok(0.5 * l1)
}

pub fn ratio_to_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Empirical measure of a sample sequence.
pub fn empirical_dist(message_bits: usize, samples: &[Symbol]) -> Result<FiniteDist> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut t = Tally::new();
    for s in samples {
        t.add(s.clone(), 1);
    }
    t.into_empirical(message_bits)
}

/// Hoeffding radius `sqrt(ln(2/η) / (2·samples))`.
pub fn confidence_radius(samples: u64, eta: f64) -> f64 {
    ((2.0 / eta).ln() / (2.0 * samples as f64)).sqrt()
}
