//! Exact checks of distance, independence and linearity.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bits::BitWord;
use crate::error::{Error, Result};
use crate::inner::combinations;
use crate::report::{CheckMode, PropertyReport};
use crate::rng::{random_word, uniform_below, RngSeed};
use crate::symbol::Symbol;

use super::code::LecssCode;

/// Default cap for exhaustive enumerations (`q^k` codewords, `q^{k0}` randomness).
pub const DEFAULT_LECSS_GUARD: u128 = 1 << 20;

/// The three LECSS checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LecssVerification {
    pub distance: PropertyReport,
    pub independence: PropertyReport,
    pub linearity: PropertyReport,
}

impl LecssVerification {
    pub fn pass(&self) -> bool {
        self.distance.pass && self.independence.pass && self.linearity.pass
    }

    pub fn reports(&self) -> [&PropertyReport; 3] {
        [&self.distance, &self.independence, &self.linearity]
    }
}

fn random_symbols<R: RngCore + ?Sized>(rng: &mut R, q: u32, len: usize) -> Vec<u16> {
    (0..len).map(|_| uniform_below(rng, q as u64) as u16).collect()
}

fn distance_report(code: &LecssCode, trials: u64, guard: u128, rng: &mut impl RngCore) -> PropertyReport {
    let q = code.q();
    let k = code.k();
    let weight = |c: &[u16]| code.encode_coefficients(c).iter().filter(|&&x| x != 0).count();
    let total = (q as u128).pow(k as u32);
    let (mode, checked, worst) = if total <= guard {
        let mut best = (usize::MAX, Vec::new());
        for idx in 1..total {
            let mut x = idx;
            let coeffs: Vec<u16> = (0..k)
                .map(|_| {
                    let d = (x % q as u128) as u16;
                    x /= q as u128;
                    d
                })
                .collect();
            let w = weight(&coeffs);
            if w < best.0 {
                best = (w, coeffs);
            }
        }
        (CheckMode::Exhaustive, (total - 1) as u64, best)
    } else {
        let mut best = (usize::MAX, Vec::new());
        for _ in 0..trials {
            let coeffs = random_symbols(rng, q, k);
            if coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            let w = weight(&coeffs);
            if w < best.0 {
                best = (w, coeffs);
            }
        }
        (CheckMode::Sampled { samples: trials, radius: 0.0 }, trials, best)
    };
    let d = code.distance();
    PropertyReport::new(
        format!("distance: every nonzero codeword has weight ≥ n − k + 1 = {d}"),
        mode,
        checked,
        worst.0 as f64,
        d as f64,
        format!("coefficients {:?} give weight {}", worst.1, worst.0),
        worst.0 >= d,
    )
}

fn independence_report(
    code: &LecssCode,
    trials: u64,
    guard: u128,
    rng: &mut impl RngCore,
) -> Result<PropertyReport> {
    let space = code.randomness_space();
    if space > guard {
        return Err(Error::GuardExceeded { what: "LECSS randomness enumeration".into(), size: space, guard });
    }
    let k0 = code.k0();
    let q = code.q() as usize;
    let sets = combinations(code.n(), k0);
    let kbits = code.message_len();
    let messages: Vec<BitWord> = if kbits <= 20 && (1u64 << kbits) <= trials {
        (0..1u64 << kbits).map(|v| BitWord::from_u64(v, kbits)).collect()
    } else {
        (0..trials).map(|_| random_word(rng, kbits)).collect()
    };
    let cells = q.pow(k0 as u32);
    let mut worst = (0u128, String::from("none"));
    let mut checked = 0u64;
    for s in &messages {
        let msg = code.unpack(s);
        let words: Vec<Vec<u16>> =
            (0..space).map(|c| code.encode_symbols(&code.randomness_from_index(c), &msg)).collect();
        for set in &sets {
            let mut counts = vec![0u128; cells];
            for w in &words {
                let idx = set.iter().rev().fold(0usize, |acc, &j| acc * q + w[j] as usize);
                counts[idx] += 1;
            }
            // ½ Σ |c/space − 1/cells| scaled by 2·space·cells
            let num: u128 = counts.iter().map(|&c| (c * cells as u128).abs_diff(space)).sum();
            checked += 1;
            if num > worst.0 || worst.1 == "none" {
                worst = (num, format!("message {s}, coordinates {set:?}"));
            }
        }
    }
    let dist = worst.0 as f64 / (2 * space * cells as u128) as f64;
    let mode = if messages.len() as u128 == 1u128 << kbits.min(127) {
        CheckMode::Exhaustive
    } else {
        CheckMode::Sampled { samples: messages.len() as u64, radius: 0.0 }
    };
    Ok(PropertyReport::new(
        format!("independence: every {k0} symbols ({} bits) of an encoding are exactly uniform", k0 * code.symbol_bits()),
        mode,
        checked,
        dist,
        0.0,
        format!("{}: distance {dist}", worst.1),
        worst.0 == 0,
    ))
}

fn linearity_report(code: &LecssCode, trials: u64, rng: &mut impl RngCore) -> Result<PropertyReport> {
    let kbits = code.message_len();
    let mut violation = None;
    for _ in 0..trials {
        let (s, t) = (random_word(rng, kbits), random_word(rng, kbits));
        let w = code.encode(&s, rng)?;
        let v = code.encode(&t, rng)?;
        let sum = code.decode(&w.xor(&v)?)?;
        if sum != Symbol::Message(s.xor(&t)?) {
            violation = Some(format!("Dec({w} ⊕ {v}) = {sum:?}"));
            break;
        }
    }
    let pass = violation.is_none();
    Ok(PropertyReport::new(
        "linearity: Dec(w ⊕ w') = Dec(w) ⊕ Dec(w') on decodable pairs",
        CheckMode::Sampled { samples: trials, radius: 0.0 },
        trials,
        if pass { 0.0 } else { 1.0 },
        0.0,
        violation.unwrap_or_else(|| "no violations".into()),
        pass,
    ))
}

/// Distance (exhaustive when `q^k ≤ guard`), exact `k0`-symbol independence
/// over all randomness for `trials` messages (all messages when fewer), and
/// linearity on `trials` random codeword pairs.
pub fn verify_lecss(code: &LecssCode, trials: u64, seed: &RngSeed, guard: u128) -> Result<LecssVerification> {
    let mut rng = seed.rng();
    Ok(LecssVerification {
        distance: distance_report(code, trials, guard, &mut rng),
        independence: independence_report(code, trials, guard, &mut rng)?,
        linearity: linearity_report(code, trials, &mut rng)?,
    })
}

/// For `codewords` random codewords, every corruption of between 1 and
/// `max_errors` symbols (every position set, every nonzero error value) must
/// decode to ⊥.
pub fn check_corruption_detection(
    code: &LecssCode,
    codewords: u64,
    max_errors: usize,
    seed: &RngSeed,
) -> Result<PropertyReport> {
    if max_errors >= code.distance() {
        return Err(Error::InvalidParams(format!(
            "{max_errors} errors can reach another codeword (distance {})",
            code.distance()
        )));
    }
    let mut rng = seed.rng();
    let q = code.q() as u16;
    let mut checked = 0u64;
    let mut witness = None;
    'outer: for _ in 0..codewords {
        let msg = random_symbols(&mut rng, code.q(), code.k() - code.k0());
        let rand = random_symbols(&mut rng, code.q(), code.k0());
        let w = code.encode_symbols(&rand, &msg);
        for e in 1..=max_errors {
            for set in combinations(code.n(), e) {
                let patterns = ((q - 1) as u64).pow(e as u32);
                for p in 0..patterns {
                    let mut bad = w.clone();
                    let mut x = p;
                    for &j in &set {
                        bad[j] ^= (x % (q as u64 - 1)) as u16 + 1;
                        x /= q as u64 - 1;
                    }
                    checked += 1;
                    if code.decode_symbols(&bad).is_some() {
                        witness = Some(format!("codeword {w:?} corrupted at {set:?} to {bad:?} decodes"));
                        break 'outer;
                    }
                }
            }
        }
    }
    let pass = witness.is_none();
    Ok(PropertyReport::new(
        format!("detection: every corruption of 1..={max_errors} symbols decodes to ⊥"),
        CheckMode::Sampled { samples: codewords, radius: 0.0 },
        checked,
        if pass { 0.0 } else { 1.0 },
        0.0,
        witness.unwrap_or_else(|| "all corruptions rejected".into()),
        pass,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lecss::build_lecss;

    #[test]
    fn toy_code_verifies() {
        let c = build_lecss(8, 0.5).unwrap();
        let v = verify_lecss(&c, 64, &RngSeed::from_u64(1), DEFAULT_LECSS_GUARD).unwrap();
        assert!(v.pass(), "{v:#?}");
        assert_eq!(v.distance.worst_value, 3.0);
        assert_eq!(v.distance.mode, CheckMode::Exhaustive);
    }

    #[test]
    fn exhaustive_distance_small() {
        let c = LecssCode::new(3, 8, 4, 2).unwrap();
        let v = verify_lecss(&c, 16, &RngSeed::from_u64(2), DEFAULT_LECSS_GUARD).unwrap();
        assert_eq!(v.distance.mode, CheckMode::Exhaustive);
        assert_eq!(v.distance.worst_value, 5.0);
    }

    #[test]
    fn corruption_limit() {
        let c = build_lecss(8, 0.5).unwrap();
        assert!(check_corruption_detection(&c, 3, 2, &RngSeed::from_u64(3)).unwrap().pass);
        assert!(check_corruption_detection(&c, 3, 3, &RngSeed::from_u64(3)).is_err());
    }
}
