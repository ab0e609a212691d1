//! Exhaustive verifiers for the inner code's combinatorial properties.

use rand::RngCore;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::report::{CheckMode, PropertyReport};
use crate::rng::{uniform_below, uniform_bits, RngSeed};
use crate::tamper::{BitAction, BitTamperFn};

use super::code::InnerCode;

/// Default cap on `3^n · 2^n` for the sub-cube sweep.
pub const DEFAULT_CUBE_GUARD: u128 = 1 << 36;

/// Default cap on the work of the independence and error-detection sweeps.
pub const DEFAULT_SWEEP_GUARD: u128 = 1 << 34;

fn pow3(n: usize) -> u128 {
    3u128.pow(n as u32)
}

fn describe_cube(n: usize, frozen_mask: u64, values: u64) -> String {
    (0..n)
        .map(|i| {
            if frozen_mask >> i & 1 == 0 {
                '*'
            } else if values >> i & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Checks that every sub-cube with at least one free coordinate has at least
/// half of its words decoding to ⊥.
///
/// Cubes are indexed by base-3 strings (digit `i` is 0, 1, or 2 = free). The
/// number of codewords in a cube is the sum over the two cubes that fix its
/// first free coordinate, so one pass in increasing index order counts all of
/// them. Witnesses are written coordinate by coordinate with `*` for free.
pub fn verify_cube_property(code: &InnerCode, guard: u128) -> Result<PropertyReport> {
    let n = code.params().n;
    let work = pow3(n).saturating_mul(1u128 << n);
    if work > guard {
        return Err(Error::GuardExceeded { what: "sub-cube sweep (3^n·2^n)".into(), size: work, guard });
    }
    let total = pow3(n) as usize;
    let pw: Vec<usize> = (0..n).map(|i| 3usize.pow(i as u32)).collect();
    let mut count = vec![0u32; total];
    let mut digits = vec![0u8; n];
    let mut checked = 0u64;
    // worst = (codeword count, free coordinates, frozen mask, values)
    let mut worst: Option<(u32, usize, u64, u64)> = None;
    for c in 0..total {
        if c > 0 {
            for d in digits.iter_mut() {
                *d += 1;
                if *d < 3 {
                    break;
                }
                *d = 0;
            }
        }
        let first_free = digits.iter().position(|&d| d == 2);
        match first_free {
            None => {
                let w = digits.iter().enumerate().fold(0u64, |acc, (i, &d)| acc | (d as u64) << i);
                count[c] = code.decode_u64(w).is_some() as u32;
            }
            Some(p) => {
                count[c] = count[c - 2 * pw[p]] + count[c - pw[p]];
                let free = digits.iter().filter(|&&d| d == 2).count();
                checked += 1;
                // codeword fraction count / 2^free, compared by cross-multiplication
                let better = match worst {
                    None => true,
                    Some((wc, wf, _, _)) => (count[c] as u128) << wf > (wc as u128) << free,
                };
                if better {
                    let (mut mask, mut vals) = (0u64, 0u64);
                    for (i, &d) in digits.iter().enumerate() {
                        if d != 2 {
                            mask |= 1 << i;
                            vals |= (d as u64) << i;
                        }
                    }
                    worst = Some((count[c], free, mask, vals));
                }
            }
        }
    }
    let Some((wc, wf, mask, vals)) = worst else {
        return Err(Error::InvalidParams("n = 0 has no sub-cubes".into()));
    };
    let bottom_fraction = 1.0 - wc as f64 / (1u64 << wf) as f64;
    let pass = 2 * (wc as u128) <= 1u128 << wf;
    Ok(PropertyReport::new(
        "cube property: every sub-cube decodes to ⊥ with probability ≥ 1/2",
        CheckMode::Exhaustive,
        checked,
        bottom_fraction,
        0.5,
        format!("cube {} has ⊥-fraction {bottom_fraction}", describe_cube(n, mask, vals)),
        pass,
    ))
}

/// Reference implementation enumerating every cube and every word inside it.
pub fn cube_min_bottom_fraction_naive(code: &InnerCode) -> f64 {
    let n = code.params().n;
    let mut best = 1.0f64;
    for c in 0..pow3(n) as u64 {
        let (mut vals, mut free) = (0u64, Vec::new());
        let mut x = c;
        for i in 0..n {
            match x % 3 {
                2 => free.push(i),
                d => vals |= d << i,
            }
            x /= 3;
        }
        if free.is_empty() {
            continue;
        }
        let mut bottoms = 0u64;
        for a in 0..1u64 << free.len() {
            let mut w = vals;
            for (j, &i) in free.iter().enumerate() {
                w |= (a >> j & 1) << i;
            }
            bottoms += code.decode_u64(w).is_none() as u64;
        }
        best = best.min(bottoms as f64 / (1u64 << free.len()) as f64);
    }
    best
}

/// Cube sweep on `cubes` uniformly random cubes with at least one free
/// coordinate; each cube's ⊥-fraction is computed exactly.
pub fn verify_cube_property_sampled(code: &InnerCode, cubes: u64, seed: &RngSeed) -> Result<PropertyReport> {
    let n = code.params().n;
    if n > 24 {
        return Err(Error::GuardExceeded { what: "sampled cube size".into(), size: 1 << n, guard: 1 << 24 });
    }
    let mut rng = seed.rng();
    let mut worst: Option<(f64, u64, u64)> = None;
    for _ in 0..cubes {
        let (mask, vals) = loop {
            let (mut mask, mut vals) = (0u64, 0u64);
            for i in 0..n {
                match uniform_below(&mut rng, 3) {
                    2 => {}
                    d => {
                        mask |= 1 << i;
                        vals |= d << i;
                    }
                }
            }
            if mask.count_ones() < n as u32 {
                break (mask, vals);
            }
        };
        let free: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let mut bottoms = 0u64;
        for a in 0..1u64 << free.len() {
            let mut w = vals;
            for (j, &i) in free.iter().enumerate() {
                w |= (a >> j & 1) << i;
            }
            bottoms += code.decode_u64(w).is_none() as u64;
        }
        let frac = bottoms as f64 / (1u64 << free.len()) as f64;
        if worst.is_none_or(|(f, _, _)| frac < f) {
            worst = Some((frac, mask, vals));
        }
    }
    let (frac, mask, vals) = worst.ok_or(Error::EmptySamples)?;
    Ok(PropertyReport::new(
        "cube property (sampled cubes)",
        CheckMode::Sampled { samples: cubes, radius: 0.0 },
        cubes,
        frac,
        0.5,
        format!("cube {} has ⊥-fraction {frac}", describe_cube(n, mask, vals)),
        frac >= 0.5,
    ))
}

/// All subsets of `0..n` of size exactly `j`, in lexicographic order.
pub(crate) fn combinations(n: usize, j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(j);
    fn rec(start: usize, n: usize, j: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == j {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < j - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, j, cur, out);
            cur.pop();
        }
    }
    rec(0, n, j, &mut cur, &mut out);
    out
}

fn binomial(n: usize, j: usize) -> u128 {
    (0..j).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Distance from uniform of the restriction of the flat distribution on
/// `words` to the coordinates `set`, as `(numerator, denominator)`.
pub(crate) fn marginal_distance(words: &[u64], set: &[usize]) -> (u128, u128) {
    let cells = 1usize << set.len();
    let mut counts = vec![0u128; cells];
    for &w in words {
        let mut idx = 0usize;
        for (j, &i) in set.iter().enumerate() {
            idx |= ((w >> i & 1) as usize) << j;
        }
        counts[idx] += 1;
    }
    let t = words.len() as u128;
    let num: u128 = counts.iter().map(|&c| (c * cells as u128).abs_diff(t)).sum();
    (num, 2 * t * cells as u128)
}

/// Checks that for every message `s` and every coordinate set `T` with
/// `1 ≤ |T| ≤ ell`, the flat distribution on `E(s)` restricted to `T` is
/// within `eps` of uniform. Distances are exact.
pub fn verify_bounded_independence(code: &InnerCode, ell: usize, eps: f64, guard: u128) -> Result<PropertyReport> {
    let p = code.params();
    if ell > p.n {
        return Err(Error::InvalidParams(format!("ℓ = {ell} exceeds n = {}", p.n)));
    }
    let sets: u128 = (1..=ell).map(|j| binomial(p.n, j) << j).sum();
    let work = sets.saturating_mul(p.codebook_size() as u128);
    if work > guard {
        return Err(Error::GuardExceeded { what: "bounded-independence sweep".into(), size: work, guard });
    }
    let index_sets: Vec<Vec<usize>> = (1..=ell).flat_map(|j| combinations(p.n, j)).collect();
    let messages = 1u64 << p.k;
    let results: Vec<(f64, u64, usize)> = (0..messages)
        .into_par_iter()
        .map(|s| {
            let words = code.codewords_of(s);
            let mut best = (0.0f64, s, usize::MAX);
            for (ti, set) in index_sets.iter().enumerate() {
                let (num, den) = marginal_distance(words, set);
                let d = num as f64 / den as f64;
                if d > best.0 || best.2 == usize::MAX {
                    best = (d, s, ti);
                }
            }
            best
        })
        .collect();
    let checked = messages * index_sets.len() as u64;
    let worst = results.into_iter().fold((0.0f64, 0u64, usize::MAX), |a, b| if b.0 > a.0 || a.2 == usize::MAX { b } else { a });
    let (d, s, ti) = worst;
    let desc = if ti == usize::MAX {
        "no index sets (ℓ = 0)".to_string()
    } else {
        format!("message {s}, index set {:?}: distance {d}", index_sets[ti])
    };
    Ok(PropertyReport::new(
        format!("bounded independence: every ≤{ell}-coordinate marginal within {eps} of uniform"),
        CheckMode::Exhaustive,
        checked,
        d,
        eps,
        desc,
        d <= eps,
    ))
}

/// `Pr[Dec(f(Enc(s))) = ⊥]` over the flat encoder, as a count out of `t`.
fn bottom_count(code: &InnerCode, f: &BitTamperFn, s: u64) -> u64 {
    code.codewords_of(s).iter().filter(|&&w| code.decode_u64(f.apply_u64(w)).is_none()).count() as u64
}

/// Checks that every bit-tampering function other than the identity and the
/// constants sends every message's encoding to ⊥ with probability ≥ 1/3.
/// Exhaustive over all `4^n` functions and all messages.
pub fn verify_error_detection(code: &InnerCode, guard: u128) -> Result<PropertyReport> {
    let p = code.params();
    let work = (1u128 << (2 * p.n)).saturating_mul(p.codebook_size() as u128);
    if work > guard {
        return Err(Error::GuardExceeded { what: "error-detection sweep (4^n·2^k·t)".into(), size: work, guard });
    }
    let messages = 1u64 << p.k;
    let worst = (0..1u64 << (2 * p.n))
        .into_par_iter()
        .filter_map(|idx| {
            let f = BitTamperFn::from_index(p.n, idx as u128);
            if f.is_identity() || f.is_constant() {
                return None;
            }
            (0..messages).map(|s| (bottom_count(code, &f, s), idx, s)).min_by_key(|x| x.0)
        })
        .min_by_key(|x| (x.0, x.1, x.2));
    let functions = (1u64 << (2 * p.n)) - 1 - (1u64 << p.n);
    error_detection_report(code, worst, functions * messages, CheckMode::Exhaustive)
}

fn error_detection_report(
    code: &InnerCode,
    worst: Option<(u64, u64, u64)>,
    checked: u64,
    mode: CheckMode,
) -> Result<PropertyReport> {
    let p = code.params();
    let Some((count, idx, s)) = worst else {
        return Ok(PropertyReport::new(
            "error detection: Pr[⊥] ≥ 1/3 for non-identity, non-constant bit tampering",
            mode,
            0,
            1.0,
            1.0 / 3.0,
            "no eligible tampering functions".into(),
            true,
        ));
    };
    let f = BitTamperFn::from_index(p.n, idx as u128);
    let prob = count as f64 / p.t as f64;
    Ok(PropertyReport::new(
        "error detection: Pr[⊥] ≥ 1/3 for non-identity, non-constant bit tampering",
        mode,
        checked,
        prob,
        1.0 / 3.0,
        format!("f = {}, message {s}: Pr[⊥] = {count}/{}", f.action_string(), p.t),
        3 * count >= p.t,
    ))
}

/// Error-detection check on `functions` random eligible tampering functions
/// and random messages; each probability is exact.
pub fn verify_error_detection_sampled(code: &InnerCode, functions: u64, seed: &RngSeed) -> Result<PropertyReport> {
    let p = code.params();
    if p.n > 31 {
        return Err(Error::InvalidParams("sampled error detection supports n ≤ 31".into()));
    }
    let mut rng = seed.rng();
    let mut worst: Option<(u64, u64, u64)> = None;
    for _ in 0..functions {
        let idx = loop {
            let idx = uniform_bits(&mut rng, 2 * p.n);
            let f = BitTamperFn::from_index(p.n, idx as u128);
            if !f.is_identity() && !f.is_constant() {
                break idx;
            }
        };
        let s = rng.next_u64() & ((1u64 << p.k) - 1);
        let f = BitTamperFn::from_index(p.n, idx as u128);
        let c = bottom_count(code, &f, s);
        if worst.is_none_or(|w| c < w.0) {
            worst = Some((c, idx, s));
        }
    }
    error_detection_report(code, worst, functions, CheckMode::Sampled { samples: functions, radius: 0.0 })
}

/// Whether `f` fixes every codeword while differing from the identity.
pub fn is_identity_on_codewords(code: &InnerCode, f: &BitTamperFn) -> bool {
    !f.is_identity() && code.codebook().iter().all(|&w| f.apply_u64(w) == w)
}

/// Tampering functions that freeze exactly one coordinate and keep the rest.
pub fn single_freeze_tampers(n: usize) -> Vec<BitTamperFn> {
    let mut out = Vec::new();
    for i in 0..n {
        for a in [BitAction::Set0, BitAction::Set1] {
            let mut actions = vec![BitAction::Keep; n];
            actions[i] = a;
            out.push(BitTamperFn::new(actions));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::InnerParams;

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(5, 0), vec![Vec::<usize>::new()]);
        assert_eq!(binomial(10, 3), 120);
    }

    #[test]
    fn total_code_fails_cube_property() {
        let p = InnerParams::new_unpacked(4, 4, 1, 0, 1).unwrap();
        let c = InnerCode::sample(p, &RngSeed::from_u64(1)).unwrap();
        let r = verify_cube_property(&c, DEFAULT_CUBE_GUARD).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_value, 0.0);
        assert!(r.counterexample.is_some());
    }

    #[test]
    fn full_packing_single_coordinate_balance() {
        // t = 2^(n-k): E(s) are the words with a given 2-bit suffix pattern when
        // the codebook is chosen as the cosets below.
        let n = 4;
        let book: Vec<u64> = (0..4u64).flat_map(|s| (0..4u64).map(move |a| a | s << 2)).collect();
        let p = InnerParams::new_unpacked(n, 2, 4, 0, 1).unwrap();
        let c = InnerCode::from_codebook(p, RngSeed::from_u64(0), book).unwrap();
        let r = verify_bounded_independence(&c, 1, 0.0, DEFAULT_SWEEP_GUARD).unwrap();
        // coordinates 2, 3 are constant within E(s): distance 1/2
        assert_eq!(r.worst_value, 0.5);
        let (num, den) = marginal_distance(c.codewords_of(1), &[0]);
        assert_eq!(num, 0);
        assert!(den > 0);
        assert!(verify_bounded_independence(&c, 0, 0.0, DEFAULT_SWEEP_GUARD).unwrap().pass);
    }

    #[test]
    fn guard_errors() {
        let p = InnerParams::new(20, 2, 4, 0, 1).unwrap();
        let c = InnerCode::sample(p, &RngSeed::from_u64(1)).unwrap();
        assert!(matches!(verify_cube_property(&c, DEFAULT_CUBE_GUARD), Err(Error::GuardExceeded { .. })));
        assert!(matches!(verify_error_detection(&c, DEFAULT_SWEEP_GUARD), Err(Error::GuardExceeded { .. })));
        assert!(verify_cube_property_sampled(&c, 50, &RngSeed::from_u64(2)).is_ok());
        assert!(verify_error_detection_sampled(&c, 50, &RngSeed::from_u64(2)).is_ok());
    }
}
