//! Adversary taxonomy, canonical adversaries and attack experiments.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::code::{ConcatCode, EncoderCoins};
use super::plan::ConcatPlan;
use crate::bits::BitWord;
use crate::dist::{DistJson, DEFAULT_ETA};
use crate::error::{Error, Result};
use crate::rng::{random_word, uniform_below, RngSeed};
use crate::scheme::{estimate_nm_error, simulate_df, MessageSet, SimMode};
use crate::tamper::{random_tamper, BitAction, BitTamperFn, TamperProfile};

/// Which branch of the analysis an adversary falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseClass {
    #[serde(rename = "identity")]
    Identity,
    /// At least `n − t2/b` bits of `C'` are frozen.
    #[serde(rename = "case1")]
    Case1,
    /// Seed segment untouched and more than `n − δ2·n_b` bits of `C'` kept.
    #[serde(rename = "case2.1")]
    Case21,
    /// Seed segment untouched, at most `n − δ2·n_b` bits of `C'` kept.
    #[serde(rename = "case2.2")]
    Case22,
    /// Seed segment fully frozen.
    #[serde(rename = "case3")]
    Case3,
    #[serde(rename = "general")]
    General,
}

impl CaseClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseClass::Identity => "identity",
            CaseClass::Case1 => "case1",
            CaseClass::Case21 => "case2.1",
            CaseClass::Case22 => "case2.2",
            CaseClass::Case3 => "case3",
            CaseClass::General => "general",
        }
    }
}

fn check_len(plan: &ConcatPlan, f: &BitTamperFn) -> Result<()> {
    if f.len() != plan.derived.big_n {
        return Err(Error::LengthMismatch { expected: plan.derived.big_n, actual: f.len() });
    }
    Ok(())
}

pub fn classify(plan: &ConcatPlan, f: &BitTamperFn) -> Result<CaseClass> {
    check_len(plan, f)?;
    let d = &plan.derived;
    if f.is_identity() {
        return Ok(CaseClass::Identity);
    }
    let seed_part = f.segment(0, d.n1);
    let body = f.segment(d.n1, d.n).partition();
    if body.frozen.len() as f64 >= d.n as f64 - d.t2_blocks {
        return Ok(CaseClass::Case1);
    }
    if seed_part.is_identity() {
        return Ok(if body.kept.len() as f64 > d.n as f64 - d.delta2_blocks {
            CaseClass::Case21
        } else {
            CaseClass::Case22
        });
    }
    if seed_part.is_constant() {
        return Ok(CaseClass::Case3);
    }
    Ok(CaseClass::General)
}

fn pick_positions<R: RngCore + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx.truncate(count);
    idx
}

fn random_freeze<R: RngCore + ?Sized>(rng: &mut R) -> BitAction {
    if rng.next_u32() & 1 == 0 { BitAction::Set0 } else { BitAction::Set1 }
}

fn body_with(n: usize, base: impl Fn(usize) -> BitAction, overrides: &[(usize, BitAction)]) -> Vec<BitAction> {
    let mut a: Vec<BitAction> = (0..n).map(base).collect();
    for &(i, act) in overrides {
        a[i] = act;
    }
    a
}

fn join(seed_part: Vec<BitAction>, body: Vec<BitAction>) -> BitTamperFn {
    BitTamperFn::new(seed_part.into_iter().chain(body).collect())
}

/// A seed-segment action that freezes `Z'` to a valid seed-code codeword.
fn freeze_seed_to_codeword<R: RngCore + ?Sized>(code: &ConcatCode, rng: &mut R) -> Vec<BitAction> {
    let c1 = code.seed_code();
    let z = uniform_below(rng, 1 << c1.params().k);
    let w = c1.encode_u64(z, rng);
    (0..c1.params().n).map(|i| if w >> i & 1 == 1 { BitAction::Set1 } else { BitAction::Set0 }).collect()
}

/// `count` adversaries freezing all but `⌊t2/b⌋` bits of `C'`, with the
/// unfrozen bits kept or flipped and varied seed-segment actions.
pub fn case1_adversaries(code: &ConcatCode, count: usize, seed: &RngSeed) -> Vec<(String, BitTamperFn)> {
    let d = &code.plan().derived;
    let free = (d.t2_blocks.floor() as usize).min(d.n);
    let mut rng = seed.derive(0x6331).rng();
    let profile = TamperProfile::new(0.4, 0.3, 0.3).expect("valid profile");
    (0..count)
        .map(|i| {
            let seed_part = match i % 3 {
                0 => vec![BitAction::Keep; d.n1],
                1 => freeze_seed_to_codeword(code, &mut rng),
                _ => random_tamper(d.n1, &profile, &mut rng).expect("profile").actions().to_vec(),
            };
            let unfrozen = pick_positions(d.n, free, &mut rng);
            let frozen: Vec<BitAction> = (0..d.n).map(|_| random_freeze(&mut rng)).collect();
            let body = (0..d.n)
                .map(|j| match unfrozen.iter().position(|&u| u == j) {
                    Some(p) if (p + i) % 2 == 0 => BitAction::Keep,
                    Some(_) => BitAction::Flip,
                    None => frozen[j],
                })
                .collect();
            (format!("case1-{i}"), join(seed_part, body))
        })
        .collect()
}

/// The canonical adversary list: identity, the Case 1 boundary, Case 2.1 and
/// 2.2 flip patterns, a Case 3 seed freeze, a single flip, the complement and
/// a constant equal to a valid codeword.
pub fn canonical_adversaries(code: &ConcatCode, seed: &RngSeed) -> Result<Vec<(String, BitTamperFn)>> {
    let d = code.plan().derived.clone();
    let mut rng = seed.rng();
    let mut out = vec![("identity".to_string(), BitTamperFn::identity(d.big_n))];
    out.extend(case1_adversaries(code, 1, &seed.derive(1)).into_iter().map(|(_, f)| ("case1-boundary".to_string(), f)));

    let keep_seed = || vec![BitAction::Keep; d.n1];
    let flips_21 = ((d.delta2_blocks.ceil() as usize).saturating_sub(1)).clamp(1, d.n);
    let pos = pick_positions(d.n, flips_21, &mut rng);
    let ov: Vec<_> = pos.iter().map(|&i| (i, BitAction::Flip)).collect();
    out.push(("case2.1-flips".into(), join(keep_seed(), body_with(d.n, |_| BitAction::Keep, &ov))));

    let flips_22 = (d.delta2_blocks.ceil() as usize).clamp(1, d.n);
    let pos = pick_positions(d.n, flips_22.max(flips_21 + 1).min(d.n), &mut rng);
    let ov: Vec<_> = pos.iter().map(|&i| (i, BitAction::Flip)).collect();
    out.push(("case2.2-flips".into(), join(keep_seed(), body_with(d.n, |_| BitAction::Keep, &ov))));

    let profile = TamperProfile::new(0.5, 0.25, 0.25)?;
    let body = random_tamper(d.n, &profile, &mut rng)?.actions().to_vec();
    out.push(("case3-freeze-seed".into(), join(freeze_seed_to_codeword(code, &mut rng), body)));

    let i = uniform_below(&mut rng, d.n as u64) as usize;
    out.push((
        "single-bit-flip".into(),
        join(keep_seed(), body_with(d.n, |_| BitAction::Keep, &[(i, BitAction::Flip)])),
    ));
    out.push(("complement".into(), BitTamperFn::new(vec![BitAction::Flip; d.big_n])));

    let s0 = random_word(&mut rng, d.message_bits);
    let coins: EncoderCoins = code.coins_from_rng(&mut rng);
    let w = code.encode_with(&s0, &coins)?.to_word();
    out.push(("constant-valid-codeword".into(), BitTamperFn::constant(&w)));
    Ok(out)
}

/// One attack result.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttackReport {
    pub adversary_id: String,
    pub case_class: CaseClass,
    pub actions: String,
    pub eps_hat: f64,
    pub radius: f64,
    /// Samples per distribution; zero for exact runs.
    pub samples: u64,
    pub worst_message: BitWord,
    pub d_f: DistJson,
}

/// Estimates `D_f` by the sampler and the error `max_s SD(Dec(f(Enc(s))), copy(D_f, s))`.
pub fn attack_experiment(
    code: &ConcatCode,
    adversary_id: &str,
    f: &BitTamperFn,
    messages: MessageSet,
    mode: SimMode,
    seed: &RngSeed,
) -> Result<AttackReport> {
    let case_class = classify(code.plan(), f)?;
    let d_f = simulate_df(code, f, mode, &seed.derive(0))?;
    let est = estimate_nm_error(code, f, &d_f, messages, mode, &seed.derive(1))?;
    let samples = match mode {
        SimMode::Sampled { samples } => samples,
        SimMode::Exact { .. } => 0,
    };
    Ok(AttackReport {
        adversary_id: adversary_id.to_string(),
        case_class,
        actions: f.action_string(),
        eps_hat: est.eps,
        radius: est.radius,
        samples,
        worst_message: est.worst_message,
        d_f: d_f.to_json(),
    })
}

/// Runs [`attack_experiment`] for every adversary in parallel, each on its
/// own derived seed.
pub fn attack_sweep(
    code: &ConcatCode,
    adversaries: &[(String, BitTamperFn)],
    messages: MessageSet,
    mode: SimMode,
    seed: &RngSeed,
) -> Result<Vec<AttackReport>> {
    adversaries
        .par_iter()
        .enumerate()
        .map(|(i, (id, f))| attack_experiment(code, id, f, messages, mode, &seed.derive(100 + i as u64)))
        .collect()
}

/// CSV with columns `adversary_id,case_class,eps_hat,radius,samples`.
pub fn write_attack_csv<W: Write>(rows: &[AttackReport], mut out: W) -> Result<()> {
    writeln!(out, "adversary_id,case_class,eps_hat,radius,samples")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.adversary_id, r.case_class.as_str(), r.eps_hat, r.radius, r.samples)?;
    }
    Ok(())
}

/// Largest `D_f`-sampler error of the seed code over every bit-tampering
/// function, computed exactly. Returns the error and a worst adversary.
pub fn measure_seed_code_error(code: &ConcatCode, guard: usize) -> Result<(f64, BitTamperFn)> {
    let c1 = code.seed_code();
    let n1 = c1.params().n;
    let all: Vec<BitTamperFn> = crate::tamper::enumerate_bit_tampers(n1, guard)?.collect();
    let mode = SimMode::exact();
    let seed = RngSeed::from_u64(0);
    let worst = all
        .par_iter()
        .map(|f| {
            let d_f = simulate_df(c1, f, mode, &seed)?;
            Ok((estimate_nm_error(c1, f, &d_f, MessageSet::All, mode, &seed)?.eps, f.clone()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((f64::NEG_INFINITY, BitTamperFn::identity(n1)), |a, b| if b.0 > a.0 { b } else { a });
    Ok(worst)
}

/// Default confidence parameter used for attack radii.
pub const ATTACK_ETA: f64 = DEFAULT_ETA;
