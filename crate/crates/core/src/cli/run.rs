//! Executes one configured operation.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::*;
use crate::bits::BitWord;
use crate::concat::{
    attack_sweep, canonical_adversaries, classify, plan_concat, write_attack_csv, Codeword, ConcatCode, ConcatPlan,
};
use crate::error::{Error, Result};
use crate::inner::{
    read_inner_code, verify_bounded_independence, verify_cube_property, verify_cube_property_sampled,
    verify_error_detection, verify_error_detection_sampled, write_inner_code, InnerCode,
};
use crate::lecss::{check_corruption_detection, verify_lecss, LecssCode, LecssDescriptor};
use crate::nmext::{
    check_extraction, check_relaxed_nm, check_strict_nm, decomposition_check, sample_random_extractor,
    verify_reduction, ExtractorTable, FlatSourcePair, Pattern, MAX_STRICT_HALF_BITS,
};
use crate::perm::{derive_permutation, test_lwise_dependence, PermSpec};
use crate::report::PropertyReport;
use crate::rng::RngSeed;
use crate::scheme::SimMode;
use crate::tamper::{random_tamper, BitTamperFn, TamperFn};

/// Samples used when an exhaustive inner-code check exceeds its guard.
pub const FALLBACK_SAMPLES: u64 = 4096;
/// Corruptions of up to this many symbols are tried by `lecss.verify`.
pub const MAX_CORRUPTED_SYMBOLS: usize = 2;

/// What an operation produced.
#[derive(Debug)]
pub struct RunOutput {
    pub results: Value,
    pub pass: bool,
    /// Printed to stderr when `pass` is false.
    pub witness: Option<String>,
    /// Files to write under the output directory.
    pub outputs: Vec<(String, Vec<u8>)>,
    /// Files read.
    pub inputs: Vec<PathBuf>,
}

impl RunOutput {
    fn info(results: Value) -> Self {
        Self { results, pass: true, witness: None, outputs: Vec::new(), inputs: Vec::new() }
    }

    fn output(mut self, name: &str, bytes: Vec<u8>) -> Self {
        self.outputs.push((name.to_string(), bytes));
        self
    }

    fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.to_path_buf());
        self
    }

    fn verdict(mut self, pass: bool, witness: Option<String>) -> Self {
        self.pass = pass;
        self.witness = if pass { None } else { witness };
        self
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn pretty<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

fn first_failure(reports: &[&PropertyReport]) -> Option<String> {
    reports
        .iter()
        .find(|r| !r.pass)
        .map(|r| format!("{}: {}", r.property, r.counterexample.clone().unwrap_or_default()))
}

fn property_output(reports: Vec<PropertyReport>) -> Result<RunOutput> {
    let refs: Vec<&PropertyReport> = reports.iter().collect();
    let pass = reports.iter().all(|r| r.pass);
    let witness = first_failure(&refs);
    Ok(RunOutput::info(json!({ "reports": to_value(&reports)? })).verdict(pass, witness))
}

/// The effective guards.
pub fn guards(config: &ExperimentConfig) -> Guards {
    if config.guard_override {
        Guards::lifted()
    } else {
        config.guards
    }
}

/// Runs the operation on the current rayon pool.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    let seed = RngSeed::from_hex(&config.seed)?;
    let guards = guards(config);
    match &config.operation {
        Operation::InnerSample(p) => {
            let code = InnerCode::sample(p.params()?, &seed)?;
            let mut bytes = Vec::new();
            write_inner_code(&code, &mut bytes)?;
            Ok(RunOutput::info(json!({
                "params": to_value(code.params())?,
                "codebook_size": code.codebook().len(),
                "min_pairwise_distance": code.min_pairwise_distance(),
            }))
            .output("inner_code.bin", bytes))
        }
        Operation::InnerVerify(p) => inner_verify(p, &seed, guards),
        Operation::LecssBuild(p) => {
            let code = LecssCode::new(p.m, p.n, p.k, p.k0)?;
            let d = code.descriptor();
            Ok(RunOutput::info(json!({
                "descriptor": to_value(&d)?,
                "message_bits": code.message_len(),
                "codeword_bits": code.block_len(),
                "distance": code.distance(),
            }))
            .output("lecss.json", pretty(&d)?))
        }
        Operation::LecssEncode(p) => {
            let code = LecssCode::from_descriptor(&read_json::<LecssDescriptor>(&p.descriptor)?)?;
            let s = BitWord::from_hex(&p.input, code.message_len())?;
            let w = code.encode(&s, &mut seed.rng())?;
            Ok(RunOutput::info(json!({ "codeword": w.to_hex() })).input(&p.descriptor))
        }
        Operation::LecssDecode(p) => {
            let code = LecssCode::from_descriptor(&read_json::<LecssDescriptor>(&p.descriptor)?)?;
            let w = BitWord::from_hex(&p.input, code.block_len())?;
            Ok(RunOutput::info(json!({ "decoded": code.decode(&w)?.tag() })).input(&p.descriptor))
        }
        Operation::LecssVerify(p) => {
            let code = LecssCode::from_descriptor(&read_json::<LecssDescriptor>(&p.descriptor)?)?;
            let v = verify_lecss(&code, p.trials, &seed.derive(0), guards.exact)?;
            let mut reports: Vec<PropertyReport> = v.reports().into_iter().cloned().collect();
            let max_errors = MAX_CORRUPTED_SYMBOLS.min(code.distance().saturating_sub(1));
            if max_errors > 0 {
                reports.push(check_corruption_detection(&code, p.codewords as u64, max_errors, &seed.derive(1))?);
            }
            Ok(property_output(reports)?.input(&p.descriptor))
        }
        Operation::PermDerive(p) => {
            let spec = validated(&p.spec)?;
            let z = BitWord::from_hex(&p.z, spec.seed_bits)?;
            let perm = derive_permutation(&spec, &z)?;
            Ok(RunOutput::info(json!({ "spec": to_value(&spec)?, "permutation": to_value(&perm)? }))
                .output("permutation.json", pretty(&perm)?))
        }
        Operation::PermTest(p) => {
            let spec = validated(&p.spec)?;
            let report = test_lwise_dependence(&spec, spec.ell, p.trials, p.delta, &seed)?;
            let mut out = property_output(vec![report])?;
            out.results["delta_status"] = json!(spec.delta_status());
            Ok(out)
        }
        Operation::ConcatPlan(p) => {
            let plan = match p {
                ConcatPlanParams::Toy { inner_t } => ConcatPlan::toy(*inner_t, &seed)?,
                ConcatPlanParams::Auto { big_n, gamma0, c1, enforcement } => {
                    plan_concat(*big_n, *gamma0, c1, &seed, *enforcement)?
                }
            };
            let failing: Vec<&str> = plan.failing_checks().iter().map(|c| c.name.as_str()).collect();
            Ok(RunOutput::info(json!({
                "derived": to_value(&plan.derived)?,
                "checks": to_value(&plan.checks)?,
                "failing_checks": failing,
                "predicted_error": to_value(&plan.predicted_error)?,
            }))
            .output("plan.json", pretty(&plan)?))
        }
        Operation::ConcatEncode(p) => {
            let code = ConcatCode::new(read_json(&p.plan)?)?;
            let s = BitWord::from_hex(&p.input, code.plan().derived.message_bits)?;
            let c = code.encode_seeded(&s, &seed)?;
            Ok(RunOutput::info(json!({
                "codeword": c.to_word().to_hex(),
                "z_prime": c.z_prime.to_hex(),
                "c_prime": c.c_prime.to_hex(),
            }))
            .input(&p.plan))
        }
        Operation::ConcatDecode(p) => {
            let code = ConcatCode::new(read_json(&p.plan)?)?;
            let d = &code.plan().derived;
            let w = BitWord::from_hex(&p.input, d.big_n)?;
            let decoded = code.decode_codeword(&Codeword::from_word(&w, d.n1)?)?;
            Ok(RunOutput::info(json!({ "decoded": decoded.tag() })).input(&p.plan))
        }
        Operation::ConcatAttack(p) => concat_attack(p, &seed, guards),
        Operation::NmextSample(p) => {
            let ext = sample_random_extractor(p.n, p.m, &seed)?;
            let (mut header, mut raw) = (Vec::new(), Vec::new());
            ext.write(&mut header, &mut raw)?;
            Ok(RunOutput::info(json!({ "header": to_value(&ext.header())?, "entries": ext.entries().len() }))
                .output("extractor.json", header)
                .output("extractor.bin", raw))
        }
        Operation::NmextCheck(p) => nmext_check(p),
        Operation::NmextReduce(p) => {
            let (ext, inputs) = read_table(&p.table)?;
            let report = verify_reduction(&ext, p.adversaries, &seed)?;
            let witness = report
                .rows
                .iter()
                .find(|r| !r.pass)
                .map(|r| {
                    let f = serde_json::to_string(&r.adversary).unwrap_or_default();
                    format!("adversary {f}: code error {} > bound {}", r.code_error, r.bound)
                });
            let mut out = RunOutput::info(to_value(&report)?).verdict(report.pass, witness);
            out.inputs = inputs;
            Ok(out)
        }
    }
}

fn validated(spec: &PermSpec) -> Result<PermSpec> {
    PermSpec::new(spec.n, spec.ell, spec.seed_bits, spec.backend)
}

fn or_sampled(exact: Result<PropertyReport>, sampled: impl FnOnce() -> Result<PropertyReport>) -> Result<PropertyReport> {
    match exact {
        Err(Error::GuardExceeded { .. }) => sampled(),
        other => other,
    }
}

fn inner_verify(p: &InnerVerifyParams, seed: &RngSeed, guards: Guards) -> Result<RunOutput> {
    let (code, input) = match (&p.code, &p.sample) {
        (Some(path), None) => (read_inner_code(fs::File::open(path)?)?, Some(path.clone())),
        (None, Some(s)) => (InnerCode::sample(s.params()?, seed)?, None),
        _ => return Err(Error::InvalidParams("inner.verify needs exactly one of `code` and `sample`".into())),
    };
    let reports = p
        .checks
        .iter()
        .map(|c| match c {
            InnerCheck::Cube => or_sampled(verify_cube_property(&code, guards.cube), || {
                verify_cube_property_sampled(&code, FALLBACK_SAMPLES, &seed.derive(1))
            }),
            InnerCheck::Independence => verify_bounded_independence(&code, p.ell, p.eps, guards.exact),
            InnerCheck::Detection => or_sampled(verify_error_detection(&code, guards.sweep), || {
                verify_error_detection_sampled(&code, FALLBACK_SAMPLES, &seed.derive(2))
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = property_output(reports)?;
    if let Some(path) = input {
        out = out.input(&path);
    }
    Ok(out)
}

#[derive(serde::Deserialize)]
struct AdversaryEntry {
    id: String,
    tamper: TamperFn,
}

fn concat_attack(p: &ConcatAttackParams, seed: &RngSeed, guards: Guards) -> Result<RunOutput> {
    let code = ConcatCode::new(read_json(&p.plan)?)?;
    let big_n = code.plan().derived.big_n;
    let mut out = RunOutput::info(Value::Null).input(&p.plan);
    let adversaries: Vec<(String, BitTamperFn)> = match &p.adversaries {
        AdversarySource::Canonical => canonical_adversaries(&code, &seed.derive(1))?,
        AdversarySource::File { path } => {
            out = out.input(path);
            read_json::<Vec<AdversaryEntry>>(path)?
                .into_iter()
                .map(|e| match e.tamper {
                    TamperFn::Bits(f) if f.len() == big_n => Ok((e.id, f)),
                    _ => Err(Error::InvalidParams(format!("adversary {} is not a {big_n}-bit tamper", e.id))),
                })
                .collect::<Result<_>>()?
        }
        AdversarySource::Random { count, profile } => {
            let mut rng = seed.derive(2).rng();
            (0..*count)
                .map(|i| Ok((format!("random-{i}"), random_tamper(big_n, profile, &mut rng)?)))
                .collect::<Result<_>>()?
        }
    };
    let mode = if p.samples == 0 { SimMode::Exact { guard: guards.exact } } else { SimMode::Sampled { samples: p.samples } };
    let rows = attack_sweep(&code, &adversaries, p.messages, mode, &seed.derive(3))?;
    let mut csv = Vec::new();
    write_attack_csv(&rows, &mut csv)?;
    let worst = rows.iter().max_by(|a, b| (a.eps_hat - a.radius).total_cmp(&(b.eps_hat - b.radius)));
    let (pass, witness) = match (p.max_eps, worst) {
        (Some(max), Some(w)) if w.eps_hat > max + w.radius => {
            (false, Some(format!("{} ({}): eps_hat {} > {max} + {}", w.adversary_id, w.actions, w.eps_hat, w.radius)))
        }
        _ => (true, None),
    };
    let classes = adversaries.iter().map(|(_, f)| classify(code.plan(), f)).collect::<Result<Vec<_>>>()?;
    out.results = json!({
        "adversaries": rows.len(),
        "classes": to_value(&classes)?,
        "max_eps_hat": rows.iter().map(|r| r.eps_hat).fold(0.0, f64::max),
        "rows": to_value(&rows)?,
    });
    Ok(out.output("attack.csv", csv).output("attacks.json", pretty(&rows)?).verdict(pass, witness))
}

fn table_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    (prefix.with_extension("json"), prefix.with_extension("bin"))
}

/// Reads `<prefix>.json` and `<prefix>.bin`.
pub fn read_table(prefix: &Path) -> Result<(ExtractorTable, Vec<PathBuf>)> {
    let (h, r) = table_paths(prefix);
    let ext = ExtractorTable::read(fs::File::open(&h)?, fs::File::open(&r)?)?;
    Ok((ext, vec![h, r]))
}

fn nmext_check(p: &NmextCheckParams) -> Result<RunOutput> {
    let (ext, inputs) = read_table(&p.table)?;
    let full = FlatSourcePair::full(ext.n());
    let src = FlatSourcePair::new(
        ext.n(),
        p.x.clone().unwrap_or_else(|| full.x().to_vec()),
        p.y.clone().unwrap_or_else(|| full.y().to_vec()),
    )?;
    let extraction = check_extraction(&ext, &src)?;
    let mut results = json!({ "extraction_distance": extraction, "k1": src.k1(), "k2": src.k2() });
    let mut error = extraction;
    let mut witness = format!("extraction distance {extraction}");
    let mut all_inputs = inputs;
    if let Some(path) = &p.adversary {
        all_inputs.push(path.clone());
        let f = match read_json::<TamperFn>(path)? {
            TamperFn::Split(f) => f,
            TamperFn::Bits(_) => return Err(Error::InvalidParams("nmext.check needs a split-state adversary".into())),
        };
        let f1_free = src.x().iter().all(|&x| f.f1()[x as usize] != x);
        let f2_free = src.y().iter().all(|&y| f.f2()[y as usize] != y);
        let patterns: Vec<Pattern> = [(Pattern::F1Only, f1_free), (Pattern::F2Only, f2_free), (Pattern::Both, f1_free && f2_free)]
            .into_iter()
            .filter_map(|(p, ok)| ok.then_some(p))
            .collect();
        if !patterns.is_empty() {
            let v = check_relaxed_nm(&ext, &src, &f, &patterns)?;
            if v.error > error {
                witness = v.witness.clone();
            }
            error = error.max(v.error);
            results["relaxed"] = to_value(&v)?;
        }
        if ext.n() <= MAX_STRICT_HALF_BITS {
            let s = check_strict_nm(&ext, &src, &f)?;
            if s.error > error {
                witness = format!("strict distance {} (fixed-point simulator {})", s.nm_distance, s.fixed_point_distance);
            }
            error = error.max(s.error);
            results["strict"] = to_value(&s)?;
            results["decomposition"] = to_value(&decomposition_check(&ext, &src, &f)?)?;
        }
    }
    results["error"] = json!(error);
    let pass = p.max_eps.is_none_or(|max| error <= max);
    let mut out = RunOutput::info(results).verdict(pass, Some(witness));
    out.inputs = all_inputs;
    Ok(out)
}
