//! Experiment configuration files.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::concat::Enforcement;
use crate::inner::InnerParams;
use crate::perm::PermSpec;
use crate::scheme::MessageSet;
use crate::tamper::TamperProfile;

/// One run: an operation with its parameters plus run-wide settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub operation: Operation,
    /// Hex seed; every random choice of the run derives from it.
    #[serde(default = "default_seed")]
    pub seed: String,
    /// Worker threads; `None` uses all cores.
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub guards: Guards,
    /// Lifts every enumeration guard.
    #[serde(default)]
    pub guard_override: bool,
}

pub fn default_seed() -> String {
    "00".into()
}

pub fn default_out() -> PathBuf {
    PathBuf::from("nmcode-out")
}

/// Enumeration limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Guards {
    /// Encoder-coin enumerations.
    pub exact: u128,
    /// Sub-cube sweep work.
    pub cube: u128,
    /// Tampering-function sweep work.
    pub sweep: u128,
}

impl Default for Guards {
    fn default() -> Self {
        Self {
            exact: crate::scheme::DEFAULT_EXACT_GUARD,
            cube: crate::inner::DEFAULT_CUBE_GUARD,
            sweep: crate::inner::DEFAULT_SWEEP_GUARD,
        }
    }
}

impl Guards {
    pub fn lifted() -> Self {
        Self { exact: u128::MAX, cube: u128::MAX, sweep: u128::MAX }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operation", content = "params", deny_unknown_fields)]
pub enum Operation {
    #[serde(rename = "inner.sample")]
    InnerSample(InnerSampleParams),
    #[serde(rename = "inner.verify")]
    InnerVerify(InnerVerifyParams),
    #[serde(rename = "lecss.build")]
    LecssBuild(LecssBuildParams),
    #[serde(rename = "lecss.encode")]
    LecssEncode(LecssCodecParams),
    #[serde(rename = "lecss.decode")]
    LecssDecode(LecssCodecParams),
    #[serde(rename = "lecss.verify")]
    LecssVerify(LecssVerifyParams),
    #[serde(rename = "perm.derive")]
    PermDerive(PermDeriveParams),
    #[serde(rename = "perm.test")]
    PermTest(PermTestParams),
    #[serde(rename = "concat.plan")]
    ConcatPlan(ConcatPlanParams),
    #[serde(rename = "concat.encode")]
    ConcatEncode(ConcatCodecParams),
    #[serde(rename = "concat.decode")]
    ConcatDecode(ConcatCodecParams),
    #[serde(rename = "concat.attack")]
    ConcatAttack(ConcatAttackParams),
    #[serde(rename = "nmext.sample")]
    NmextSample(NmextSampleParams),
    #[serde(rename = "nmext.check")]
    NmextCheck(NmextCheckParams),
    #[serde(rename = "nmext.reduce")]
    NmextReduce(NmextReduceParams),
}

impl Operation {
    pub fn id(&self) -> &'static str {
        match self {
            Operation::InnerSample(_) => "inner.sample",
            Operation::InnerVerify(_) => "inner.verify",
            Operation::LecssBuild(_) => "lecss.build",
            Operation::LecssEncode(_) => "lecss.encode",
            Operation::LecssDecode(_) => "lecss.decode",
            Operation::LecssVerify(_) => "lecss.verify",
            Operation::PermDerive(_) => "perm.derive",
            Operation::PermTest(_) => "perm.test",
            Operation::ConcatPlan(_) => "concat.plan",
            Operation::ConcatEncode(_) => "concat.encode",
            Operation::ConcatDecode(_) => "concat.decode",
            Operation::ConcatAttack(_) => "concat.attack",
            Operation::NmextSample(_) => "nmext.sample",
            Operation::NmextCheck(_) => "nmext.check",
            Operation::NmextReduce(_) => "nmext.reduce",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerSampleParams {
    pub n: usize,
    pub k: usize,
    pub t: u64,
    #[serde(default)]
    pub delta_num: u32,
    #[serde(default = "one")]
    pub delta_den: u32,
    /// Skip the packing bound (only the weaker `t·2^k ≤ 2^n` is checked).
    #[serde(default)]
    pub unpacked: bool,
}

fn one() -> u32 {
    1
}

impl InnerSampleParams {
    pub fn params(&self) -> crate::Result<InnerParams> {
        if self.unpacked {
            InnerParams::new_unpacked(self.n, self.k, self.t, self.delta_num, self.delta_den)
        } else {
            InnerParams::new(self.n, self.k, self.t, self.delta_num, self.delta_den)
        }
    }
}

/// Exactly one of `code` (a file written by `inner.sample`) and `sample`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerVerifyParams {
    #[serde(default)]
    pub code: Option<PathBuf>,
    #[serde(default)]
    pub sample: Option<InnerSampleParams>,
    #[serde(default = "default_ell")]
    pub ell: usize,
    #[serde(default = "default_indep_eps")]
    pub eps: f64,
    #[serde(default = "all_inner_checks")]
    pub checks: Vec<InnerCheck>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerCheck {
    Cube,
    Independence,
    Detection,
}

pub fn all_inner_checks() -> Vec<InnerCheck> {
    vec![InnerCheck::Cube, InnerCheck::Independence, InnerCheck::Detection]
}

fn default_ell() -> usize {
    2
}

fn default_indep_eps() -> f64 {
    0.15
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LecssBuildParams {
    /// Field `GF(2^m)`.
    pub m: usize,
    /// Symbols per codeword.
    pub n: usize,
    pub k: usize,
    pub k0: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LecssCodecParams {
    /// Descriptor JSON written by `lecss.build`.
    pub descriptor: PathBuf,
    /// Message (encode) or codeword (decode) as little-endian hex.
    pub input: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LecssVerifyParams {
    pub descriptor: PathBuf,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_codewords")]
    pub codewords: usize,
}

fn default_trials() -> u64 {
    256
}

fn default_codewords() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermDeriveParams {
    pub spec: PermSpec,
    /// Seed `z` as little-endian hex of `seed_bits` bits.
    pub z: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermTestParams {
    pub spec: PermSpec,
    pub trials: u64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConcatPlanParams {
    /// The fixed desk-scale plan.
    Toy { inner_t: u64 },
    Auto { big_n: usize, gamma0: f64, c1: InnerParams, enforcement: Enforcement },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcatCodecParams {
    /// Plan JSON written by `concat.plan`.
    pub plan: PathBuf,
    pub input: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdversarySource {
    Canonical,
    /// JSON list of `{"id": ..., "tamper": <adversary>}` objects.
    File { path: PathBuf },
    Random { count: usize, profile: TamperProfile },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcatAttackParams {
    pub plan: PathBuf,
    pub adversaries: AdversarySource,
    /// Samples per distribution; zero enumerates the encoder exactly.
    pub samples: u64,
    #[serde(default = "all_messages")]
    pub messages: MessageSet,
    /// When set, the run passes iff every `eps_hat ≤ max_eps + radius`.
    #[serde(default)]
    pub max_eps: Option<f64>,
}

fn all_messages() -> MessageSet {
    MessageSet::All
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NmextSampleParams {
    pub n: usize,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NmextCheckParams {
    /// Table prefix: header at `<table>.json`, entries at `<table>.bin`.
    pub table: PathBuf,
    /// Supports; full when absent.
    #[serde(default)]
    pub x: Option<Vec<u32>>,
    #[serde(default)]
    pub y: Option<Vec<u32>>,
    /// Adversary JSON file (`{"type": "split", ...}`); extraction only when absent.
    #[serde(default)]
    pub adversary: Option<PathBuf>,
    /// When set, the run passes iff the reported error is at most this.
    #[serde(default)]
    pub max_eps: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NmextReduceParams {
    pub table: PathBuf,
    pub adversaries: usize,
}
