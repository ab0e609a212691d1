//! The `nmcode` command line: one subcommand per operation, each writing a
//! `report.json` (and any artifacts) under `--out`.
//!
//! Exit codes: 0 when the checked property holds, 1 when it fails (witness on
//! stderr), 2 for invalid configuration or I/O errors.

mod config;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub use config::*;
pub use run::{guards, read_table, run, RunOutput, FALLBACK_SAMPLES, MAX_CORRUPTED_SYMBOLS};

use crate::concat::Enforcement;
use crate::error::{Error, Result};
use crate::inner::InnerParams;
use crate::perm::{PermBackend, PermSpec};
use crate::scheme::MessageSet;
use crate::tamper::TamperProfile;

/// Version tag of `report.json`.
pub const REPORT_SCHEMA: &str = "nmcode.report/1";

#[derive(Debug, Parser)]
#[command(name = "nmcode", version, about = "Non-malleable codes: construction, attack and verification")]
pub struct Cli {
    /// Experiment config JSON; its fields take precedence over flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Hex seed (up to 64 digits).
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Lift all enumeration guards.
    #[arg(long, global = true)]
    pub guard_override: bool,
    #[command(subcommand)]
    pub command: Option<Component>,
}

#[derive(Debug, Subcommand)]
pub enum Component {
    /// Probabilistic inner code.
    Inner {
        #[command(subcommand)]
        verb: InnerVerb,
    },
    /// Linear error-correcting secret sharing.
    Lecss {
        #[command(subcommand)]
        verb: LecssVerb,
    },
    /// Seeded permutations.
    Perm {
        #[command(subcommand)]
        verb: PermVerb,
    },
    /// The concatenated code.
    Concat {
        #[command(subcommand)]
        verb: ConcatVerb,
    },
    /// Split-state extractors and the derived codes.
    Nmext {
        #[command(subcommand)]
        verb: NmextVerb,
    },
}

#[derive(Debug, Args)]
pub struct InnerArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub t: u64,
    #[arg(long, default_value_t = 0)]
    pub delta_num: u32,
    #[arg(long, default_value_t = 1)]
    pub delta_den: u32,
    /// Check only `t·2^k ≤ 2^n` instead of the packing bound.
    #[arg(long)]
    pub unpacked: bool,
}

impl InnerArgs {
    fn params(&self) -> InnerSampleParams {
        InnerSampleParams {
            n: self.n,
            k: self.k,
            t: self.t,
            delta_num: self.delta_num,
            delta_den: self.delta_den,
            unpacked: self.unpacked,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum InnerVerb {
    Sample(InnerArgs),
    Verify {
        /// Code table written by `inner sample`.
        #[arg(long)]
        code: PathBuf,
        #[arg(long, default_value_t = 2)]
        ell: usize,
        #[arg(long, default_value_t = 0.15)]
        eps: f64,
        /// Subset of `cube`, `independence`, `detection`.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "cube,independence,detection")]
        checks: Vec<CheckArg>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CheckArg {
    Cube,
    Independence,
    Detection,
}

impl From<CheckArg> for InnerCheck {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::Cube => InnerCheck::Cube,
            CheckArg::Independence => InnerCheck::Independence,
            CheckArg::Detection => InnerCheck::Detection,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum LecssVerb {
    Build {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        k0: usize,
    },
    Encode {
        #[arg(long)]
        descriptor: PathBuf,
        /// Message hex.
        #[arg(long)]
        input: String,
    },
    Decode {
        #[arg(long)]
        descriptor: PathBuf,
        /// Codeword hex.
        #[arg(long)]
        input: String,
    },
    Verify {
        #[arg(long)]
        descriptor: PathBuf,
        #[arg(long, default_value_t = 256)]
        trials: u64,
        #[arg(long, default_value_t = 100)]
        codewords: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BackendArg {
    PrfShuffle,
    ExactTinyRejection,
    Identity,
}

impl From<BackendArg> for PermBackend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::PrfShuffle => PermBackend::PrfShuffle,
            BackendArg::ExactTinyRejection => PermBackend::ExactTinyRejection,
            BackendArg::Identity => PermBackend::Identity,
        }
    }
}

#[derive(Debug, Args)]
pub struct PermArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub ell: usize,
    #[arg(long)]
    pub seed_bits: usize,
    #[arg(long, value_enum, default_value = "prf-shuffle")]
    pub backend: BackendArg,
}

impl PermArgs {
    fn spec(&self) -> PermSpec {
        PermSpec { n: self.n, ell: self.ell, seed_bits: self.seed_bits, backend: self.backend.into() }
    }
}

#[derive(Debug, Subcommand)]
pub enum PermVerb {
    Derive {
        #[command(flatten)]
        spec: PermArgs,
        /// Permutation seed hex.
        #[arg(long)]
        z: String,
    },
    Test {
        #[command(flatten)]
        spec: PermArgs,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        delta: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EnforcementArg {
    Strict,
    Report,
}

#[derive(Debug, Subcommand)]
pub enum ConcatVerb {
    Plan {
        /// Emit the fixed toy plan with this many inner codewords per message.
        #[arg(long, conflicts_with_all = ["big_n", "gamma0"])]
        toy_inner_t: Option<u64>,
        #[arg(long, requires = "gamma0")]
        big_n: Option<usize>,
        #[arg(long)]
        gamma0: Option<f64>,
        /// Seed code as `n,k,t[,delta_num,delta_den]`.
        #[arg(long, default_value = "20,8,4")]
        c1: String,
        #[arg(long, value_enum, default_value = "strict")]
        enforcement: EnforcementArg,
    },
    Encode {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        input: String,
    },
    Decode {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        input: String,
    },
    Attack {
        #[arg(long)]
        plan: PathBuf,
        /// `canonical`, `random:COUNT`, or a JSON adversary file.
        #[arg(long, default_value = "canonical")]
        adversaries: String,
        /// Random-adversary profile as `keep,flip,set`.
        #[arg(long, default_value = "0.5,0.25,0.25")]
        profile: String,
        /// Samples per distribution; 0 is exact.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Number of random messages; all messages when absent.
        #[arg(long)]
        messages: Option<u64>,
        #[arg(long)]
        max_eps: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum NmextVerb {
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    Check {
        /// Table prefix (`<prefix>.json` and `<prefix>.bin`).
        #[arg(long)]
        table: PathBuf,
        /// Comma-separated support of X.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<u32>>,
        #[arg(long, value_delimiter = ',')]
        y: Option<Vec<u32>>,
        #[arg(long)]
        adversary: Option<PathBuf>,
        #[arg(long)]
        max_eps: Option<f64>,
    },
    Reduce {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 100)]
        adversaries: usize,
    },
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| Error::Parse(format!("bad {what} {s:?}"))))
        .collect()
}

fn c1_params(s: &str) -> Result<InnerParams> {
    match parse_list::<u64>(s, "seed code")?[..] {
        [n, k, t] => InnerParams::new(n as usize, k as usize, t, 0, 1),
        [n, k, t, num, den] => InnerParams::new(n as usize, k as usize, t, num as u32, den as u32),
        _ => Err(Error::Parse(format!("seed code {s:?} is not n,k,t[,num,den]"))),
    }
}

/// The operation named by the subcommand.
pub fn operation(component: &Component) -> Result<Operation> {
    Ok(match component {
        Component::Inner { verb } => match verb {
            InnerVerb::Sample(a) => Operation::InnerSample(a.params()),
            InnerVerb::Verify { code, ell, eps, checks } => Operation::InnerVerify(InnerVerifyParams {
                code: Some(code.clone()),
                sample: None,
                ell: *ell,
                eps: *eps,
                checks: checks.iter().map(|&c| c.into()).collect(),
            }),
        },
        Component::Lecss { verb } => match verb {
            LecssVerb::Build { m, n, k, k0 } => Operation::LecssBuild(LecssBuildParams { m: *m, n: *n, k: *k, k0: *k0 }),
            LecssVerb::Encode { descriptor, input } => {
                Operation::LecssEncode(LecssCodecParams { descriptor: descriptor.clone(), input: input.clone() })
            }
            LecssVerb::Decode { descriptor, input } => {
                Operation::LecssDecode(LecssCodecParams { descriptor: descriptor.clone(), input: input.clone() })
            }
            LecssVerb::Verify { descriptor, trials, codewords } => Operation::LecssVerify(LecssVerifyParams {
                descriptor: descriptor.clone(),
                trials: *trials,
                codewords: *codewords,
            }),
        },
        Component::Perm { verb } => match verb {
            PermVerb::Derive { spec, z } => Operation::PermDerive(PermDeriveParams { spec: spec.spec(), z: z.clone() }),
            PermVerb::Test { spec, trials, delta } => {
                Operation::PermTest(PermTestParams { spec: spec.spec(), trials: *trials, delta: *delta })
            }
        },
        Component::Concat { verb } => match verb {
            ConcatVerb::Plan { toy_inner_t, big_n, gamma0, c1, enforcement } => {
                Operation::ConcatPlan(match (toy_inner_t, big_n, gamma0) {
                    (Some(t), _, _) => ConcatPlanParams::Toy { inner_t: *t },
                    (None, Some(big_n), Some(gamma0)) => ConcatPlanParams::Auto {
                        big_n: *big_n,
                        gamma0: *gamma0,
                        c1: c1_params(c1)?,
                        enforcement: match enforcement {
                            EnforcementArg::Strict => Enforcement::Strict,
                            EnforcementArg::Report => Enforcement::Report,
                        },
                    },
                    _ => return Err(Error::InvalidParams("give --toy-inner-t or both --big-n and --gamma0".into())),
                })
            }
            ConcatVerb::Encode { plan, input } => {
                Operation::ConcatEncode(ConcatCodecParams { plan: plan.clone(), input: input.clone() })
            }
            ConcatVerb::Decode { plan, input } => {
                Operation::ConcatDecode(ConcatCodecParams { plan: plan.clone(), input: input.clone() })
            }
            ConcatVerb::Attack { plan, adversaries, profile, samples, messages, max_eps } => {
                let adversaries = if adversaries == "canonical" {
                    AdversarySource::Canonical
                } else if let Some(count) = adversaries.strip_prefix("random:") {
                    let count = count.parse().map_err(|_| Error::Parse(format!("bad adversary count {count:?}")))?;
                    let p = match parse_list::<f64>(profile, "profile")?[..] {
                        [keep, flip, set] => TamperProfile::new(keep, flip, set)?,
                        _ => return Err(Error::Parse(format!("profile {profile:?} is not keep,flip,set"))),
                    };
                    AdversarySource::Random { count, profile: p }
                } else {
                    AdversarySource::File { path: PathBuf::from(adversaries) }
                };
                Operation::ConcatAttack(ConcatAttackParams {
                    plan: plan.clone(),
                    adversaries,
                    samples: *samples,
                    messages: messages.map_or(MessageSet::All, |count| MessageSet::Sampled { count }),
                    max_eps: *max_eps,
                })
            }
        },
        Component::Nmext { verb } => match verb {
            NmextVerb::Sample { n, m } => Operation::NmextSample(NmextSampleParams { n: *n, m: *m }),
            NmextVerb::Check { table, x, y, adversary, max_eps } => Operation::NmextCheck(NmextCheckParams {
                table: table.clone(),
                x: x.clone(),
                y: y.clone(),
                adversary: adversary.clone(),
                max_eps: *max_eps,
            }),
            NmextVerb::Reduce { table, adversaries } => {
                Operation::NmextReduce(NmextReduceParams { table: table.clone(), adversaries: *adversaries })
            }
        },
    })
}

/// Combines flags and the optional config file; file fields win.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut merged = Map::new();
    if let Some(component) = &cli.command {
        let op = serde_json::to_value(operation(component)?)?;
        if let Value::Object(m) = op {
            merged.extend(m);
        }
    }
    if let Some(seed) = &cli.seed {
        merged.insert("seed".into(), json!(seed));
    }
    if let Some(jobs) = cli.jobs {
        merged.insert("jobs".into(), json!(jobs));
    }
    if let Some(out) = &cli.out {
        merged.insert("out".into(), json!(out));
    }
    if cli.guard_override {
        merged.insert("guard_override".into(), json!(true));
    }
    if let Some(path) = &cli.config {
        match serde_json::from_slice::<Value>(&fs::read(path)?)? {
            Value::Object(file) => {
                if file.contains_key("operation") {
                    merged.remove("params");
                }
                merged.extend(file);
            }
            _ => return Err(Error::Parse("config file must hold a JSON object".into())),
        }
    }
    if !merged.contains_key("operation") {
        return Err(Error::InvalidParams("no subcommand and no operation in the config".into()));
    }
    Ok(serde_json::from_value(Value::Object(merged))?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub role: String,
    pub sha256: String,
}

/// Contents of `report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub operation: String,
    pub config: ExperimentConfig,
    pub artifacts: Vec<Artifact>,
    pub results: Value,
    pub pass: bool,
    pub wall_time_s: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs the config on a pool of `jobs` threads, writes the artifacts and
/// `report.json`, and returns the report with the witness of a failure.
pub fn execute(config: &ExperimentConfig) -> Result<(Report, Option<String>)> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    let output = pool.install(|| run(config))?;
    fs::create_dir_all(&config.out)?;
    let mut artifacts = Vec::new();
    for path in &output.inputs {
        artifacts.push(Artifact {
            path: path.display().to_string(),
            role: "input".into(),
            sha256: sha256_hex(&fs::read(path)?),
        });
    }
    for (name, bytes) in &output.outputs {
        fs::write(config.out.join(name), bytes)?;
        artifacts.push(Artifact { path: name.clone(), role: "output".into(), sha256: sha256_hex(bytes) });
    }
    let report = Report {
        schema: REPORT_SCHEMA.into(),
        operation: config.operation.id().into(),
        config: config.clone(),
        artifacts,
        results: output.results,
        pass: output.pass,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_report(&report, &config.out.join("report.json"))?;
    Ok((report, output.witness))
}

fn write_report(report: &Report, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(report)?;
    bytes.push(b'\n');
    fs::write(path, bytes)?;
    Ok(())
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve_config(&cli).and_then(|c| execute(&c));
    match result {
        Ok((report, witness)) => {
            println!("{}: {}", report.operation, if report.pass { "pass" } else { "FAIL" });
            if report.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("witness: {}", witness.unwrap_or_default());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
