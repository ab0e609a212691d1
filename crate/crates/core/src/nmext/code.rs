//! The coding scheme induced by a two-source function and its error bound.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check::{check_strict_nm, extraction_distance_exact};
use super::source::FlatSourcePair;
use super::table::ExtractorTable;
use crate::bits::BitWord;
use crate::dist::ratio_to_f64;
use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::scheme::{optimal_nm_error, CodingScheme, DEFAULT_EXACT_GUARD};
use crate::symbol::Symbol;
use crate::tamper::{random_split_tamper, SplitStateTamperFn};

/// `Dec(x, y) = Ext(x, y)`; `Enc(s)` is uniform on the preimage of `s`.
/// Codeword bits `0..n` hold `x` and bits `n..2n` hold `y`.
#[derive(Clone, Debug)]
pub struct ExtractorCode {
    ext: ExtractorTable,
    buckets: Vec<Vec<u32>>,
}

impl ExtractorCode {
    /// Fails when some output value has no preimage.
    pub fn new(ext: ExtractorTable) -> Result<Self> {
        let n = ext.n();
        let mut buckets = vec![Vec::new(); 1 << ext.m()];
        for (i, &v) in ext.entries().iter().enumerate() {
            let (x, y) = ((i >> n) as u32, (i & ((1 << n) - 1)) as u32);
            buckets[v as usize].push(x | y << n);
        }
        if let Some(s) = buckets.iter().position(|b| b.is_empty()) {
            return Err(Error::Precondition(format!("message {s} has no preimage")));
        }
        Ok(Self { ext, buckets })
    }

    pub fn extractor(&self) -> &ExtractorTable {
        &self.ext
    }

    pub fn bucket(&self, s: u64) -> &[u32] {
        &self.buckets[s as usize]
    }

    /// Exact distance of `Enc(U_m)` from uniform on `{0,1}^{2n}`.
    pub fn encoding_distance_from_uniform(&self) -> f64 {
        let words = (1u64 << (2 * self.ext.n())) as f64;
        let p_msg = 1.0 / self.buckets.len() as f64;
        0.5 * self.buckets.iter().map(|b| b.len() as f64 * (p_msg / b.len() as f64 - 1.0 / words).abs()).sum::<f64>()
    }
}

impl CodingScheme for ExtractorCode {
    fn message_bits(&self) -> usize {
        self.ext.m()
    }

    fn codeword_bits(&self) -> usize {
        2 * self.ext.n()
    }

    fn coin_space(&self, s: &BitWord) -> u128 {
        self.buckets[s.to_u64() as usize].len() as u128
    }

    fn encode_with_coins(&self, s: &BitWord, coins: u128) -> Result<BitWord> {
        if s.len() != self.ext.m() {
            return Err(Error::LengthMismatch { expected: self.ext.m(), actual: s.len() });
        }
        Ok(BitWord::from_u64(self.buckets[s.to_u64() as usize][coins as usize] as u64, 2 * self.ext.n()))
    }

    fn decode(&self, w: &BitWord) -> Result<Symbol> {
        let n = self.ext.n();
        if w.len() != 2 * n {
            return Err(Error::LengthMismatch { expected: 2 * n, actual: w.len() });
        }
        let v = w.to_u64();
        let (x, y) = ((v & ((1 << n) - 1)) as u32, (v >> n) as u32);
        Ok(Symbol::Message(BitWord::from_u64(self.ext.get(x, y) as u64, self.ext.m())))
    }
}

/// `extractor_to_code`.
pub fn extractor_to_code(ext: &ExtractorTable) -> Result<ExtractorCode> {
    ExtractorCode::new(ext.clone())
}

/// One adversary of a reduction sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReductionRow {
    pub adversary: SplitStateTamperFn,
    /// Optimal non-malleability error of the code against this adversary.
    pub code_error: f64,
    /// `max(extraction, strict distance)` of the extractor for this adversary
    /// on uniform sources.
    pub eps_f: f64,
    /// `eps_f · (2^k + 1)`.
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReductionReport {
    pub k: usize,
    pub extraction_distance: f64,
    pub encoding_distance: f64,
    pub rows: Vec<ReductionRow>,
    pub worst_code_error: f64,
    pub pass: bool,
}

/// Slack for the linear-programming comparison.
pub const REDUCTION_TOLERANCE: f64 = 1e-9;

/// Builds the code and checks `code error ≤ ε_f·(2^k + 1)` for the identity,
/// a constant adversary and `adversary_sample` random ones (every other one
/// fixed-point free).
pub fn verify_reduction(ext: &ExtractorTable, adversary_sample: usize, seed: &RngSeed) -> Result<ReductionReport> {
    let code = extractor_to_code(ext)?;
    let n = ext.n();
    let k = ext.m();
    let full = FlatSourcePair::full(n);
    let extraction_distance = ratio_to_f64(&extraction_distance_exact(ext, &full)?);
    let mut adversaries = vec![SplitStateTamperFn::identity(n)];
    let c = code.bucket(0)[0];
    let (cx, cy) = (c & ((1 << n) - 1), c >> n);
    adversaries.push(SplitStateTamperFn::new(vec![cx; 1 << n], vec![cy; 1 << n])?);
    let mut rng = seed.rng();
    for i in 0..adversary_sample {
        adversaries.push(random_split_tamper(n, i % 2 == 1, &mut rng as &mut dyn RngCore)?);
    }
    let rows = adversaries
        .into_par_iter()
        .map(|f| {
            let code_error = optimal_nm_error(&code, &f, DEFAULT_EXACT_GUARD)?.distance;
            let eps_f = check_strict_nm(ext, &full, &f)?.error;
            let bound = eps_f * ((1u64 << k) as f64 + 1.0);
            Ok(ReductionRow { pass: code_error <= bound + REDUCTION_TOLERANCE, adversary: f, code_error, eps_f, bound })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReductionReport {
        k,
        extraction_distance,
        encoding_distance: code.encoding_distance_from_uniform(),
        worst_code_error: rows.iter().map(|r| r.code_error).fold(0.0, f64::max),
        pass: rows.iter().all(|r| r.pass),
        rows,
    })
}

/// Parameters of the rate-`1/5` split-state setup, as arithmetic only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFifthParams {
    pub n: usize,
    pub alpha_prime: f64,
    /// The unspecified additive constant in `k ≤ n − (3/2)·log(1/ε) − c`.
    pub c: f64,
    pub k: usize,
    /// `log2(1/ε) = k(1 + α')`.
    pub log_inv_eps: f64,
    /// `k/(2n)`.
    pub rate: f64,
    /// `log2` of the code error `ε(2^k + 1)`.
    pub log2_code_error: f64,
    /// `k ≤ n − (3/2)·log(1/ε) − c`.
    pub holds: bool,
}

/// Largest `k` with `k ≤ n − (3/2)·k(1+α') − c`.
pub fn rate_fifth_params(n: usize, alpha_prime: f64, c: f64) -> Result<RateFifthParams> {
    if n == 0 || alpha_prime < 0.0 {
        return Err(Error::InvalidParams(format!("n = {n}, α' = {alpha_prime}")));
    }
    let k = ((n as f64 - c) / (1.0 + 1.5 * (1.0 + alpha_prime))).floor().max(0.0) as usize;
    let log_inv_eps = k as f64 * (1.0 + alpha_prime);
    let log2_code_error = -log_inv_eps + ((k as f64).exp2() + 1.0).log2();
    Ok(RateFifthParams {
        n,
        alpha_prime,
        c,
        k,
        log_inv_eps,
        rate: k as f64 / (2 * n) as f64,
        log2_code_error,
        holds: k as f64 <= n as f64 - 1.5 * log_inv_eps - c + 1e-9,
    })
}

/// For one fixed source of min-entropy `k1 + k2` and one adversary, the
/// smallest `ε` with `8·exp(2·2^{2m} − ε³·2^{k1+k2−6}) ≤ γ`. Values above 1
/// mean the random-function bound says nothing at this size.
pub fn single_instance_budget(m: usize, k1: f64, k2: f64, gamma: f64) -> f64 {
    let big_m = (m as f64).exp2();
    ((2.0 * big_m * big_m + (8.0 / gamma).ln()) * (6.0 - k1 - k2).exp2()).cbrt()
}
