//! Parameters of the probabilistic inner code and their planner.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported inner block length; codewords are packed in a `u64`.
pub const MAX_INNER_BITS: usize = 63;

/// Largest supported codebook, `t · 2^k` entries.
pub const MAX_CODEBOOK: u128 = 1 << 24;

/// `n`, `k`, `t` and the relative distance `δ = delta_num / delta_den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerParams {
    pub n: usize,
    pub k: usize,
    pub t: u64,
    pub delta_num: u32,
    pub delta_den: u32,
}

/// `Σ_{i ≤ r} C(n, i)`, saturating.
pub fn hamming_ball_volume(n: usize, r: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for i in 0..=r.min(n) {
        if i > 0 {
            c = c * (n - i + 1) as u128 / i as u128;
        }
        total = total.saturating_add(c);
    }
    total
}

impl InnerParams {
    /// Checked constructor. Besides `t · 2^k ≤ 2^n` it requires the packing
    /// bound `t · 2^k · Vol(δn) ≤ 2^{n−1}`, which keeps every rejection-sampling
    /// step below rejection rate 1/2.
    pub fn new(n: usize, k: usize, t: u64, delta_num: u32, delta_den: u32) -> Result<Self> {
        let p = Self::new_unpacked(n, k, t, delta_num, delta_den)?;
        if !p.packing_guaranteed() {
            return Err(Error::Infeasible {
                inequality: "t·2^k·Vol(δn) ≤ 2^(n−1)".into(),
                detail: format!(
                    "{}·2^{}·{} > 2^{}",
                    t,
                    k,
                    hamming_ball_volume(n, p.radius()),
                    n - 1
                ),
            });
        }
        Ok(p)
    }

    /// Constructor that skips the packing bound. Sampling may then hit the
    /// rejection budget, which is reported as an error.
    pub fn new_unpacked(n: usize, k: usize, t: u64, delta_num: u32, delta_den: u32) -> Result<Self> {
        if n == 0 || n > MAX_INNER_BITS {
            return Err(Error::InvalidParams(format!("n = {n} outside 1..={MAX_INNER_BITS}")));
        }
        if k == 0 || k > n {
            return Err(Error::InvalidParams(format!("k = {k} outside 1..=n")));
        }
        if t == 0 {
            return Err(Error::InvalidParams("t = 0".into()));
        }
        if delta_den == 0 || delta_num >= delta_den {
            return Err(Error::InvalidParams(format!("δ = {delta_num}/{delta_den} outside [0, 1)")));
        }
        let size = (t as u128) << k;
        if size > 1u128 << n {
            return Err(Error::Infeasible {
                inequality: "t·2^k ≤ 2^n".into(),
                detail: format!("{t}·2^{k} > 2^{n}"),
            });
        }
        if size > MAX_CODEBOOK {
            return Err(Error::GuardExceeded { what: "inner codebook".into(), size, guard: MAX_CODEBOOK });
        }
        Ok(Self { n, k, t, delta_num, delta_den })
    }

    /// Parameters with `δ = 0`.
    pub fn no_distance(n: usize, k: usize, t: u64) -> Result<Self> {
        Self::new(n, k, t, 0, 1)
    }

    pub fn delta(&self) -> f64 {
        self.delta_num as f64 / self.delta_den as f64
    }

    /// `⌊δn⌋`: codewords sit at pairwise distance greater than this.
    pub fn radius(&self) -> usize {
        (self.n as u64 * self.delta_num as u64 / self.delta_den as u64) as usize
    }

    pub fn codebook_size(&self) -> u64 {
        self.t << self.k
    }

    pub fn packing_guaranteed(&self) -> bool {
        (self.codebook_size() as u128).saturating_mul(hamming_ball_volume(self.n, self.radius()))
            <= 1u128 << (self.n - 1)
    }
}

/// Binary entropy `h(x)` in bits.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// The `x ∈ [0, 1/2]` with `h(x) = y`, by bisection.
pub fn inverse_binary_entropy(y: f64) -> f64 {
    let y = y.clamp(0.0, 1.0);
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A named inequality and whether it holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub note: String,
}

impl ConstraintCheck {
    /// The check `lhs ≤ rhs` (with a relative slack of `1e-12`).
    pub fn le(name: &str, lhs: f64, rhs: f64, note: &str) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            holds: lhs <= rhs + 1e-12 * rhs.abs().max(1.0),
            note: note.into(),
        }
    }
}

/// Planner output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerPlan {
    pub alpha: f64,
    pub params: InnerParams,
    /// `2^{−αn/27}`.
    pub epsilon: f64,
    /// `h^{-1}(α/3)`.
    pub delta_target: f64,
    /// `⌊δn⌋ / n`, the distance actually enforced.
    pub delta_effective: f64,
    /// `⌈n / ε^6⌉` before clamping.
    pub t_target: f64,
    pub t_clamped: bool,
    /// Largest `t` allowed by the packing bound.
    pub t_max: u64,
    pub checks: Vec<ConstraintCheck>,
}

/// Plans `(k, δ, t)` for block length `n` and rate slack `α`.
///
/// `t` is `⌈n/ε^6⌉` clamped to the packing bound, unless `t_override` is set.
pub fn plan_inner_params(alpha: f64, n: usize, t_override: Option<u64>) -> Result<InnerPlan> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!("α = {alpha} outside (0, 1)")));
    }
    let k = (n as f64 * (1.0 - alpha) + 1e-9).floor() as usize;
    if k == 0 {
        return Err(Error::Infeasible { inequality: "k ≥ 1".into(), detail: format!("⌊n(1−α)⌋ = 0 at n = {n}") });
    }
    let delta_target = inverse_binary_entropy(alpha / 3.0);
    let radius = (delta_target * n as f64 + 1e-9).floor() as usize;
    let epsilon = (-alpha * n as f64 / 27.0).exp2();
    let t_target = (n as f64 / epsilon.powi(6)).ceil();
    let vol = hamming_ball_volume(n, radius);
    let t_max = ((1u128 << (n - 1)) >> k) / vol;
    if t_max == 0 {
        return Err(Error::Infeasible {
            inequality: "t·2^k·Vol(δn) ≤ 2^(n−1)".into(),
            detail: format!("no t ≥ 1 fits at n = {n}, k = {k}, δn = {radius}"),
        });
    }
    let t_max = t_max.min(MAX_CODEBOOK >> k) as u64;
    let (t, t_clamped) = match t_override {
        Some(t) => (t, false),
        None if t_target > t_max as f64 => (t_max, true),
        None => (t_target as u64, false),
    };
    let (num, den) = if radius == 0 { (0, 1) } else { (radius as u32, n as u32) };
    let params = InnerParams::new(n, k, t, num, den)?;
    let checks = vec![
        ConstraintCheck::le(
            "n(1−α) ≤ k",
            n as f64 * (1.0 - alpha),
            k as f64,
            "k is n(1−α) rounded down, so this holds only when n(1−α) is an integer",
        ),
        ConstraintCheck::le(
            "t·2^k·Vol(δn) ≤ 2^(n−1)",
            (params.codebook_size() as u128 * vol) as f64,
            (1u128 << (n - 1)) as f64,
            "packing bound",
        ),
    ];
    Ok(InnerPlan {
        alpha,
        params,
        epsilon,
        delta_target,
        delta_effective: radius as f64 / n as f64,
        t_target,
        t_clamped,
        t_max,
        checks,
    })
}
