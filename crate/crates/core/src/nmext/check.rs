//! Exact extraction and non-malleability distances.
//!
//! `J` denotes the joint law of `(A, A') = (Ext(X, Y), Ext(f1(X), f2(Y)))`.
//! The relaxed distance compares `J` with `U_m ⊗ law(A')`. The strict
//! distance compares `J` with `(A, copy(D, A))` and minimises over `D`; the
//! `U`-form variant compares with `(U_m, copy(D, U_m))`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::source::FlatSourcePair;
use super::table::ExtractorTable;
use crate::bits::BitWord;
use crate::dist::{ratio_to_f64, FiniteDist};
use crate::error::{Error, Result};
use crate::simulator::{fit_simulator, objective_value, Objective, SimRow};
use crate::symbol::Symbol;
use crate::tamper::SplitStateTamperFn;

/// Largest half length for the strict (linear-programming) checks.
pub const MAX_STRICT_HALF_BITS: usize = 6;

/// Which halves a relaxed adversary tampers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    F1Only,
    F2Only,
    Both,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::F1Only, Pattern::F2Only, Pattern::Both];

    fn uses_f1(self) -> bool {
        self != Pattern::F2Only
    }

    fn uses_f2(self) -> bool {
        self != Pattern::F1Only
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternDistance {
    pub pattern: Pattern,
    pub distance: f64,
}

/// Result of a relaxed check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NmVerdict {
    pub extraction_distance: f64,
    pub nm_distances: Vec<PatternDistance>,
    /// Largest of all distances above.
    pub error: f64,
    pub witness: String,
}

/// Result of a strict check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrictVerdict {
    pub extraction_distance: f64,
    /// `min_D SD(J, (A, copy(D, A)))`.
    pub nm_distance: f64,
    pub optimal_d: crate::dist::DistJson,
    /// The same distance at the fixed-point simulator: `same` with
    /// probability `Pr[f(X, Y) = (X, Y)]`, otherwise `Ext(f(X, Y))`.
    pub fixed_point_distance: f64,
    /// `min_D SD(J, (U_m, copy(D, U_m)))`.
    pub u_form_distance: f64,
    /// `max(extraction_distance, nm_distance)`.
    pub error: f64,
}

fn check_source(ext: &ExtractorTable, src: &FlatSourcePair) -> Result<()> {
    if ext.n() != src.n() {
        return Err(Error::InvalidParams(format!("extractor on {} bits, source on {}", ext.n(), src.n())));
    }
    Ok(())
}

fn check_tamper(ext: &ExtractorTable, f: &SplitStateTamperFn) -> Result<()> {
    if f.half_bits() != ext.n() {
        return Err(Error::LengthMismatch { expected: ext.n(), actual: f.half_bits() });
    }
    Ok(())
}

fn output_counts(ext: &ExtractorTable, xs: &[u32], ys: &[u32]) -> Vec<u64> {
    let mut c = vec![0u64; 1 << ext.m()];
    for &x in xs {
        for &y in ys {
            c[ext.get(x, y) as usize] += 1;
        }
    }
    c
}

/// `½ Σ_v |c_v/T − 2^−m|` as an exact fraction.
fn uniformity_distance(counts: &[u64]) -> Ratio<i128> {
    let total: u64 = counts.iter().sum();
    let big_m = counts.len() as i128;
    let num: i128 = counts.iter().map(|&c| (big_m * c as i128 - total as i128).abs()).sum();
    Ratio::new(num, 2 * big_m * total as i128)
}

/// Exact distance of `Ext(X, Y)` from `U_m`.
pub fn extraction_distance_exact(ext: &ExtractorTable, src: &FlatSourcePair) -> Result<Ratio<i128>> {
    check_source(ext, src)?;
    Ok(uniformity_distance(&output_counts(ext, src.x(), src.y())))
}

pub fn check_extraction(ext: &ExtractorTable, src: &FlatSourcePair) -> Result<f64> {
    Ok(ratio_to_f64(&extraction_distance_exact(ext, src)?))
}

/// Joint counts of `(A, A')`, indexed `a·2^m + a'`, with `None` meaning identity.
fn joint_counts(ext: &ExtractorTable, xs: &[u32], ys: &[u32], g1: Option<&[u32]>, g2: Option<&[u32]>) -> Vec<u64> {
    let big_m = 1usize << ext.m();
    let mut c = vec![0u64; big_m * big_m];
    for &x in xs {
        let tx = g1.map_or(x, |g| g[x as usize]);
        for &y in ys {
            let ty = g2.map_or(y, |g| g[y as usize]);
            c[ext.get(x, y) as usize * big_m + ext.get(tx, ty) as usize] += 1;
        }
    }
    c
}

/// `SD(J, U_m ⊗ law(A'))` exactly.
fn relaxed_distance_exact(joint: &[u64], big_m: usize) -> Ratio<i128> {
    let total: u64 = joint.iter().sum();
    let mut marginal = vec![0u64; big_m];
    for (i, &c) in joint.iter().enumerate() {
        marginal[i % big_m] += c;
    }
    let num: i128 = joint
        .iter()
        .enumerate()
        .map(|(i, &c)| (big_m as i128 * c as i128 - marginal[i % big_m] as i128).abs())
        .sum();
    Ratio::new(num, 2 * big_m as i128 * total as i128)
}

fn fixed_point_free_on(g: &[u32], support: &[u32]) -> Option<u32> {
    support.iter().copied().find(|&x| g[x as usize] == x)
}

/// Relaxed distance for one pattern on explicit supports. The active
/// tampering tables must have no fixed point on the support they act on.
pub fn relaxed_pattern_distance(
    ext: &ExtractorTable,
    xs: &[u32],
    ys: &[u32],
    f: &SplitStateTamperFn,
    pattern: Pattern,
) -> Result<Ratio<i128>> {
    check_tamper(ext, f)?;
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::InvalidParams("empty support".into()));
    }
    if pattern.uses_f1() {
        if let Some(x) = fixed_point_free_on(f.f1(), xs) {
            return Err(Error::Precondition(format!("f1 fixes {x}")));
        }
    }
    if pattern.uses_f2() {
        if let Some(y) = fixed_point_free_on(f.f2(), ys) {
            return Err(Error::Precondition(format!("f2 fixes {y}")));
        }
    }
    let g1 = pattern.uses_f1().then(|| f.f1());
    let g2 = pattern.uses_f2().then(|| f.f2());
    Ok(relaxed_distance_exact(&joint_counts(ext, xs, ys, g1, g2), 1 << ext.m()))
}

/// Extraction distance and the relaxed distance for each requested pattern.
pub fn check_relaxed_nm(
    ext: &ExtractorTable,
    src: &FlatSourcePair,
    f: &SplitStateTamperFn,
    patterns: &[Pattern],
) -> Result<NmVerdict> {
    let extraction_distance = check_extraction(ext, src)?;
    let nm_distances = patterns
        .iter()
        .map(|&p| Ok(PatternDistance { pattern: p, distance: ratio_to_f64(&relaxed_pattern_distance(ext, src.x(), src.y(), f, p)?) }))
        .collect::<Result<Vec<_>>>()?;
    let worst = nm_distances.iter().fold(None::<&PatternDistance>, |a, b| match a {
        Some(a) if a.distance >= b.distance => Some(a),
        _ => Some(b),
    });
    let error = worst.map_or(extraction_distance, |w| w.distance.max(extraction_distance));
    let witness = match worst {
        Some(w) if w.distance > extraction_distance => format!("{:?} at distance {}", w.pattern, w.distance),
        _ => format!("extraction at distance {extraction_distance}"),
    };
    Ok(NmVerdict { extraction_distance, nm_distances, error, witness })
}

fn sym(v: usize, m: usize) -> Symbol {
    Symbol::Message(BitWord::from_u64(v as u64, m))
}

/// Rows for `SD(J, (A, copy(D, A)))`: one per value `a` of positive
/// probability, weighted by `Pr[A = a]`, holding the conditional law of `A'`.
pub fn def51_rows(ext: &ExtractorTable, src: &FlatSourcePair, f: &SplitStateTamperFn) -> Result<Vec<SimRow>> {
    check_source(ext, src)?;
    check_tamper(ext, f)?;
    let (m, big_m) = (ext.m(), 1usize << ext.m());
    let joint = joint_counts(ext, src.x(), src.y(), Some(f.f1()), Some(f.f2()));
    let total: u64 = joint.iter().sum();
    Ok((0..big_m)
        .filter_map(|a| {
            let row = &joint[a * big_m..(a + 1) * big_m];
            let count: u64 = row.iter().sum();
            (count > 0).then(|| SimRow {
                target: sym(a, m),
                weight: count as f64 / total as f64,
                mass: row.iter().enumerate().filter(|(_, &c)| c > 0).map(|(b, &c)| (sym(b, m), c as f64 / count as f64)).collect(),
            })
        })
        .collect())
}

/// Rows for `SD(J, (U_m, copy(D, U_m)))`: one per `a`, weight `2^−m`, holding
/// `2^m · J(a, ·)`.
pub fn u_form_rows(ext: &ExtractorTable, xs: &[u32], ys: &[u32], f: &SplitStateTamperFn) -> Result<Vec<SimRow>> {
    check_tamper(ext, f)?;
    let (m, big_m) = (ext.m(), 1usize << ext.m());
    let joint = joint_counts(ext, xs, ys, Some(f.f1()), Some(f.f2()));
    let total: u64 = joint.iter().sum();
    Ok((0..big_m)
        .map(|a| SimRow {
            target: sym(a, m),
            weight: 1.0 / big_m as f64,
            mass: joint[a * big_m..(a + 1) * big_m]
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(b, &c)| (sym(b, m), big_m as f64 * c as f64 / total as f64))
                .collect(),
        })
        .collect())
}

fn check_strict_guard(ext: &ExtractorTable) -> Result<()> {
    if ext.n() > MAX_STRICT_HALF_BITS {
        return Err(Error::GuardExceeded {
            what: "strict non-malleability check".into(),
            size: ext.n() as u128,
            guard: MAX_STRICT_HALF_BITS as u128,
        });
    }
    Ok(())
}

/// The fixed-point simulator: `same` when `f(x, y) = (x, y)`, else the tampered output.
pub fn fixed_point_simulator(ext: &ExtractorTable, src: &FlatSourcePair, f: &SplitStateTamperFn) -> BTreeMap<Symbol, f64> {
    let total = (src.x().len() * src.y().len()) as f64;
    let mut d = BTreeMap::new();
    for &x in src.x() {
        for &y in src.y() {
            let (tx, ty) = f.apply_pair(x, y);
            let s = if (tx, ty) == (x, y) { Symbol::Same } else { sym(ext.get(tx, ty) as usize, ext.m()) };
            *d.entry(s).or_insert(0.0) += 1.0 / total;
        }
    }
    d
}

/// Strict non-malleability with the optimal simulator.
pub fn check_strict_nm(ext: &ExtractorTable, src: &FlatSourcePair, f: &SplitStateTamperFn) -> Result<StrictVerdict> {
    check_strict_guard(ext)?;
    let extraction_distance = check_extraction(ext, src)?;
    let rows = def51_rows(ext, src, f)?;
    let fit = fit_simulator(&rows, Objective::Weighted, ext.m())?;
    let fixed_point_distance = objective_value(&rows, Objective::Weighted, &fixed_point_simulator(ext, src, f));
    let u_form_distance = strict_u_form_distance(ext, src.x(), src.y(), f)?;
    Ok(StrictVerdict {
        extraction_distance,
        nm_distance: fit.distance,
        optimal_d: fit.d.to_json(),
        fixed_point_distance,
        u_form_distance,
        error: extraction_distance.max(fit.distance),
    })
}

/// `min_D SD(J, (U_m, copy(D, U_m)))` on explicit supports.
pub fn strict_u_form_distance(ext: &ExtractorTable, xs: &[u32], ys: &[u32], f: &SplitStateTamperFn) -> Result<f64> {
    check_strict_guard(ext)?;
    let rows = u_form_rows(ext, xs, ys, f)?;
    Ok(fit_simulator(&rows, Objective::Weighted, ext.m())?.distance)
}

/// The Def 5.1 distance at a given simulator, for comparisons against the optimum.
pub fn def51_distance_at(ext: &ExtractorTable, src: &FlatSourcePair, f: &SplitStateTamperFn, d: &FiniteDist) -> Result<f64> {
    let rows = def51_rows(ext, src, f)?;
    let map: BTreeMap<Symbol, f64> = d.iter().into_iter().collect();
    Ok(objective_value(&rows, Objective::Weighted, &map))
}

/// One part of the fixed-point decomposition of a source.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cell {
    /// `"00"`, `"01"`, `"10"` or `"11"`: whether `f1`, `f2` move the point.
    pub label: String,
    /// Probability of the part.
    pub alpha: f64,
    /// `max(extraction, relaxed distance)` on the part, if nonempty.
    pub error: Option<f64>,
}

/// The fixed-point decomposition comparison for one instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionCheck {
    /// `max(extraction, U-form strict distance)` on the whole source.
    pub strict_error: f64,
    /// The smallest `ε ≥ extraction` such that every part with probability
    /// above `ε` has error at most `ε`.
    pub relaxed_error: f64,
    pub cells: Vec<Cell>,
    /// `strict_error ≤ 4·relaxed_error` up to [`DECOMPOSITION_TOLERANCE`].
    pub holds: bool,
}

/// Slack allowed for floating-point linear programming.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-9;

/// Splits `X` by whether `f1` fixes the point, and `Y` likewise, and compares
/// the strict error with four times the relaxed error measured on the parts.
pub fn decomposition_check(ext: &ExtractorTable, src: &FlatSourcePair, f: &SplitStateTamperFn) -> Result<DecompositionCheck> {
    check_source(ext, src)?;
    check_tamper(ext, f)?;
    let extraction = check_extraction(ext, src)?;
    let strict_error = extraction.max(strict_u_form_distance(ext, src.x(), src.y(), f)?);
    let split = |s: &[u32], g: &[u32]| -> [Vec<u32>; 2] {
        [s.iter().copied().filter(|&v| g[v as usize] == v).collect(), s.iter().copied().filter(|&v| g[v as usize] != v).collect()]
    };
    let xs = split(src.x(), f.f1());
    let ys = split(src.y(), f.f2());
    let total = (src.x().len() * src.y().len()) as f64;
    let mut cells = Vec::with_capacity(4);
    for (i, xi) in xs.iter().enumerate() {
        for (j, yj) in ys.iter().enumerate() {
            let alpha = (xi.len() * yj.len()) as f64 / total;
            let error = if alpha == 0.0 {
                None
            } else {
                let ext_d = ratio_to_f64(&uniformity_distance(&output_counts(ext, xi, yj)));
                let nm = match (i, j) {
                    (0, 0) => 0.0,
                    (0, 1) => ratio_to_f64(&relaxed_pattern_distance(ext, xi, yj, f, Pattern::F2Only)?),
                    (1, 0) => ratio_to_f64(&relaxed_pattern_distance(ext, xi, yj, f, Pattern::F1Only)?),
                    _ => ratio_to_f64(&relaxed_pattern_distance(ext, xi, yj, f, Pattern::Both)?),
                };
                Some(ext_d.max(nm))
            };
            cells.push(Cell { label: format!("{i}{j}"), alpha, error });
        }
    }
    let ok = |eps: f64| eps >= extraction && cells.iter().all(|c| c.alpha <= eps || c.error.is_some_and(|e| e <= eps));
    let mut candidates: Vec<f64> = vec![extraction, 1.0];
    candidates.extend(cells.iter().flat_map(|c| [Some(c.alpha), c.error]).flatten());
    let relaxed_error = candidates.into_iter().filter(|&e| ok(e)).fold(f64::INFINITY, f64::min);
    Ok(DecompositionCheck {
        strict_error,
        relaxed_error,
        holds: strict_error <= 4.0 * relaxed_error + DECOMPOSITION_TOLERANCE,
        cells,
    })
}
