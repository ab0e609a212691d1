//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's distance or simulator code.
#![allow(dead_code)]

use nmcode::nmext::ExtractorTable;
use nmcode::tamper::SplitStateTamperFn;

/// Outcome law over `{0, 1, ⊥}` for one-bit messages.
pub type Law3 = [f64; 3];

/// Simulator over `{0, 1, ⊥, same}`.
pub type Sim4 = [f64; 4];

/// `SD(p, copy(d, s))`.
pub fn copy_error(p: &Law3, d: &Sim4, s: usize) -> f64 {
    let mut q = [d[0], d[1], d[2]];
    q[s] += d[3];
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// One row: `(weight, target, law)`.
pub type Row3 = (f64, usize, Law3);

pub fn worst_objective(rows: &[Row3], d: &Sim4) -> f64 {
    rows.iter().map(|(_, s, p)| copy_error(p, d, *s)).fold(0.0, f64::max)
}

pub fn weighted_objective(rows: &[Row3], d: &Sim4) -> f64 {
    rows.iter().map(|(w, s, p)| w * copy_error(p, d, *s)).sum()
}

/// Minimum of `objective` over the grid of simulators with coordinates in
/// multiples of `1/steps`.
pub fn grid_min(rows: &[Row3], steps: usize, objective: fn(&[Row3], &Sim4) -> f64) -> f64 {
    let h = 1.0 / steps as f64;
    let mut best = f64::INFINITY;
    for a in 0..=steps {
        for b in 0..=steps - a {
            for c in 0..=steps - a - b {
                let e = steps - a - b - c;
                let d = [a as f64 * h, b as f64 * h, c as f64 * h, e as f64 * h];
                best = best.min(objective(rows, &d));
            }
        }
    }
    best
}

/// Laws of `Dec(f(Enc(s)))` for the extractor code with one-bit messages:
/// `Enc(s)` is uniform on the preimage of `s`.
pub fn extractor_code_laws(ext: &ExtractorTable, f: &SplitStateTamperFn) -> [Law3; 2] {
    assert_eq!(ext.m(), 1);
    let size = 1u32 << ext.n();
    let mut counts = [[0u64; 3]; 2];
    for x in 0..size {
        for y in 0..size {
            let s = ext.get(x, y) as usize;
            let t = ext.get(f.f1()[x as usize], f.f2()[y as usize]) as usize;
            counts[s][t] += 1;
        }
    }
    counts.map(|c| {
        let total: u64 = c.iter().sum();
        c.map(|v| v as f64 / total as f64)
    })
}

/// Rows of `SD((A, A'), (A, copy(D, A)))` with `A = Ext(X, Y)` and
/// `A' = Ext(f(X, Y))`, for one-bit output and flat sources.
pub fn strict_rows(ext: &ExtractorTable, xs: &[u32], ys: &[u32], f: &SplitStateTamperFn) -> Vec<Row3> {
    let mut counts = [[0u64; 3]; 2];
    for &x in xs {
        for &y in ys {
            let a = ext.get(x, y) as usize;
            let b = ext.get(f.f1()[x as usize], f.f2()[y as usize]) as usize;
            counts[a][b] += 1;
        }
    }
    let total = (xs.len() * ys.len()) as f64;
    (0..2)
        .filter_map(|a| {
            let row: u64 = counts[a].iter().sum();
            (row > 0).then(|| (row as f64 / total, a, counts[a].map(|c| c as f64 / row as f64)))
        })
        .collect()
}

/// `SD(Ext(X, Y), U_m)` by counting.
pub fn naive_extraction(ext: &ExtractorTable, xs: &[u32], ys: &[u32]) -> f64 {
    let big_m = 1usize << ext.m();
    let mut counts = vec![0u64; big_m];
    for &x in xs {
        for &y in ys {
            counts[ext.get(x, y) as usize] += 1;
        }
    }
    let total = (xs.len() * ys.len()) as f64;
    0.5 * counts.iter().map(|&c| (c as f64 / total - 1.0 / big_m as f64).abs()).sum::<f64>()
}

/// Half the L1 distance between two finite laws given as sorted pairs.
pub fn naive_sd(p: &[(String, f64)], q: &[(String, f64)]) -> f64 {
    let mut keys: Vec<&String> = p.iter().chain(q).map(|(k, _)| k).collect();
    keys.sort();
    keys.dedup();
    let get = |l: &[(String, f64)], k: &String| l.iter().filter(|(kk, _)| kk == k).map(|(_, v)| v).sum::<f64>();
    0.5 * keys.iter().map(|k| (get(p, k) - get(q, k)).abs()).sum::<f64>()
}
