use std::collections::HashMap;

use num_rational::Ratio;

use super::*;
use crate::rng::RngSeed;
use crate::scheme::CodingScheme;
use crate::tamper::{random_split_tamper, SplitStateTamperFn};

/// Independent joint-law oracle: floating-point maps, no shared helpers.
fn naive_relaxed(ext: &ExtractorTable, xs: &[u32], ys: &[u32], g1: &dyn Fn(u32) -> u32, g2: &dyn Fn(u32) -> u32) -> f64 {
    let t = (xs.len() * ys.len()) as f64;
    let mut joint: HashMap<(u16, u16), f64> = HashMap::new();
    let mut second: HashMap<u16, f64> = HashMap::new();
    for &x in xs {
        for &y in ys {
            let b = ext.get(g1(x), g2(y));
            *joint.entry((ext.get(x, y), b)).or_default() += 1.0 / t;
            *second.entry(b).or_default() += 1.0 / t;
        }
    }
    let big_m = 1u16 << ext.m();
    let mut l1 = 0.0;
    for a in 0..big_m {
        for b in 0..big_m {
            let p = joint.get(&(a, b)).copied().unwrap_or(0.0);
            let q = second.get(&b).copied().unwrap_or(0.0) / big_m as f64;
            l1 += (p - q).abs();
        }
    }
    l1 / 2.0
}

#[test]
fn inner_product_bias_at_two_bits() {
    // Six of the sixteen pairs have odd inner product: |6/16 − 1/2| = 1/8.
    let ones = (0..4u32).flat_map(|x| (0..4u32).map(move |y| (x & y).count_ones() % 2)).filter(|&b| b == 1).count();
    assert_eq!(ones, 6);
    let ip = ExtractorTable::inner_product(2).unwrap();
    assert_eq!(extraction_distance_exact(&ip, &FlatSourcePair::full(2)).unwrap(), Ratio::new(1, 8));
}

#[test]
fn degenerate_extraction_values() {
    let c = ExtractorTable::constant(3, 2, 1).unwrap();
    assert_eq!(check_extraction(&c, &FlatSourcePair::full(3)).unwrap(), 0.75);
    let z = ExtractorTable::constant(3, 0, 0).unwrap();
    assert_eq!(check_extraction(&z, &FlatSourcePair::full(3)).unwrap(), 0.0);
}

#[test]
fn ignoring_first_half_is_fully_malleable() {
    // A' = A, so SD((A, A), U ⊗ law(A)) = 1 − 2^−m whatever the law of A.
    let ext = ExtractorTable::from_fn(3, 2, |_, y| (y % 4) as u16).unwrap();
    let f1: Vec<u32> = (0..8).map(|x| x ^ 1).collect();
    let f = SplitStateTamperFn::new(f1, (0..8).collect()).unwrap();
    let v = check_relaxed_nm(&ext, &FlatSourcePair::full(3), &f, &[Pattern::F1Only]).unwrap();
    assert!((v.nm_distances[0].distance - 0.75).abs() < 1e-12);
}

#[test]
fn xor_shared_output_regression() {
    let ext = ExtractorTable::from_fn(2, 2, |x, y| (x ^ y) as u16).unwrap();
    let f = SplitStateTamperFn::new(vec![3, 2, 1, 0], vec![0, 1, 2, 3]).unwrap();
    let full = FlatSourcePair::full(2);
    let v = check_relaxed_nm(&ext, &full, &f, &[Pattern::F1Only]).unwrap();
    let oracle = naive_relaxed(&ext, full.x(), full.y(), &|x| 3 - x, &|y| y);
    assert!((v.nm_distances[0].distance - oracle).abs() < 1e-12);
    assert!((oracle - 0.75).abs() < 1e-12);
}

#[test]
fn relaxed_matches_naive_oracle_on_random_tables() {
    for s in 0..20 {
        let seed = RngSeed::from_u64(s);
        let ext = sample_random_extractor(3, 1 + (s as usize % 2), &seed).unwrap();
        let f = random_split_tamper(3, true, &mut seed.derive(9).rng()).unwrap();
        let src = FlatSourcePair::new(3, vec![0, 2, 3, 5, 7], vec![1, 4, 6]).unwrap();
        let v = check_relaxed_nm(&ext, &src, &f, &Pattern::ALL).unwrap();
        let (a, b) = (f.f1().to_vec(), f.f2().to_vec());
        let ga = |x: u32| a[x as usize];
        let gb = |y: u32| b[y as usize];
        let id = |v: u32| v;
        let expect = [
            naive_relaxed(&ext, src.x(), src.y(), &ga, &id),
            naive_relaxed(&ext, src.x(), src.y(), &id, &gb),
            naive_relaxed(&ext, src.x(), src.y(), &ga, &gb),
        ];
        for (d, e) in v.nm_distances.iter().zip(expect) {
            assert!((d.distance - e).abs() < 1e-12);
        }
    }
}

#[test]
fn relaxed_rejects_fixed_points() {
    let ext = ExtractorTable::inner_product(2).unwrap();
    let f = SplitStateTamperFn::identity(2);
    assert!(matches!(
        check_relaxed_nm(&ext, &FlatSourcePair::full(2), &f, &[Pattern::F1Only]),
        Err(crate::Error::Precondition(_))
    ));
}

#[test]
fn strict_identity_and_constant() {
    let ext = sample_random_extractor(3, 1, &RngSeed::from_u64(3)).unwrap();
    let full = FlatSourcePair::full(3);
    let v = check_strict_nm(&ext, &full, &SplitStateTamperFn::identity(3)).unwrap();
    assert!(v.nm_distance.abs() < 1e-9);
    let d = crate::dist::FiniteDist::from_json(&v.optimal_d).unwrap();
    assert!((d.prob(&crate::Symbol::Same) - 1.0).abs() < 1e-9);
    let f = SplitStateTamperFn::new(vec![5; 8], vec![2; 8]).unwrap();
    let v = check_strict_nm(&ext, &full, &f).unwrap();
    assert!(v.nm_distance.abs() < 1e-9);
    assert_eq!(v.error, v.extraction_distance);
}

#[test]
fn truncation_never_increases_extraction_distance() {
    for s in 0..10 {
        let ext = sample_random_extractor(3, 3, &RngSeed::from_u64(s)).unwrap();
        let src = FlatSourcePair::new(3, vec![1, 2, 3, 6], vec![0, 1, 2, 3, 4, 5]).unwrap();
        let mut prev = check_extraction(&ext, &src).unwrap();
        for k in (0..3).rev() {
            let d = check_extraction(&ext.truncate(k).unwrap(), &src).unwrap();
            assert!(d <= prev + 1e-15);
            prev = d;
        }
    }
}

#[test]
fn raw_round_trip() {
    let ext = sample_random_extractor(3, 3, &RngSeed::from_u64(1)).unwrap();
    let (mut h, mut r) = (Vec::new(), Vec::new());
    ext.write(&mut h, &mut r).unwrap();
    assert_eq!(r.len(), 64 * 3 / 8);
    assert_eq!(ExtractorTable::read(&h[..], &r[..]).unwrap(), ext);
    let header = ext.header();
    assert!(ExtractorTable::from_raw(&header, &r[1..]).is_err());
    assert_eq!(sample_random_extractor(3, 3, &RngSeed::from_u64(1)).unwrap(), ext);
}

#[test]
fn parity_code_buckets() {
    let code = extractor_to_code(&ExtractorTable::parity(3).unwrap()).unwrap();
    assert_eq!((code.bucket(0).len(), code.bucket(1).len()), (32, 32));
    for s in 0..2 {
        let m = crate::BitWord::from_u64(s, 1);
        for c in 0..32 {
            let w = code.encode_with_coins(&m, c).unwrap();
            assert_eq!(code.decode(&w).unwrap(), crate::Symbol::Message(m.clone()));
        }
    }
    assert!(extractor_to_code(&ExtractorTable::constant(2, 1, 0).unwrap()).is_err());
}

#[test]
fn encoding_distance_equals_extraction_distance() {
    for s in 0..10 {
        let ext = sample_random_extractor(3, 2, &RngSeed::from_u64(s)).unwrap();
        let Ok(code) = extractor_to_code(&ext) else { continue };
        let e = check_extraction(&ext, &FlatSourcePair::full(3)).unwrap();
        assert!((code.encoding_distance_from_uniform() - e).abs() < 1e-12);
    }
}

#[test]
fn rate_fifth_arithmetic() {
    let p = rate_fifth_params(1000, 0.0, 0.0).unwrap();
    assert_eq!(p.k, 400);
    assert!((p.rate - 0.2).abs() < 1e-12 && p.holds);
    let p = rate_fifth_params(1000, 0.1, 5.0).unwrap();
    assert!(p.rate < 0.2 && p.holds && p.log2_code_error < 0.0);
    assert!(single_instance_budget(1, 4.0, 4.0, 0.01) > 1.0);
}
