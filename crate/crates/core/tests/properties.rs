//! Invariants as property tests.

mod common;

use std::collections::BTreeMap;

use nmcode::bits::BitWord;
use nmcode::dist::{statistical_distance, statistical_distance_exact, FiniteDist};
use nmcode::lecss::LecssCode;
use nmcode::nmext::{check_extraction, ExtractorTable, FlatSourcePair};
use nmcode::perm::{derive_permutation, PermBackend, PermSpec, Permutation};
use nmcode::rng::RngSeed;
use nmcode::symbol::Symbol;
use nmcode::tamper::{BitAction, BitTamperFn, Tamper};
use proptest::prelude::*;

/// Float slack for sums of a handful of probabilities.
const EPS: f64 = 1e-12;

fn symbol(v: u8) -> Symbol {
    match v % 6 {
        4 => Symbol::Bottom,
        5 => Symbol::Same,
        m => Symbol::Message(BitWord::from_u64(m as u64, 2)),
    }
}

fn dist_strategy() -> impl Strategy<Value = FiniteDist> {
    prop::collection::vec((0u8..6, 1u128..20), 1..6).prop_map(|entries| {
        let mut counts = BTreeMap::new();
        for (s, c) in entries {
            *counts.entry(symbol(s)).or_insert(0) += c;
        }
        let total = counts.values().sum();
        FiniteDist::exact_counts(2, counts, total).unwrap()
    })
}

fn as_pairs(d: &FiniteDist) -> Vec<(String, f64)> {
    d.iter().into_iter().map(|(s, p)| (s.tag(), p)).collect()
}

fn action(v: u8) -> BitAction {
    [BitAction::Keep, BitAction::Flip, BitAction::Set0, BitAction::Set1][v as usize % 4]
}

fn word(bits: &[bool]) -> BitWord {
    BitWord::from_bits(bits)
}

proptest! {
    #[test]
    fn sd_is_a_metric(p in dist_strategy(), q in dist_strategy(), r in dist_strategy()) {
        let pq = statistical_distance(&p, &q).unwrap();
        prop_assert!((pq - statistical_distance(&q, &p).unwrap()).abs() < EPS);
        prop_assert!(statistical_distance(&p, &p).unwrap() < EPS);
        prop_assert!((-EPS..=1.0 + EPS).contains(&pq));
        let pr = statistical_distance(&p, &r).unwrap();
        let rq = statistical_distance(&r, &q).unwrap();
        prop_assert!(pq <= pr + rq + EPS);
        prop_assert!((pq - common::naive_sd(&as_pairs(&p), &as_pairs(&q))).abs() < EPS);
        let exact = statistical_distance_exact(&p, &q).unwrap().unwrap();
        prop_assert!((pq - *exact.numer() as f64 / *exact.denom() as f64).abs() < EPS);
    }

    #[test]
    fn push_copy_moves_same(p in dist_strategy(), s in 0u64..4) {
        let msg = BitWord::from_u64(s, 2);
        let c = p.push_copy(&msg).unwrap();
        let target = Symbol::Message(msg);
        prop_assert_eq!(c.prob(&Symbol::Same), 0.0);
        prop_assert!((c.prob(&target) - p.prob(&target) - p.prob(&Symbol::Same)).abs() < EPS);
        prop_assert!((c.prob(&Symbol::Bottom) - p.prob(&Symbol::Bottom)).abs() < EPS);
        let total: f64 = c.iter().iter().map(|(_, q)| q).sum();
        prop_assert!((total - 1.0).abs() < EPS);
    }

    #[test]
    fn bitword_round_trips(bits in prop::collection::vec(any::<bool>(), 0..150)) {
        let w = word(&bits);
        prop_assert_eq!(w.bits().collect::<Vec<_>>(), bits.clone());
        prop_assert_eq!(BitWord::from_hex(&w.to_hex(), bits.len()).unwrap(), w.clone());
        prop_assert_eq!(BitWord::from_bytes(&w.to_bytes(), bits.len()).unwrap(), w.clone());
        prop_assert_eq!(w.xor(&w).unwrap(), BitWord::zeros(bits.len()));
        prop_assert_eq!(w.weight(), bits.iter().filter(|&&b| b).count());
        let cut = bits.len() / 3;
        prop_assert_eq!(w.slice(0, cut).concat(&w.slice(cut, bits.len() - cut)), w);
    }

    #[test]
    fn tamper_matches_actions(actions in prop::collection::vec(0u8..4, 1..100), x in prop::collection::vec(any::<bool>(), 100)) {
        let acts: Vec<BitAction> = actions.iter().map(|&a| action(a)).collect();
        let n = acts.len();
        let f = BitTamperFn::new(acts.clone());
        let x = word(&x[..n]);
        let y = f.apply(&x).unwrap();
        for (i, a) in acts.iter().enumerate() {
            let expect = match a {
                BitAction::Keep => x.get(i),
                BitAction::Flip => !x.get(i),
                BitAction::Set0 => false,
                BitAction::Set1 => true,
            };
            prop_assert_eq!(y.get(i), expect);
        }
    }

    #[test]
    fn freezing_is_idempotent_and_flipping_an_involution(actions in prop::collection::vec(0u8..4, 1..80), x in prop::collection::vec(any::<bool>(), 80)) {
        let n = actions.len();
        let x = word(&x[..n]);
        let no_flip = BitTamperFn::new(actions.iter().map(|&a| if a == 1 { BitAction::Keep } else { action(a) }).collect());
        let once = no_flip.apply(&x).unwrap();
        prop_assert_eq!(no_flip.apply(&once).unwrap(), once);
        let flips = BitTamperFn::new(actions.iter().map(|&a| if a % 2 == 0 { BitAction::Keep } else { BitAction::Flip }).collect());
        prop_assert_eq!(flips.apply(&flips.apply(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn partition_covers_every_index_once(actions in prop::collection::vec(0u8..4, 0..60)) {
        let f = BitTamperFn::new(actions.iter().map(|&a| action(a)).collect());
        let p = f.partition();
        let mut all: Vec<usize> = p.frozen.iter().chain(&p.flipped).chain(&p.kept).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..actions.len()).collect::<Vec<_>>());
        prop_assert!(p.frozen.iter().all(|&i| f.actions()[i].is_frozen()));
        prop_assert!(p.flipped.iter().all(|&i| f.actions()[i] == BitAction::Flip));
    }

    #[test]
    fn permutation_round_trip(n in 1usize..40, z in any::<u64>(), x in prop::collection::vec(any::<bool>(), 40)) {
        let spec = PermSpec::new(n, 1, 64, PermBackend::PrfShuffle).unwrap();
        let p = derive_permutation(&spec, &BitWord::from_u64(z, 64)).unwrap();
        let x = word(&x[..n]);
        let moved = p.apply(&x).unwrap();
        prop_assert_eq!(moved.weight(), x.weight());
        prop_assert_eq!(p.invert(&moved).unwrap(), x.clone());
        for i in 0..n {
            prop_assert_eq!(moved.get(p.forward()[i] as usize), x.get(i));
        }
        let back = Permutation::new(p.inverse().to_vec()).unwrap();
        prop_assert_eq!(back.apply(&moved).unwrap(), x);
    }

    #[test]
    fn lecss_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), seed in any::<u64>()) {
        let code = LecssCode::new(4, 10, 6, 2).unwrap();
        let k = code.message_len();
        let (s1, s2) = (BitWord::from_u64(s1, k), BitWord::from_u64(s2, k));
        let mut rng = RngSeed::from_u64(seed).rng();
        let w1 = code.encode(&s1, &mut rng).unwrap();
        let w2 = code.encode(&s2, &mut rng).unwrap();
        prop_assert_eq!(code.decode(&w1).unwrap(), Symbol::Message(s1.clone()));
        prop_assert_eq!(code.decode(&w1.xor(&w2).unwrap()).unwrap(), Symbol::Message(s1.xor(&s2).unwrap()));
    }

    #[test]
    fn extraction_matches_counting(seed in any::<u64>(), xs in prop::collection::btree_set(0u32..8, 1..8), ys in prop::collection::btree_set(0u32..8, 1..8)) {
        let ext = ExtractorTable::from_fn(3, 2, |x, y| ((seed >> ((x * 8 + y) % 32 * 2)) & 3) as u16).unwrap();
        let (xs, ys): (Vec<u32>, Vec<u32>) = (xs.into_iter().collect(), ys.into_iter().collect());
        let src = FlatSourcePair::new(3, xs.clone(), ys.clone()).unwrap();
        prop_assert!((check_extraction(&ext, &src).unwrap() - common::naive_extraction(&ext, &xs, &ys)).abs() < EPS);
    }
}
