use super::*;
use crate::bits::BitWord;
use crate::inner::InnerParams;
use crate::rng::{random_word, RngSeed};
use crate::scheme::{all_outcome_distributions, CodingScheme};
use crate::symbol::Symbol;
use crate::tamper::{BitAction, BitTamperFn, Tamper};

fn toy(t: u64) -> ConcatCode {
    ConcatCode::new(ConcatPlan::toy(t, &RngSeed::from_u64(7)).unwrap()).unwrap()
}

#[test]
fn toy_ledger_arithmetic() {
    let p = ConcatPlan::toy(8, &RngSeed::from_u64(7)).unwrap();
    let d = &p.derived;
    // n_b = n2/b, n = n_b·B, N = n1 + n.
    assert_eq!((d.n2, d.n_b, d.n, d.n1, d.big_n, d.message_bits), (16, 16 / 4, 4 * 8, 8, 8 + 32, 4));
    // Two random symbols of four bits, distance 4 − 3 + 1 = 2 symbols.
    assert_eq!((d.t2_bits, d.delta2_bits, d.t2_blocks, d.delta2_blocks), (8.0, 8.0, 2.0, 2.0));
    assert_eq!(d.gamma2_pp, 0.5 * 0.5 * (16.0f64 / (2.0 * 4.0 * 32.0)).powi(2));
    assert_eq!((p.gamma1, p.gamma2), (8.0 / 32.0, 1.0 - 4.0 / 16.0));
    let r = (1.0 - 0.5) * (1.0 - p.gamma2) / (1.0 + p.gamma1);
    assert!((d.rate - r).abs() < 1e-12 && (d.rate_formula - r).abs() < 1e-12);
    let failing: Vec<_> = p.failing_checks().iter().map(|c| c.name.clone()).collect();
    assert_eq!(failing, vec!["n ≥ 32·B²".to_string(), "δ ≤ γ''2/2".to_string()]);
}

#[test]
fn strict_toy_is_rejected() {
    let lecss = crate::lecss::LecssCode::new(4, 4, 3, 2).unwrap().descriptor();
    let parts = PlanParts {
        gamma0: 0.5,
        inner: InnerParams::new(8, 4, 8, 0, 1).unwrap(),
        c1: InnerParams::new(8, 3, 4, 0, 1).unwrap(),
        lecss,
        ell: 1,
        backend: crate::perm::PermBackend::PrfShuffle,
        seed: RngSeed::from_u64(1),
        enforcement: Enforcement::Strict,
    };
    match assemble(parts) {
        Err(crate::Error::Infeasible { inequality, .. }) => assert_eq!(inequality, "n ≥ 32·B²"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn auto_planner() {
    let c1 = InnerParams::new(20, 8, 4, 0, 1).unwrap();
    assert!(plan_concat(4000, 0.0, &c1, &RngSeed::from_u64(1), Enforcement::Report).is_err());
    let p = plan_concat(2060, 0.4, &c1, &RngSeed::from_u64(1), Enforcement::Report).unwrap();
    let d = &p.derived;
    assert_eq!(d.block_bits, 10);
    assert_eq!(d.big_n, 2060);
    assert!(d.rate > 0.0 && (d.rate - d.rate_formula).abs() < 1e-12);
    let ell = p.perm.ell as f64;
    assert!(ell <= 0.5 * d.delta2_blocks.min(d.t2_blocks) && ell <= d.n as f64 / 2.0);
    match plan_concat(2061, 0.4, &c1, &RngSeed::from_u64(1), Enforcement::Report) {
        Err(crate::Error::Infeasible { detail, .. }) => assert!(detail.contains("nearest feasible")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn round_trip_and_length() {
    let code = toy(8);
    let mut rng = RngSeed::from_u64(3).rng();
    for v in 0..16 {
        let s = BitWord::from_u64(v, 4);
        for _ in 0..20 {
            let w = code.encode(&s, &mut rng).unwrap();
            assert_eq!(w.len(), 40);
            assert_eq!(code.decode(&w).unwrap(), Symbol::Message(s.clone()));
        }
    }
    let a = code.encode_seeded(&BitWord::from_u64(5, 4), &RngSeed::from_u64(9)).unwrap();
    assert_eq!(a, code.encode_seeded(&BitWord::from_u64(5, 4), &RngSeed::from_u64(9)).unwrap());
}

#[test]
fn identity_permutation_exposes_blocks() {
    let code = toy(8).with_identity_permutation();
    let s = BitWord::from_u64(0b1011, 4);
    let coins = code.coins_from_index(12345);
    let w = code.encode_with(&s, &coins).unwrap();
    let s_prime = code.lecss().encode_with_randomness(&s, &coins.lecss).unwrap();
    for i in 0..4 {
        let block = s_prime.slice(4 * i, 4).to_u64();
        assert_eq!(w.c_prime.slice(8 * i, 8).to_u64(), code.inner_code().encode_index(block, coins.inner[i]));
    }
}

#[test]
fn bad_block_or_outer_word_gives_bottom() {
    let code = toy(8).with_identity_permutation();
    let s = BitWord::from_u64(3, 4);
    let w = code.encode_with(&s, &code.coins_from_index(99)).unwrap();
    let inner = code.inner_code();
    let bad = (0..256u64).find(|&x| inner.decode_u64(x).is_none()).unwrap();
    let mut c = w.clone();
    for b in 0..8 {
        c.c_prime.set(8 + b, bad >> b & 1 == 1);
    }
    assert_eq!(code.decode_codeword(&c).unwrap(), Symbol::Bottom);
    // Replace block 0 by a codeword of another LECSS symbol: inner decoding succeeds, outer fails.
    let cur = inner.decode_u64(w.c_prime.slice(0, 8).to_u64()).unwrap();
    let other = inner.encode_index((cur + 1) % 16, 0);
    let mut c = w;
    for b in 0..8 {
        c.c_prime.set(b, other >> b & 1 == 1);
    }
    assert_eq!(code.decode_codeword(&c).unwrap(), Symbol::Bottom);
}

#[test]
fn canonical_list_is_classified() {
    let code = toy(8);
    let list = canonical_adversaries(&code, &RngSeed::from_u64(4)).unwrap();
    assert!(list.len() >= 6);
    let class = |name: &str| classify(code.plan(), &list.iter().find(|(n, _)| n == name).unwrap().1).unwrap();
    assert_eq!(class("identity"), CaseClass::Identity);
    assert_eq!(class("case1-boundary"), CaseClass::Case1);
    assert_eq!(class("case2.1-flips"), CaseClass::Case21);
    assert_eq!(class("case2.2-flips"), CaseClass::Case22);
    assert_eq!(class("case3-freeze-seed"), CaseClass::Case3);
    assert_eq!(class("constant-valid-codeword"), CaseClass::Case1);
    let (_, f) = list.iter().find(|(n, _)| n == "case1-boundary").unwrap();
    let frozen = f.segment(8, 32).partition().frozen.len();
    assert!(frozen as f64 >= 32.0 - code.plan().derived.t2_blocks);
    // The Case 3 seed segment decodes to one fixed seed whatever the input.
    let (_, f) = list.iter().find(|(n, _)| n == "case3-freeze-seed").unwrap();
    let seg = f.segment(0, 8);
    let mut rng = RngSeed::from_u64(5).rng();
    let first = code.seed_code().decode_u64(seg.apply_u64(0));
    assert!(first.is_some());
    for _ in 0..50 {
        let x = random_word(&mut rng, 8).to_u64();
        assert_eq!(code.seed_code().decode_u64(seg.apply_u64(x)), first);
    }
}

#[test]
fn segments_are_positional() {
    let code = toy(8);
    let w = code.encode_seeded(&BitWord::from_u64(6, 4), &RngSeed::from_u64(2)).unwrap();
    let word = w.to_word();
    let seed_only = BitTamperFn::new(
        (0..40).map(|i| if i < 8 { BitAction::Flip } else { BitAction::Keep }).collect(),
    );
    let t = Codeword::from_word(&seed_only.apply(&word).unwrap(), 8).unwrap();
    assert_eq!(t.c_prime, w.c_prime);
    assert_ne!(t.z_prime, w.z_prime);
}

#[test]
fn identity_attack_is_exactly_zero() {
    let code = toy(2);
    let r = attack_experiment(
        &code,
        "identity",
        &BitTamperFn::identity(40),
        crate::scheme::MessageSet::All,
        crate::scheme::SimMode::exact(),
        &RngSeed::from_u64(1),
    )
    .unwrap();
    assert_eq!((r.eps_hat, r.case_class), (0.0, CaseClass::Identity));
    let mut csv = Vec::new();
    write_attack_csv(&[r], &mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap(), "adversary_id,case_class,eps_hat,radius,samples\nidentity,identity,0,0,0\n");
}

#[test]
fn case1_outcome_is_message_independent() {
    let code = toy(2);
    let f = &case1_adversaries(&code, 1, &RngSeed::from_u64(11))[0].1;
    let per = all_outcome_distributions(&code, f, 1 << 24).unwrap();
    for (_, d) in &per[1..] {
        assert_eq!(crate::dist::statistical_distance_exact(&per[0].1, d).unwrap(), Some(0.into()));
    }
}
