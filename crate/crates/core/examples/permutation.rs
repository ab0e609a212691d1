//! Permutations from short seeds, and their pairwise marginals.

use nmcode::bits::BitWord;
use nmcode::perm::{derive_permutation, exact_lwise_distance, test_lwise_dependence, PermBackend, PermSpec};
use nmcode::rng::RngSeed;

fn main() -> nmcode::Result<()> {
    let spec = PermSpec::new(10, 2, 32, PermBackend::PrfShuffle)?;
    let p = derive_permutation(&spec, &BitWord::from_u64(0xdead_beef, 32))?;
    println!("π = {:?}", p.forward());
    let x = BitWord::from_bit_str("1100000001")?;
    println!("{x} -> {}", p.apply(&x)?);

    let r = test_lwise_dependence(&spec, 2, 20_000, 0.02, &RngSeed::from_u64(1))?;
    println!("prf shuffle: worst pair distance {:.4} ({}), δ {}", r.worst_value, r.worst_case, spec.delta_status());

    let tiny = PermSpec::new(4, 2, 8, PermBackend::ExactTinyRejection)?;
    println!("exact tiny n = 4: {} of 256 seeds accepted, 2-wise distance {}", tiny.accepted_seeds(), exact_lwise_distance(&tiny, 2, 1 << 20)?);

    let id = PermSpec::new(10, 2, 32, PermBackend::Identity)?;
    let r = test_lwise_dependence(&id, 2, 2_000, 0.02, &RngSeed::from_u64(1))?;
    println!("identity control: {} ({:.3})", if r.pass { "pass" } else { "FAIL" }, r.worst_value);
    Ok(())
}
