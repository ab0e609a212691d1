//! A random two-source extractor, its non-malleability, and the code it gives.

use nmcode::nmext::{
    check_extraction, check_relaxed_nm, check_strict_nm, decomposition_check, sample_random_extractor,
    verify_reduction, ExtractorTable, FlatSourcePair, Pattern,
};
use nmcode::rng::RngSeed;
use nmcode::tamper::random_split_tamper;

fn main() -> nmcode::Result<()> {
    let full = FlatSourcePair::full(2);
    println!("inner product, n = 2: {}", check_extraction(&ExtractorTable::inner_product(2)?, &full)?);

    let ext = sample_random_extractor(3, 1, &RngSeed::from_u64(1))?;
    let full = FlatSourcePair::full(3);
    let mut rng = RngSeed::from_u64(2).rng();
    let f = random_split_tamper(3, true, &mut rng)?;
    let relaxed = check_relaxed_nm(&ext, &full, &f, &[Pattern::F1Only, Pattern::F2Only, Pattern::Both])?;
    let strict = check_strict_nm(&ext, &full, &f)?;
    println!("extraction {:.4}, relaxed {:.4}, strict {:.4}", relaxed.extraction_distance, relaxed.error, strict.error);

    let g = random_split_tamper(3, false, &mut rng)?;
    let c = decomposition_check(&ext, &full, &g)?;
    println!("with fixed points: strict {:.4} ≤ 4·{:.4}: {}", c.strict_error, c.relaxed_error, c.holds);

    let ext = sample_random_extractor(4, 1, &RngSeed::from_u64(3))?;
    let r = verify_reduction(&ext, 50, &RngSeed::from_u64(4))?;
    println!(
        "code from n = 4 table: worst error {:.4}, encoding distance {:.4}, all within ε_f·(2^k+1): {}",
        r.worst_code_error, r.encoding_distance, r.pass
    );
    Ok(())
}
