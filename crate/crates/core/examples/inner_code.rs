//! Sample a small inner code and run its property checks.

use nmcode::inner::{
    verify_bounded_independence, verify_cube_property, verify_error_detection, InnerCode, InnerParams,
    DEFAULT_CUBE_GUARD, DEFAULT_SWEEP_GUARD,
};
use nmcode::rng::RngSeed;
use nmcode::scheme::DEFAULT_EXACT_GUARD;

fn main() -> nmcode::Result<()> {
    let params = InnerParams::new_unpacked(10, 4, 8, 1, 10)?;
    let code = InnerCode::sample(params, &RngSeed::from_u64(1))?;
    println!("n = {}, k = {}, t = {}, min distance {:?}", params.n, params.k, params.t, code.min_pairwise_distance());

    let mut rng = RngSeed::from_u64(2).rng();
    for s in 0..4 {
        let w = code.encode_u64(s, &mut rng);
        println!("Enc({s}) = {w:010b} -> {:?}", code.decode_u64(w));
    }
    println!("Dec(0) = {:?}", code.decode_u64(0));

    for r in [
        verify_cube_property(&code, DEFAULT_CUBE_GUARD)?,
        verify_bounded_independence(&code, 2, 0.15, DEFAULT_EXACT_GUARD)?,
        verify_error_detection(&code, DEFAULT_SWEEP_GUARD)?,
    ] {
        println!("{}: {} (worst {:.3}, {})", r.property, if r.pass { "pass" } else { "FAIL" }, r.worst_value, r.worst_case);
    }
    Ok(())
}
