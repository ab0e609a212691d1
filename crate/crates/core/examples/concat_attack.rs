//! The toy concatenated code against the canonical adversaries.

use nmcode::concat::{attack_sweep, canonical_adversaries, ConcatCode, ConcatPlan};
use nmcode::rng::RngSeed;
use nmcode::scheme::{CodingScheme, MessageSet, SimMode};
use nmcode::bits::BitWord;

fn main() -> nmcode::Result<()> {
    let plan = ConcatPlan::toy(4, &RngSeed::from_u64(8))?;
    let d = &plan.derived;
    println!("N = {}, n1 = {}, n = {}, K = {}, rate {:.3}", d.big_n, d.n1, d.n, d.message_bits, d.rate);
    for c in plan.failing_checks() {
        println!("  fails: {} ({} vs {})", c.name, c.lhs, c.rhs);
    }

    let code = ConcatCode::new(plan)?;
    let mut rng = RngSeed::from_u64(1).rng();
    let s = BitWord::from_u64(0b1011, 4);
    let w = code.encode(&s, &mut rng)?;
    println!("Enc({s}) = {w} -> {:?}", code.decode(&w)?);

    let adversaries = canonical_adversaries(&code, &RngSeed::from_u64(2))?;
    let rows = attack_sweep(&code, &adversaries, MessageSet::All, SimMode::Sampled { samples: 5_000 }, &RngSeed::from_u64(3))?;
    for r in rows {
        println!("{:<24} {:<8} ε̂ = {:.4} ± {:.4}", r.adversary_id, r.case_class.as_str(), r.eps_hat, r.radius);
    }
    Ok(())
}
