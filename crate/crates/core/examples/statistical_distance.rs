//! Distributions over messages, ⊥ and same; copy and distance.

use std::collections::BTreeMap;

use nmcode::bits::BitWord;
use nmcode::dist::{statistical_distance, statistical_distance_exact, FiniteDist};
use nmcode::symbol::Symbol;

fn msg(v: u64) -> Symbol {
    Symbol::Message(BitWord::from_u64(v, 2))
}

fn main() -> nmcode::Result<()> {
    let d = FiniteDist::exact_counts(2, BTreeMap::from([(Symbol::Same, 2), (Symbol::Bottom, 1), (msg(3), 1)]), 4)?;
    let s = BitWord::from_u64(1, 2);
    let copied = d.push_copy(&s)?;
    println!("D = {:?}", d.iter());
    println!("copy(D, {s}) = {:?}", copied.iter());

    let p = FiniteDist::exact_counts(2, BTreeMap::from([(msg(1), 1), (Symbol::Bottom, 1)]), 2)?;
    println!("SD = {} = {:?}", statistical_distance(&p, &copied)?, statistical_distance_exact(&p, &copied)?);
    println!("SD to uniform = {}", statistical_distance(&p, &FiniteDist::uniform_messages(2)?)?);
    Ok(())
}
