//! Reed-Solomon secret sharing over GF(8): encode, corrupt, add.

use nmcode::bits::BitWord;
use nmcode::lecss::{verify_lecss, LecssCode, DEFAULT_LECSS_GUARD};
use nmcode::rng::RngSeed;

fn main() -> nmcode::Result<()> {
    let code = LecssCode::new(3, 8, 6, 2)?;
    println!("{} message bits -> {} codeword bits, distance {}", code.message_len(), code.block_len(), code.distance());

    let mut rng = RngSeed::from_u64(1).rng();
    let s = BitWord::from_u64(0b1010_0111_0001, code.message_len());
    let w = code.encode(&s, &mut rng)?;
    println!("Enc({}) = {} ({:?})", s.to_hex(), w.to_hex(), code.unpack(&w));
    println!("Dec = {:?}", code.decode(&w)?);

    let mut bad = w.clone();
    bad.set(0, !bad.get(0));
    println!("one flipped bit -> {:?}", code.decode(&bad)?);

    let t = BitWord::from_u64(0b0000_1111_0000, code.message_len());
    let sum = w.xor(&code.encode(&t, &mut rng)?)?;
    println!("Dec(Enc(s) + Enc(t)) = {:?}, s + t = {}", code.decode(&sum)?, s.xor(&t)?.to_hex());

    let v = verify_lecss(&code, 256, &RngSeed::from_u64(2), DEFAULT_LECSS_GUARD)?;
    for r in v.reports() {
        println!("{}: {}", r.property, if r.pass { "pass" } else { "FAIL" });
    }
    Ok(())
}
