//! Binary table format for inner codes.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "NMIC"  u8 version=1  u8 n  u8 k  u8 0
//! u64 t  u32 delta_num  u32 delta_den  [u8; 32] seed  u64 stream_id
//! t·2^k codewords, message-major, each ⌈n/8⌉ bytes
//! ```

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::rng::RngSeed;

use super::code::InnerCode;
use super::params::InnerParams;

const MAGIC: &[u8; 4] = b"NMIC";
const VERSION: u8 = 1;

pub fn write_inner_code<W: Write>(code: &InnerCode, mut out: W) -> Result<()> {
    let p = code.params();
    out.write_all(MAGIC)?;
    out.write_all(&[VERSION, p.n as u8, p.k as u8, 0])?;
    out.write_all(&p.t.to_le_bytes())?;
    out.write_all(&p.delta_num.to_le_bytes())?;
    out.write_all(&p.delta_den.to_le_bytes())?;
    out.write_all(&code.seed().seed)?;
    out.write_all(&code.seed().stream_id.to_le_bytes())?;
    let width = p.n.div_ceil(8);
    for &w in code.codebook() {
        out.write_all(&w.to_le_bytes()[..width])?;
    }
    Ok(())
}

fn read_array<const N: usize, R: Read>(input: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    input.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_inner_code<R: Read>(mut input: R) -> Result<InnerCode> {
    if &read_array::<4, _>(&mut input)? != MAGIC {
        return Err(Error::Parse("not an inner code table".into()));
    }
    let [version, n, k, _] = read_array::<4, _>(&mut input)?;
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported table version {version}")));
    }
    let t = u64::from_le_bytes(read_array(&mut input)?);
    let delta_num = u32::from_le_bytes(read_array(&mut input)?);
    let delta_den = u32::from_le_bytes(read_array(&mut input)?);
    let seed = read_array::<32, _>(&mut input)?;
    let stream_id = u64::from_le_bytes(read_array(&mut input)?);
    let params = InnerParams::new_unpacked(n as usize, k as usize, t, delta_num, delta_den)?;
    let width = params.n.div_ceil(8);
    let mut codebook = Vec::with_capacity(params.codebook_size() as usize);
    let mut buf = [0u8; 8];
    for _ in 0..params.codebook_size() {
        input.read_exact(&mut buf[..width])?;
        codebook.push(u64::from_le_bytes(buf));
    }
    let mut rest = Vec::new();
    input.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Parse(format!("{} trailing bytes", rest.len())));
    }
    InnerCode::from_codebook(params, RngSeed::new(seed, stream_id), codebook)
}
