//! `RADT` tensor dump: `b"RADT"`, version byte `1`, dims `C, H, W` as `u32`
//! little-endian, then `C*H*W` little-endian `f64` in channel-major,
//! row-major order.

use std::io::{Read, Write};

use super::FeatureMap;
use crate::error::{Error, Result};

pub const DUMP_MAGIC: [u8; 4] = *b"RADT";
pub const DUMP_VERSION: u8 = 1;

pub fn write_dump<W: Write>(mut out: W, map: &FeatureMap) -> Result<()> {
    let (c, h, w) = map.shape();
    let dim = |v: usize| u32::try_from(v).map_err(|_| Error::shape(format!("dimension {v} exceeds u32")));
    let (c, h, w) = (dim(c)?, dim(h)?, dim(w)?);
    let mut buf = Vec::with_capacity(17 + 8 * map.len());
    buf.extend_from_slice(&DUMP_MAGIC);
    buf.push(DUMP_VERSION);
    for d in [c, h, w] {
        buf.extend_from_slice(&d.to_le_bytes());
    }
    for v in map.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_dump<R: Read>(mut input: R) -> Result<FeatureMap> {
    let mut header = [0u8; 17];
    input
        .read_exact(&mut header)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    if header[..4] != DUMP_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    if header[4] != DUMP_VERSION {
        return Err(Error::Format(format!("unsupported version {}", header[4])));
    }
    let dim = |i: usize| u32::from_le_bytes(header[5 + 4 * i..9 + 4 * i].try_into().unwrap()) as usize;
    let (c, h, w) = (dim(0), dim(1), dim(2));
    let n = c
        .checked_mul(h)
        .and_then(|v| v.checked_mul(w))
        .ok_or_else(|| Error::Format("dims overflow".into()))?;
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() != n * 8 {
        return Err(Error::Format(format!(
            "expected {} payload bytes, found {}",
            n * 8,
            body.len()
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    FeatureMap::new(c, h, w, data)
}
