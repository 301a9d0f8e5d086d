//! Binary dump format for sampled Bloch vectors.
//!
//! Layout: a 32-byte header — magic `PURIKITA` (8 bytes), format version
//! u32, 4 reserved bytes, record count u64, base seed u64, all
//! little-endian — followed by `count` records of 15 little-endian f64
//! coordinates each.

use crate::error::{Error, Result};
use crate::sampler::BlochVector;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 8] = b"PURIKITA";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct DumpHeader {
    pub version: u32,
    pub count: u64,
    pub seed: u64,
}

pub fn write_dump(path: &Path, seed: u64, vectors: &[BlochVector]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[0u8; 4])?;
    w.write_all(&(vectors.len() as u64).to_le_bytes())?;
    w.write_all(&seed.to_le_bytes())?;
    for v in vectors {
        for x in v.0 {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_dump(path: &Path) -> Result<(DumpHeader, Vec<BlochVector>)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?}; not a Bloch-vector dump",
            magic
        )));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported dump version {version}")));
    }
    r.read_exact(&mut u32buf)?; // reserved
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let count = u64::from_le_bytes(u64buf);
    r.read_exact(&mut u64buf)?;
    let seed = u64::from_le_bytes(u64buf);

    let mut vectors = Vec::with_capacity(count as usize);
    let mut record = [0u8; 8 * 15];
    for _ in 0..count {
        r.read_exact(&mut record).map_err(|e| {
            Error::Format(format!("truncated dump after {} records: {e}", vectors.len()))
        })?;
        let mut a = [0.0f64; 15];
        for (i, chunk) in record.chunks_exact(8).enumerate() {
            a[i] = f64::from_le_bytes(chunk.try_into().unwrap());
        }
        vectors.push(BlochVector(a));
    }
    Ok((
        DumpHeader {
            version,
            count,
            seed,
        },
        vectors,
    ))
}
