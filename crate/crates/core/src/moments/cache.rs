//! On-disk memo of Haar moment projectors.
//!
//! File layout (little endian): magic `CLHP`, `u32` version, `u64` D, `u64` k,
//! then `D^{2k} × D^{2k}` complex doubles row-major as `(re, im)` pairs.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::projector::{haar_moment_projector, Layout, MomentOperator};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

pub const CACHE_ENV: &str = "COMPLEXITY_LAB_CACHE";
pub const MAGIC: &[u8; 4] = b"CLHP";
pub const VERSION: u32 = 1;

pub fn cache_file(dir: &Path, d: usize, k: usize) -> PathBuf {
    dir.join(format!("haar_D{d}_k{k}.bin"))
}

pub fn write_projector(path: &Path, op: &MomentOperator) -> Result<()> {
    let n = op.dim();
    let mut buf = Vec::with_capacity(24 + n * n * 16);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(op.base_dim as u64).to_le_bytes());
    buf.extend_from_slice(&(op.k as u64).to_le_bytes());
    for r in 0..n {
        for c in 0..n {
            let z = op.matrix[(r, c)];
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    let tmp = path.with_extension("tmp");
    fs::File::create(&tmp)?.write_all(&buf)?;
    fs::rename(tmp, path)?;
    Ok(())
}

pub fn read_projector(path: &Path) -> Result<MomentOperator> {
    let mut buf = Vec::new();
    fs::File::open(path)?.read_to_end(&mut buf)?;
    let bad = |why: &str| Error::InvalidInput(format!("{}: {why}", path.display()));
    if buf.len() < 24 || &buf[..4] != MAGIC {
        return Err(bad("not a projector cache file"));
    }
    let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(bad(&format!("cache version {version}, expected {VERSION}")));
    }
    let d = u64::from_le_bytes(buf[8..16].try_into().unwrap()) as usize;
    let k = u64::from_le_bytes(buf[16..24].try_into().unwrap()) as usize;
    let n = d
        .checked_pow(2 * k as u32)
        .ok_or_else(|| bad("header dimensions overflow"))?;
    if buf.len() != 24 + n * n * 16 {
        return Err(bad("payload length does not match header"));
    }
    let f = |off: usize| f64::from_le_bytes(buf[off..off + 8].try_into().unwrap());
    let matrix = CMat::from_fn(n, n, |r, c| {
        let off = 24 + (r * n + c) * 16;
        C64::new(f(off), f(off + 8))
    });
    Ok(MomentOperator {
        k,
        base_dim: d,
        layout: Layout::Natural,
        matrix,
    })
}

/// Projector from `dir` if cached, else computed and stored there.
pub fn cached_projector_in(dir: &Path, d: usize, k: usize) -> Result<MomentOperator> {
    let path = cache_file(dir, d, k);
    if path.exists() {
        let op = read_projector(&path)?;
        if op.base_dim == d && op.k == k {
            return Ok(op);
        }
    }
    let op = haar_moment_projector(d, k)?;
    fs::create_dir_all(dir)?;
    write_projector(&path, &op)?;
    Ok(op)
}

/// Uses the directory named by `COMPLEXITY_LAB_CACHE` when set.
pub fn cached_projector(d: usize, k: usize) -> Result<MomentOperator> {
    match std::env::var_os(CACHE_ENV) {
        Some(dir) if !dir.is_empty() => cached_projector_in(Path::new(&dir), d, k),
        _ => haar_moment_projector(d, k),
    }
}
