//! Binary field files: b"AFLD", u32 version, u32 d, u32 N, u32 dims[d], then
//! f64 values with component index fastest, then x₁, x₂, …; all little-endian.

use std::io::{Read, Write};
use std::path::Path;

use super::field::PeriodicField;
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const AFLD_MAGIC: &[u8; 4] = b"AFLD";
pub const AFLD_VERSION: u32 = 1;

pub fn encode_afld(f: &PeriodicField) -> Vec<u8> {
    let grid = f.grid();
    let mut out = Vec::with_capacity(16 + 4 * grid.d() + 8 * f.values().len());
    out.extend_from_slice(AFLD_MAGIC);
    out.extend_from_slice(&AFLD_VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.d() as u32).to_le_bytes());
    out.extend_from_slice(&(f.n() as u32).to_le_bytes());
    for &n in grid.dims() {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for v in f.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Parse("truncated AFLD data".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

pub fn decode_afld(bytes: &[u8]) -> Result<PeriodicField> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4)? != AFLD_MAGIC {
        return Err(Error::Parse("missing AFLD magic".into()));
    }
    let version = c.u32()?;
    if version != AFLD_VERSION {
        return Err(Error::Parse(format!("unsupported AFLD version {version}")));
    }
    let d = c.u32()? as usize;
    let n = c.u32()? as usize;
    if d == 0 || d > 16 {
        return Err(Error::Parse(format!("implausible dimension {d}")));
    }
    let dims = (0..d)
        .map(|_| c.u32().map(|v| v as usize))
        .collect::<Result<Vec<_>>>()?;
    let grid = GridSpec::new(&dims)?;
    let count = grid
        .len()
        .checked_mul(n)
        .ok_or_else(|| Error::Parse("field too large".into()))?;
    let body_len = count
        .checked_mul(8)
        .ok_or_else(|| Error::Parse("field too large".into()))?;
    let header = c.pos;
    if bytes.len() - header != body_len {
        return Err(Error::Parse(format!(
            "expected {body_len} value bytes after the header, found {}",
            bytes.len() - header
        )));
    }
    let body = c.take(body_len)?;
    let values = body
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
        .collect();
    PeriodicField::from_values(&grid, n, values)
}

pub fn read_afld(path: &Path) -> Result<PeriodicField> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_afld(&bytes)
}

/// Writes through a temporary file in the target directory, then renames it into place.
pub fn write_afld(path: &Path, f: &PeriodicField) -> Result<()> {
    write_atomic(path, &encode_afld(f))
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    // Temporary files are created owner-only; outputs get ordinary permissions.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_bytes() {
        let g = GridSpec::new(&[4, 6]).unwrap();
        let f = PeriodicField::from_fn(&g, 2, |x, out| {
            out[0] = x[0] - 0.25;
            out[1] = x[1] * 3.0;
        });
        let bytes = encode_afld(&f);
        assert_eq!(&bytes[..4], b"AFLD");
        assert_eq!(bytes.len(), 4 + 4 * 3 + 4 * 2 + 8 * 48);
        // Component fastest: the first two values are both components at the origin.
        assert_eq!(f64::from_le_bytes(bytes[24..32].try_into().unwrap()), -0.25);
        assert_eq!(f64::from_le_bytes(bytes[32..40].try_into().unwrap()), 0.0);
        assert_eq!(f64::from_le_bytes(bytes[40..48].try_into().unwrap()), 0.0);
        assert_eq!(decode_afld(&bytes).unwrap(), f);
    }

    #[test]
    fn rejects_corrupt_input() {
        let g = GridSpec::new(&[4, 4]).unwrap();
        let bytes = encode_afld(&PeriodicField::zeros(&g, 1));
        assert!(decode_afld(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_afld(&bad).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_afld(&extra).is_err());
        let mut odd = bytes;
        odd[16..20].copy_from_slice(&5u32.to_le_bytes());
        assert!(decode_afld(&odd).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.afld");
        let g = GridSpec::new(&[4, 4, 4]).unwrap();
        let f = PeriodicField::from_fn(&g, 3, |x, out| out.copy_from_slice(x));
        write_afld(&path, &f).unwrap();
        assert_eq!(read_afld(&path).unwrap(), f);
    }
}
