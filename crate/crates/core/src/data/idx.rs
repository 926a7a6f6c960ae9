//! IDX container (big-endian header, unsigned-byte payload), optionally
//! gzip-compressed.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{Error, Result};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

/// Decoded IDX tensor of unsigned bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdxArray {
    pub dims: Vec<usize>,
    pub data: Vec<u8>,
}

/// Reads `path`, inflating it first when it starts with the gzip magic.
pub fn read_maybe_gzip(path: &Path) -> Result<Vec<u8>> {
    let raw = fs::read(path)?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| Error::Idx {
                path: path.to_path_buf(),
                reason: format!("gzip: {e}"),
            })?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

/// Parses an IDX byte buffer with the given magic.
pub fn parse_idx(bytes: &[u8], magic: u32, path: &Path) -> Result<IdxArray> {
    let bad = |reason: String| Error::Idx {
        path: path.to_path_buf(),
        reason,
    };
    if bytes.len() < 4 {
        return Err(bad("truncated header".into()));
    }
    let found = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
    if found != magic {
        return Err(bad(format!("magic {found:#010x}, expected {magic:#010x}")));
    }
    let ndim = (magic & 0xff) as usize;
    let header = 4 + 4 * ndim;
    if bytes.len() < header {
        return Err(bad("truncated header".into()));
    }
    let dims: Vec<usize> = (0..ndim)
        .map(|i| {
            let o = 4 + 4 * i;
            u32::from_be_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]) as usize
        })
        .collect();
    let len = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| bad("dimensions overflow".into()))?;
    let body = &bytes[header..];
    if body.len() != len {
        return Err(bad(format!("payload has {} bytes, header implies {len}", body.len())));
    }
    Ok(IdxArray {
        dims,
        data: body.to_vec(),
    })
}

pub fn read_idx(path: &Path, magic: u32) -> Result<IdxArray> {
    parse_idx(&read_maybe_gzip(path)?, magic, path)
}

/// Writes an uncompressed IDX file.
pub fn write_idx(mut w: impl Write, array: &IdxArray) -> Result<()> {
    let magic = 0x0000_0800 | array.dims.len() as u32;
    w.write_all(&magic.to_be_bytes())?;
    for &d in &array.dims {
        let d = u32::try_from(d).map_err(|_| Error::InvalidArgument(format!("IDX dimension {d} exceeds u32")))?;
        w.write_all(&d.to_be_bytes())?;
    }
    w.write_all(&array.data)?;
    Ok(())
}
