//! GMAP: lossless little-endian container for guide maps.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "GMAP"
//! 4       2     version, u16 LE (= 1)
//! 6       2     reserved, u16 LE (= 0)
//! 8       4     width, u32 LE
//! 12      4     height, u32 LE
//! 16      4·w·h IEEE-754 binary32 LE samples, row-major, top-left origin
//! ```

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::codec::read_file;
use super::PlaneF32;
use crate::{Error, Result};

pub const GMAP_MAGIC: [u8; 4] = *b"GMAP";
pub const GMAP_VERSION: u16 = 1;
pub const GMAP_HEADER_LEN: usize = 16;

/// Serializes a plane into GMAP bytes.
pub fn encode_gmap(plane: &PlaneF32) -> Result<Vec<u8>> {
    let (width, height) = plane.dims();
    let (w, h) = match (u32::try_from(width), u32::try_from(height)) {
        (Ok(w), Ok(h)) => (w, h),
        _ => return Err(Error::InvalidDimensions { width, height }),
    };
    let mut bytes = Vec::with_capacity(GMAP_HEADER_LEN + 4 * plane.data().len());
    bytes.extend_from_slice(&GMAP_MAGIC);
    bytes.extend_from_slice(&GMAP_VERSION.to_le_bytes());
    bytes.extend_from_slice(&0u16.to_le_bytes());
    bytes.extend_from_slice(&w.to_le_bytes());
    bytes.extend_from_slice(&h.to_le_bytes());
    for v in plane.data() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    Ok(bytes)
}

/// Parses GMAP bytes. Trailing bytes past the sample block are ignored.
pub fn decode_gmap(bytes: &[u8]) -> Result<PlaneF32> {
    let truncated = |expected: usize| Error::TruncatedFile {
        expected: expected as u64,
        actual: bytes.len() as u64,
    };
    if bytes.len() < 4 {
        return Err(truncated(GMAP_HEADER_LEN));
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != GMAP_MAGIC {
        return Err(Error::BadMagic(magic));
    }
    if bytes.len() < GMAP_HEADER_LEN {
        return Err(truncated(GMAP_HEADER_LEN));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != GMAP_VERSION {
        return Err(Error::BadVersion(version));
    }
    let width = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(GMAP_HEADER_LEN))
        .ok_or(Error::InvalidDimensions { width, height })?;
    if bytes.len() < expected {
        return Err(truncated(expected));
    }
    let data = bytes[GMAP_HEADER_LEN..expected]
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    PlaneF32::new(width, height, data)
}

pub fn write_gmap(plane: &PlaneF32, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode_gmap(plane)?;
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

pub fn read_gmap(path: impl AsRef<Path>) -> Result<PlaneF32> {
    decode_gmap(&read_file(path.as_ref())?)
}
