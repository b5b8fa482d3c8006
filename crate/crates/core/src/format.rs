//! Binary signals file.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic      4 bytes   "EFSS"
//! version    u32       1
//! n          u32       frame count
//! d          u32       embedding dimension
//! fps        f32
//! flags      u32       bit 0: embeddings pre-normalized
//! meta_len   u32
//! metadata   meta_len bytes of UTF-8 JSON
//! embeddings n * d f32, row-major
//! relevance  n f32
//! ```

use std::fs;
use std::path::Path;

use crate::error::{EfsError, Result};
use crate::scalar::Scalar;
use crate::signals::{validate_signals, Metadata, RawSignals, SignalSet, ValidationReport};

pub const MAGIC: [u8; 4] = *b"EFSS";
pub const VERSION: u32 = 1;
pub const FLAG_PRENORMALIZED: u32 = 1;

const FIXED_HEADER: usize = 4 + 4 * 6;

/// Fixed-size header fields plus the decoded metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalsHeader {
    pub version: u32,
    pub frame_count: u32,
    pub dim: u32,
    pub fps: f32,
    pub flags: u32,
    pub metadata: Metadata,
    pub metadata_len: u32,
}

impl SignalsHeader {
    pub fn payload_len(&self) -> usize {
        4 * (self.frame_count as usize * self.dim as usize + self.frame_count as usize)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len()).ok_or(
            EfsError::TruncatedPayload { expected: self.pos.saturating_add(len), actual: self.bytes.len() },
        )?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

fn parse_header(cur: &mut Cursor<'_>) -> Result<SignalsHeader> {
    let magic: [u8; 4] = cur.take(4)?.try_into().expect("4 bytes");
    if magic != MAGIC {
        return Err(EfsError::BadMagic(magic));
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(EfsError::UnsupportedVersion(version));
    }
    let frame_count = cur.u32()?;
    let dim = cur.u32()?;
    let fps = cur.f32()?;
    let flags = cur.u32()?;
    let metadata_len = cur.u32()?;
    let raw = cur.take(metadata_len as usize)?;
    let metadata = if raw.is_empty() {
        Metadata::default()
    } else {
        serde_json::from_slice(raw).map_err(|e| EfsError::InvalidMetadata(e.to_string()))?
    };
    Ok(SignalsHeader { version, frame_count, dim, fps, flags, metadata, metadata_len })
}

/// Decodes only the header and metadata.
pub fn decode_header(bytes: &[u8]) -> Result<SignalsHeader> {
    parse_header(&mut Cursor { bytes, pos: 0 })
}

/// Decodes and validates a complete file image.
pub fn decode_signals<T: Scalar>(bytes: &[u8]) -> Result<(SignalSet<T>, ValidationReport)> {
    let mut cur = Cursor { bytes, pos: 0 };
    let header = parse_header(&mut cur)?;
    let expected = cur.pos + header.payload_len();
    if bytes.len() < expected {
        return Err(EfsError::TruncatedPayload { expected, actual: bytes.len() });
    }
    if bytes.len() > expected {
        return Err(EfsError::TrailingBytes(bytes.len() - expected));
    }
    let n = header.frame_count as usize;
    let d = header.dim as usize;
    let floats = |len: usize, cur: &mut Cursor<'_>| -> Result<Vec<T>> {
        Ok(cur
            .take(4 * len)?
            .chunks_exact(4)
            .map(|c| T::lit(f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64))
            .collect())
    };
    let embeddings = floats(n * d, &mut cur)?;
    let relevance = floats(n, &mut cur)?;
    validate_signals(RawSignals {
        frame_count: n,
        dim: d,
        embeddings,
        relevance,
        fps: header.fps as f64,
        metadata: header.metadata,
    })
}

/// Encodes a signal set. Values are stored as `f32`.
pub fn encode_signals<T: Scalar>(signals: &SignalSet<T>) -> Result<Vec<u8>> {
    let to_u32 = |v: usize, what: &str| {
        u32::try_from(v).map_err(|_| EfsError::DimensionMismatch(format!("{what} {v} exceeds u32")))
    };
    let meta = serde_json::to_vec(signals.metadata()).map_err(|e| EfsError::InvalidMetadata(e.to_string()))?;
    let n = signals.frame_count();
    let d = signals.dim();
    let mut out = Vec::with_capacity(FIXED_HEADER + meta.len() + 4 * (n * d + n));
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&to_u32(n, "frame count")?.to_le_bytes());
    out.extend_from_slice(&to_u32(d, "dimension")?.to_le_bytes());
    out.extend_from_slice(&(signals.fps() as f32).to_le_bytes());
    out.extend_from_slice(&FLAG_PRENORMALIZED.to_le_bytes());
    out.extend_from_slice(&to_u32(meta.len(), "metadata length")?.to_le_bytes());
    out.extend_from_slice(&meta);
    for v in signals.embeddings().iter().chain(signals.relevance()) {
        out.extend_from_slice(&v.as_f32().to_le_bytes());
    }
    Ok(out)
}

pub fn read_signals<T: Scalar>(path: impl AsRef<Path>) -> Result<(SignalSet<T>, ValidationReport)> {
    decode_signals(&fs::read(path)?)
}

pub fn write_signals<T: Scalar>(signals: &SignalSet<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_signals(signals)?)?;
    Ok(())
}

pub fn read_header(path: impl AsRef<Path>) -> Result<SignalsHeader> {
    decode_header(&fs::read(path)?)
}
