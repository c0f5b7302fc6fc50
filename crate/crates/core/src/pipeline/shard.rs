//! Binary container for feature sequences.
//!
//! Layout (all integers little-endian): magic `AISQ`, u16 version, u32
//! sequence count, then per sequence u32 length, u32 true length, u8 label,
//! u32 mmsi hash and `length * 9` f32 values. A CRC32 over every preceding
//! byte closes the file.

use std::fs;
use std::path::Path;

use super::{ClassLabel, FeatureSequence, PipelineError, NUM_FEATURES};

pub const SHARD_MAGIC: [u8; 4] = *b"AISQ";
pub const SHARD_VERSION: u16 = 1;

const HEADER_LEN: usize = 4 + 2 + 4;
const SEQ_HEADER_LEN: usize = 4 + 4 + 1 + 4;

/// 32-bit FNV-1a over the little-endian bytes of the mmsi.
pub fn mmsi_hash(mmsi: u32) -> u32 {
    mmsi.to_le_bytes()
        .iter()
        .fold(0x811c_9dc5u32, |h, &b| (h ^ u32::from(b)).wrapping_mul(0x0100_0193))
}

pub fn encode_shard(sequences: &[FeatureSequence]) -> Vec<u8> {
    let payload: usize = sequences
        .iter()
        .map(|s| SEQ_HEADER_LEN + 4 * s.values.len())
        .sum();
    let mut out = Vec::with_capacity(HEADER_LEN + payload + 4);
    out.extend_from_slice(&SHARD_MAGIC);
    out.extend_from_slice(&SHARD_VERSION.to_le_bytes());
    out.extend_from_slice(&(sequences.len() as u32).to_le_bytes());
    for s in sequences {
        debug_assert_eq!(s.values.len(), s.seq_len as usize * NUM_FEATURES);
        out.extend_from_slice(&s.seq_len.to_le_bytes());
        out.extend_from_slice(&s.true_length.to_le_bytes());
        out.push(s.label.index() as u8);
        out.extend_from_slice(&s.mmsi_hash.to_le_bytes());
        for v in &s.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], PipelineError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| PipelineError::CorruptShard("record extends past end of payload".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, PipelineError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

/// Trailing CRC32 of an encoded shard, if the buffer is long enough to hold one.
pub(crate) fn stored_crc(bytes: &[u8]) -> Option<u32> {
    let n = bytes.len();
    (n >= 4).then(|| u32::from_le_bytes(bytes[n - 4..].try_into().unwrap()))
}

pub fn decode_shard(bytes: &[u8]) -> Result<Vec<FeatureSequence>, PipelineError> {
    if bytes.len() >= 4 && bytes[..4] != SHARD_MAGIC {
        return Err(PipelineError::MagicMismatch {
            expected: String::from_utf8_lossy(&SHARD_MAGIC).into_owned(),
            found: String::from_utf8_lossy(&bytes[..4]).into_owned(),
        });
    }
    if bytes.len() >= 6 {
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != SHARD_VERSION {
            return Err(PipelineError::VersionMismatch {
                expected: SHARD_VERSION,
                found: version,
            });
        }
    }
    if bytes.len() < HEADER_LEN + 4 {
        return Err(PipelineError::ChecksumMismatch(format!(
            "shard truncated to {} bytes",
            bytes.len()
        )));
    }
    let body = &bytes[..bytes.len() - 4];
    let stored = stored_crc(bytes).unwrap();
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(PipelineError::ChecksumMismatch(format!(
            "stored {stored:08x}, computed {computed:08x}"
        )));
    }
    let mut cur = Cursor { buf: body, pos: 6 };
    let count = cur.u32()? as usize;
    let mut out = Vec::with_capacity(count.min(body.len() / SEQ_HEADER_LEN));
    for _ in 0..count {
        let seq_len = cur.u32()?;
        let true_length = cur.u32()?;
        let label_byte = cur.take(1)?[0];
        let label = ClassLabel::from_index(usize::from(label_byte))
            .ok_or_else(|| PipelineError::CorruptShard(format!("label {label_byte} out of range")))?;
        if true_length > seq_len {
            return Err(PipelineError::CorruptShard(format!(
                "true length {true_length} exceeds sequence length {seq_len}"
            )));
        }
        let mmsi_hash = cur.u32()?;
        let n = (seq_len as usize)
            .checked_mul(NUM_FEATURES * 4)
            .ok_or_else(|| PipelineError::CorruptShard("sequence length overflows".into()))?;
        let values = cur
            .take(n)?
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        out.push(FeatureSequence {
            seq_len,
            true_length,
            label,
            mmsi_hash,
            values,
            source: None,
        });
    }
    if cur.pos != body.len() {
        return Err(PipelineError::CorruptShard(format!(
            "{} trailing bytes after {count} sequences",
            body.len() - cur.pos
        )));
    }
    Ok(out)
}

/// Write a shard and return its CRC32.
pub fn write_shard(sequences: &[FeatureSequence], path: impl AsRef<Path>) -> Result<u32, PipelineError> {
    let path = path.as_ref();
    let bytes = encode_shard(sequences);
    fs::write(path, &bytes).map_err(|e| PipelineError::io(path, e))?;
    Ok(stored_crc(&bytes).unwrap())
}

pub fn read_shard(path: impl AsRef<Path>) -> Result<Vec<FeatureSequence>, PipelineError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    decode_shard(&bytes)
}
