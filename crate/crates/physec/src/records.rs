use std::path::Path;

use physec_core::Block66;
use thiserror::Error;

pub const RECORD_LEN: usize = 9;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("cannot access {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("block file length {0} is not a multiple of 9")]
    Length(usize),
    #[error("record {index}: byte 0 is {byte:#04x}, only bits 1:0 may be set")]
    Reserved { index: usize, byte: u8 },
}

pub fn decode_records(bytes: &[u8]) -> Result<Vec<Block66>, RecordError> {
    if !bytes.len().is_multiple_of(RECORD_LEN) {
        return Err(RecordError::Length(bytes.len()));
    }
    bytes
        .chunks_exact(RECORD_LEN)
        .enumerate()
        .map(|(index, r)| {
            if r[0] & !0b11 != 0 {
                return Err(RecordError::Reserved { index, byte: r[0] });
            }
            let payload = u64::from_le_bytes(r[1..].try_into().unwrap());
            Ok(Block66::new(r[0], payload))
        })
        .collect()
}

pub fn encode_records(blocks: &[Block66]) -> Vec<u8> {
    let mut out = Vec::with_capacity(blocks.len() * RECORD_LEN);
    for b in blocks {
        out.push(b.sync & 0b11);
        out.extend_from_slice(&b.payload.to_le_bytes());
    }
    out
}

pub fn read_records(path: &Path) -> Result<Vec<Block66>, RecordError> {
    let bytes = std::fs::read(path).map_err(|source| RecordError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_records(&bytes)
}

pub fn write_records(path: &Path, blocks: &[Block66]) -> Result<(), RecordError> {
    std::fs::write(path, encode_records(blocks)).map_err(|source| RecordError::Io {
        path: path.display().to_string(),
        source,
    })
}
