use std::fmt::Write as _;
use std::path::Path;

use physec_core::{CipherKey, GeneratorKey};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KeyFileError {
    #[error("cannot read key file {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("key file: expected 5 key lines, found {0}")]
    LineCount(usize),
    #[error("key file line {line} ({slot}): expected 3 fields `gamma x0 y0`, found {found}")]
    FieldCount {
        line: usize,
        slot: &'static str,
        found: usize,
    },
    #[error("key file line {line} ({slot}): {field}: {reason}")]
    Field {
        line: usize,
        slot: &'static str,
        field: &'static str,
        reason: String,
    },
}

const SLOTS: [&str; 5] = [
    "bank lane 0",
    "bank lane 1",
    "bank lane 2",
    "bank lane 3",
    "sync",
];
const FIELDS: [&str; 3] = ["gamma", "x0", "y0"];

pub fn parse_key(text: &str) -> Result<CipherKey, KeyFileError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if lines.len() != 5 {
        return Err(KeyFileError::LineCount(lines.len()));
    }
    let mut keys = Vec::with_capacity(5);
    for (slot, (line, l)) in SLOTS.iter().zip(lines) {
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(KeyFileError::FieldCount {
                line,
                slot,
                found: parts.len(),
            });
        }
        let err = |field, reason: String| KeyFileError::Field {
            line,
            slot,
            field,
            reason,
        };
        let mut v = [0u64; 3];
        for (i, p) in parts.iter().enumerate() {
            let hex = p.strip_prefix("0x").unwrap_or(p);
            if hex.is_empty() || hex.len() > 16 {
                return Err(err(FIELDS[i], format!("`{p}` is not 1 to 16 hex digits")));
            }
            v[i] =
                u64::from_str_radix(hex, 16).map_err(|e| err(FIELDS[i], format!("`{p}`: {e}")))?;
        }
        let key = GeneratorKey::new(v[0], v[1], v[2]).map_err(|e| {
            let field = if v[0] == 0 { "gamma" } else { "y0" };
            err(field, e.to_string())
        })?;
        keys.push(key);
    }
    Ok(CipherKey::new(
        [keys[0], keys[1], keys[2], keys[3]],
        keys[4],
    ))
}

pub fn read_key(path: &Path) -> Result<CipherKey, KeyFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| KeyFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_key(&text)
}

pub fn format_key(key: &CipherKey) -> String {
    let mut s = String::new();
    for (slot, k) in SLOTS
        .iter()
        .zip(key.bank_keys.iter().chain([&key.sync_key]))
    {
        writeln!(
            s,
            "{:016x} {:016x} {:016x}  # {slot}",
            k.gamma().raw(),
            k.x0().raw(),
            k.y0().raw()
        )
        .unwrap();
    }
    s
}
