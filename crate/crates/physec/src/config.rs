//! Simulation config files.
//!
//! One `key = value` per line, `#` starts a comment. Keys:
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `frame_length` | 1024 | bytes per frame, header through FCS |
//! | `frame_count` | 1000 | frames per direction |
//! | `utilization` | 0.5 | preamble and frame octets over all octets |
//! | `seed` | 0 | payload seed (the reverse direction uses `seed + 1`) |
//! | `tx_key`, `rx_key` | required | key files of the forward direction |
//! | `reverse_tx_key`, `reverse_rx_key` | none | enable the reverse direction |
//! | `cipher_on`, `cipher_off` | `0`, empty | comma-separated TX block indices |
//! | `error_positions` | empty | wire bit indices flipped in the forward channel |
//! | `reverse_error_positions` | empty | same for the reverse channel |
//! | `warmup_blocks` | 128 | idle blocks before the first frame |
//! | `min_blocks` | 0 | pad with idles up to this many blocks |
//! | `scrambler_seed` | 0 | initial scrambler and descrambler state |
//!
//! Key file paths are relative to the config file's directory.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use physec_core::link::{ScheduleAction, ScheduleEvent};
use physec_core::{CipherKey, FrameSpec, SimConfig};
use thiserror::Error;

use crate::keyfile::{read_key, KeyFileError};

#[derive(Debug, Error)]
pub enum SimFileError {
    #[error("cannot read config {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("config: `{key}`: invalid value `{value}`")]
    Value { key: String, value: String },
    #[error("config: missing `{0}`")]
    Missing(&'static str),
    #[error("config: `{0}` needs `{1}`")]
    Pair(&'static str, &'static str),
    #[error("config: {key}")]
    Key { key: String, source: KeyFileError },
    #[error("config: invalid link settings")]
    Link(#[from] physec_core::ConfigError),
}

const KEYS: [&str; 15] = [
    "frame_length",
    "frame_count",
    "utilization",
    "seed",
    "tx_key",
    "rx_key",
    "reverse_tx_key",
    "reverse_rx_key",
    "cipher_on",
    "cipher_off",
    "error_positions",
    "reverse_error_positions",
    "warmup_blocks",
    "min_blocks",
    "scrambler_seed",
];

#[derive(Debug, Clone, PartialEq)]
pub struct DuplexConfig {
    pub forward: SimConfig,
    pub reverse: Option<SimConfig>,
}

struct Fields<'a>(HashMap<&'a str, &'a str>);

impl<'a> Fields<'a> {
    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, SimFileError> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| SimFileError::Value {
                key: key.to_string(),
                value: v.to_string(),
            }),
        }
    }

    fn list(&self, key: &str, default: &[u64]) -> Result<Vec<u64>, SimFileError> {
        match self.0.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse().map_err(|_| SimFileError::Value {
                        key: key.to_string(),
                        value: s.to_string(),
                    })
                })
                .collect(),
        }
    }

    fn key(&self, name: &str, base: &Path) -> Result<Option<CipherKey>, SimFileError> {
        self.0
            .get(name)
            .map(|p| {
                read_key(&base.join(p)).map_err(|source| SimFileError::Key {
                    key: name.to_string(),
                    source,
                })
            })
            .transpose()
    }
}

/// Parses config text; key files are resolved against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<DuplexConfig, SimFileError> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (k, v) = l.split_once('=').ok_or(SimFileError::Syntax { line })?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(SimFileError::UnknownKey {
                line,
                key: k.to_string(),
            });
        }
        if map.insert(k, v).is_some() {
            return Err(SimFileError::Duplicate {
                line,
                key: k.to_string(),
            });
        }
    }
    let f = Fields(map);

    let frames = FrameSpec {
        frame_length: f.get("frame_length", 1024usize)?,
        frame_count: f.get("frame_count", 1000u64)?,
        target_utilization: f.get("utilization", 0.5f64)?,
        payload_seed: f.get("seed", 0u64)?,
    };
    frames.validate()?;
    let mut schedule: Vec<ScheduleEvent> = f
        .list("cipher_on", &[0])?
        .into_iter()
        .map(|block| ScheduleEvent {
            block,
            action: ScheduleAction::CipherOn,
        })
        .collect();
    schedule.extend(
        f.list("cipher_off", &[])?
            .into_iter()
            .map(|block| ScheduleEvent {
                block,
                action: ScheduleAction::CipherOff,
            }),
    );
    schedule.sort_by_key(|e| e.block);

    let tx_key = f
        .key("tx_key", base_dir)?
        .ok_or(SimFileError::Missing("tx_key"))?;
    let rx_key = f
        .key("rx_key", base_dir)?
        .ok_or(SimFileError::Missing("rx_key"))?;
    let forward = SimConfig {
        frames,
        tx_key,
        rx_key,
        schedule,
        error_positions: f.list("error_positions", &[])?,
        warmup_blocks: f.get("warmup_blocks", SimConfig::DEFAULT_WARMUP_BLOCKS)?,
        min_blocks: f.get("min_blocks", 0u64)?,
        scrambler_seed: f.get("scrambler_seed", 0u64)?,
    };

    let reverse = match (
        f.key("reverse_tx_key", base_dir)?,
        f.key("reverse_rx_key", base_dir)?,
    ) {
        (Some(tx_key), Some(rx_key)) => Some(SimConfig {
            frames: FrameSpec {
                payload_seed: frames.payload_seed.wrapping_add(1),
                ..frames
            },
            tx_key,
            rx_key,
            error_positions: f.list("reverse_error_positions", &[])?,
            ..forward.clone()
        }),
        (None, None) => None,
        (Some(_), None) => return Err(SimFileError::Pair("reverse_tx_key", "reverse_rx_key")),
        (None, Some(_)) => return Err(SimFileError::Pair("reverse_rx_key", "reverse_tx_key")),
    };
    Ok(DuplexConfig { forward, reverse })
}

pub fn read_config(path: &Path) -> Result<DuplexConfig, SimFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| SimFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}
