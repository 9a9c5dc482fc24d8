//! File formats, simulation driver and benchmarks around `physec-core`.
//!
//! Formats:
//!
//! - key file: five lines `gamma x0 y0` in hex (bank lanes 0 to 3, then the
//!   sync generator); `#` starts a comment.
//! - block records: 9 bytes per block, byte 0 holds the sync header in bits
//!   1:0, bytes 1..9 the payload little-endian.
//! - packed bits: bit 0 of byte 0 first.
//! - simulation config: `key = value` lines, see [`config`].

pub mod bench;
pub mod config;
pub mod duplex;
pub mod keyfile;
pub mod records;
pub mod report;

pub use bench::{bench_throughput, BenchReport};
pub use config::{parse_config, DuplexConfig, SimFileError};
pub use duplex::{run_duplex, DuplexReport};
pub use keyfile::{format_key, parse_key, read_key, KeyFileError};
pub use records::{read_records, write_records, RecordError};
pub use report::format_report;
