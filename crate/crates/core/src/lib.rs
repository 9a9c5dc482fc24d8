//! Physical-layer stream encryption for 10GBASE-R style 64b/66b block streams.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure computation:
//!
//! - [`chaos`]: fixed-point skew tent map keystream generators perturbed by a 61-bit LFSR.
//! - [`codec`]: 64b/66b block encoding/decoding and the Cipher_ON/Cipher_OFF ordered sets.
//! - [`scrambler`]: the self-synchronizing `1 + x^39 + x^58` payload scrambler.
//! - [`cipher`]: the per-block cipher operation and the TX/RX management state machines.
//! - [`link`]: frame generation, CRC-32, block lock and a deterministic loopback link.
//! - [`randomness`]: a subset of the SP 800-22 statistical tests.
//!
//! File formats, the command line tool and benchmarks live in the `physec` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod chaos;
pub mod cipher;
pub mod codec;
pub mod link;
pub mod randomness;
pub mod scrambler;

pub use chaos::{
    BasicGenerator, ChaosError, Fraction64, GeneratorKey, KeystreamBank64, LfsrState61,
    SyncGenerator,
};
pub use cipher::{CipherError, CipherKey, Keystream, Mode, SecDirectionState};
pub use codec::{Block66, BlockType, CharGroup8, Control, DecodeError, EncodeError, TxChar};
pub use link::{
    crc32, run_simulation, run_simulation_with_capture, ConfigError, FrameSpec, LinkReport,
    ScheduleAction, ScheduleEvent, SimConfig,
};
pub use randomness::{BitSequence, RandomnessError, TestResult};
pub use scrambler::{Descrambler, Scrambler, ScramblerState};
