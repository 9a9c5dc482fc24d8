//! Block cipher operation and the encryption management state machines.
//!
//! Each 66-bit block is ciphered by XORing its payload with a 64-bit
//! keystream word and its mapped header bit (`01` → 0, `10` → 1) with a
//! 1-bit keystream, so ciphered headers stay legal.
//!
//! Encryption is switched on and off in-band. The transmitter replaces an
//! all-idle block with a Cipher_ON block (sent in clear) and starts ciphering
//! with the next block. To stop, it replaces an idle block with a Cipher_OFF
//! block, ciphers it like any other, and stops afterwards. The receiver mirrors
//! this: a clear Cipher_ON turns deciphering on from the next block, a
//! deciphered Cipher_OFF turns it off, and both are replaced by idle blocks.
//!
//! Pipeline placement:
//!
//! ```text
//! TX: encoder -> insert/capture -> cipher -> scrambler
//! RX: descrambler -> cipher -> capture/extract -> decoder
//! ```

use thiserror::Error;

use crate::chaos::{GeneratorKey, KeystreamBank64, SyncGenerator};
use crate::codec::{
    is_all_idle, is_cipher_off, is_cipher_on, make_cipher_off_block, make_cipher_on_block,
    make_idle_block, Block66, SYNC_CONTROL, SYNC_DATA,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CipherError {
    #[error("illegal sync header {0:#04b}")]
    InvalidHeader(u8),
    #[error("request not allowed in mode {0:?}")]
    WrongMode(Mode),
}

/// Maps a legal sync header to one bit: `0b01` → 0, `0b10` → 1.
pub fn header_map(sync: u8) -> Result<bool, CipherError> {
    match sync {
        SYNC_DATA => Ok(false),
        SYNC_CONTROL => Ok(true),
        other => Err(CipherError::InvalidHeader(other)),
    }
}

pub fn header_unmap(bit: bool) -> u8 {
    if bit {
        SYNC_CONTROL
    } else {
        SYNC_DATA
    }
}

/// Ciphers (or deciphers; the operation is an involution) one block.
#[inline]
pub fn cipher_block(b: &Block66, ks_data: u64, ks_sync: bool) -> Result<Block66, CipherError> {
    let h = header_map(b.sync)?;
    Ok(Block66::new(header_unmap(h ^ ks_sync), b.payload ^ ks_data))
}

/// Keys for one direction: four bank generators and the sync generator,
/// 945 bits in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CipherKey {
    pub bank_keys: [GeneratorKey; 4],
    pub sync_key: GeneratorKey,
}

impl CipherKey {
    pub const BITS: u32 = 5 * GeneratorKey::BITS;

    pub fn new(bank_keys: [GeneratorKey; 4], sync_key: GeneratorKey) -> Self {
        CipherKey {
            bank_keys,
            sync_key,
        }
    }
}

/// The data and sync keystream generators of one direction, stepped together.
#[derive(Debug, Clone)]
pub struct Keystream {
    bank: KeystreamBank64,
    sync: SyncGenerator,
    steps: u64,
}

impl Keystream {
    pub fn new(key: &CipherKey) -> Self {
        Keystream {
            bank: KeystreamBank64::new(&key.bank_keys),
            sync: SyncGenerator::new(&key.sync_key),
            steps: 0,
        }
    }

    /// Returns the next (data word, sync bit) pair.
    #[inline]
    pub fn next_pair(&mut self) -> (u64, bool) {
        self.steps += 1;
        (self.bank.next_word(), self.sync.next_bit())
    }

    pub fn skip(&mut self, n: u64) {
        for _ in 0..n {
            self.next_pair();
        }
    }

    /// Ciphers one block with the next keystream pair. The keystream does not
    /// advance if the header is illegal.
    #[inline]
    pub fn apply(&mut self, b: &Block66) -> Result<Block66, CipherError> {
        header_map(b.sync)?;
        let (data, sync) = self.next_pair();
        cipher_block(b, data, sync)
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Bypass,
    /// Waiting for an idle block to replace with Cipher_ON.
    ArmedOn,
    Ciphering,
    /// Still ciphering; waiting for an idle block to replace with Cipher_OFF.
    ArmedOff,
}

/// Management and cipher state for one direction of one node.
///
/// Generators are never reset: re-enabling continues the keystream where it
/// stopped.
#[derive(Debug, Clone)]
pub struct SecDirectionState {
    mode: Mode,
    keystream: Keystream,
    pending_insert: Option<Block66>,
}

impl SecDirectionState {
    pub fn new(key: &CipherKey) -> Self {
        SecDirectionState {
            mode: Mode::Bypass,
            keystream: Keystream::new(key),
            pending_insert: None,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn pending_insert(&self) -> Option<Block66> {
        self.pending_insert
    }

    /// Number of keystream steps consumed so far.
    pub fn keystream_positions(&self) -> u64 {
        self.keystream.steps()
    }

    pub fn request_cipher_on(&mut self) -> Result<(), CipherError> {
        if self.mode != Mode::Bypass {
            return Err(CipherError::WrongMode(self.mode));
        }
        self.mode = Mode::ArmedOn;
        self.pending_insert = Some(make_cipher_on_block());
        Ok(())
    }

    pub fn request_cipher_off(&mut self) -> Result<(), CipherError> {
        if self.mode != Mode::Ciphering {
            return Err(CipherError::WrongMode(self.mode));
        }
        self.mode = Mode::ArmedOff;
        self.pending_insert = Some(make_cipher_off_block());
        Ok(())
    }

    /// Transmit path: insertion, capture and cipher for one encoder block.
    pub fn tx_process(&mut self, b: &Block66) -> Result<Block66, CipherError> {
        header_map(b.sync)?;
        match self.mode {
            Mode::Bypass => Ok(*b),
            Mode::ArmedOn => {
                if is_all_idle(b) {
                    let on = self
                        .pending_insert
                        .take()
                        .unwrap_or_else(make_cipher_on_block);
                    self.mode = Mode::Ciphering;
                    Ok(on)
                } else {
                    Ok(*b)
                }
            }
            Mode::Ciphering => self.keystream.apply(b),
            Mode::ArmedOff => {
                if is_all_idle(b) {
                    let off = self
                        .pending_insert
                        .take()
                        .unwrap_or_else(make_cipher_off_block);
                    let out = self.keystream.apply(&off)?;
                    self.mode = Mode::Bypass;
                    Ok(out)
                } else {
                    self.keystream.apply(b)
                }
            }
        }
    }

    /// Receive path: decipher, capture and extraction for one descrambled
    /// block.
    pub fn rx_process(&mut self, b: &Block66) -> Result<Block66, CipherError> {
        header_map(b.sync)?;
        match self.mode {
            Mode::Ciphering | Mode::ArmedOff => {
                let clear = self.keystream.apply(b)?;
                if is_cipher_off(&clear) {
                    self.mode = Mode::Bypass;
                    Ok(make_idle_block())
                } else {
                    Ok(clear)
                }
            }
            Mode::Bypass | Mode::ArmedOn => {
                if is_cipher_on(b) {
                    self.mode = Mode::Ciphering;
                    Ok(make_idle_block())
                } else {
                    Ok(*b)
                }
            }
        }
    }
}
