//! Deterministic loopback link: Ethernet frame generation, XGMII framing, both
//! PCS pipelines, a bit-serial channel with error injection, 66-bit block lock
//! and deframing with FCS checking.
//!
//! One direction is modeled as
//!
//! ```text
//! FrameSource -> TxPipeline -> Channel -> RxPipeline
//! ```
//!
//! and [`run_simulation`] drives all four in lockstep. The stages only talk
//! through FIFO order, so callers may run them on separate threads.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::cipher::{CipherKey, Mode, SecDirectionState};
use crate::codec::{decode_block, encode_group, Block66, CharGroup8, Control, TxChar};
use crate::scrambler::{Descrambler, Scrambler, ScramblerState};

/// Ethernet FCS (reflected CRC-32, polynomial 0x04C11DB7).
pub fn crc32(bytes: &[u8]) -> u32 {
    let mut h = crc32fast::Hasher::new();
    h.update(bytes);
    h.finalize()
}

pub const MIN_FRAME_LENGTH: usize = 64;
pub const MIN_IFG: usize = 12;
/// Preamble and SFD octets, including the START character in lane 0.
pub const PREAMBLE_LEN: usize = 8;
pub const HEADER_LEN: usize = 14;
pub const FCS_LEN: usize = 4;
pub const DEST_ADDR: [u8; 6] = [0x02, 0, 0, 0, 0, 0x01];
pub const SRC_ADDR: [u8; 6] = [0x02, 0, 0, 0, 0, 0x02];
pub const ETHER_TYPE: u16 = 0x88B5;
pub const BLOCK_BITS: u32 = 66;
pub const LOCK_HEADERS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ConfigError {
    #[error("frame length {0} is below the 64-byte minimum")]
    FrameTooShort(usize),
    #[error("utilization {0} is outside (0, 1]")]
    UtilizationOutOfRange(f64),
    #[error("utilization {requested} needs less than the 12-octet minimum gap (max {max})")]
    UtilizationUnrealizable { requested: f64, max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSpec {
    /// Frame length in bytes, header through FCS.
    pub frame_length: usize,
    pub frame_count: u64,
    /// Preamble plus frame octets over all octets.
    pub target_utilization: f64,
    pub payload_seed: u64,
}

impl FrameSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.frame_length < MIN_FRAME_LENGTH {
            return Err(ConfigError::FrameTooShort(self.frame_length));
        }
        let u = self.target_utilization;
        if !(u > 0.0 && u <= 1.0) {
            return Err(ConfigError::UtilizationOutOfRange(u));
        }
        let max = self.max_utilization();
        if u > max {
            return Err(ConfigError::UtilizationUnrealizable { requested: u, max });
        }
        Ok(())
    }

    /// Highest utilization reachable with the minimum gap and a lane-0 start.
    pub fn max_utilization(&self) -> f64 {
        let busy = PREAMBLE_LEN + self.frame_length;
        busy as f64 / min_slot(self.frame_length) as f64
    }
}

fn min_slot(frame_length: usize) -> usize {
    (PREAMBLE_LEN + frame_length + MIN_IFG).div_ceil(8) * 8
}

/// Produces the byte content (header, payload, FCS) of successive frames.
#[derive(Debug, Clone)]
pub struct FrameGenerator {
    rng: ChaCha8Rng,
    frame_length: usize,
    index: u64,
}

impl FrameGenerator {
    pub fn new(frame_length: usize, payload_seed: u64) -> Self {
        assert!(frame_length >= MIN_FRAME_LENGTH);
        FrameGenerator {
            rng: ChaCha8Rng::seed_from_u64(payload_seed),
            frame_length,
            index: 0,
        }
    }

    pub fn next_frame(&mut self) -> Vec<u8> {
        let body = self.frame_length - FCS_LEN;
        let mut f = Vec::with_capacity(self.frame_length);
        f.extend_from_slice(&DEST_ADDR);
        f.extend_from_slice(&SRC_ADDR);
        f.extend_from_slice(&ETHER_TYPE.to_be_bytes());
        f.extend_from_slice(&(self.index as u32).to_le_bytes());
        f.resize(body, 0);
        self.rng.fill_bytes(&mut f[HEADER_LEN + 4..body]);
        let fcs = crc32(&f);
        f.extend_from_slice(&fcs.to_le_bytes());
        self.index += 1;
        f
    }
}

/// Frames a frame onto XGMII lanes: START and preamble, the frame, TERMINATE,
/// then idles up to `slot` octets (a multiple of 8).
pub fn frame_to_groups(frame: &[u8], slot: usize, out: &mut Vec<CharGroup8>) {
    debug_assert!(slot.is_multiple_of(8) && slot >= PREAMBLE_LEN + frame.len() + MIN_IFG);
    let mut chars = Vec::with_capacity(slot);
    chars.push(TxChar::START);
    chars.extend(core::iter::repeat_n(TxChar::data(0x55), 6));
    chars.push(TxChar::data(0xD5));
    chars.extend(frame.iter().map(|&b| TxChar::data(b)));
    chars.push(TxChar::TERMINATE);
    chars.resize(slot, TxChar::IDLE);
    for c in chars.chunks_exact(8) {
        let mut g = [TxChar::IDLE; 8];
        g.copy_from_slice(c);
        out.push(CharGroup8(g));
    }
}

/// Character groups for the whole simulated trace: warm-up idles, the
/// frames at the target utilization, then idles up to `min_groups`.
#[derive(Debug, Clone)]
pub struct FrameSource {
    spec: FrameSpec,
    frames: FrameGenerator,
    warmup: u64,
    min_groups: u64,
    emitted: u64,
    frames_done: u64,
    octets_done: u64,
    pending: VecDeque<CharGroup8>,
}

impl FrameSource {
    pub fn new(spec: FrameSpec, warmup_groups: u64, min_groups: u64) -> Result<Self, ConfigError> {
        spec.validate()?;
        Ok(FrameSource {
            spec,
            frames: FrameGenerator::new(spec.frame_length, spec.payload_seed),
            warmup: warmup_groups,
            min_groups,
            emitted: 0,
            frames_done: 0,
            octets_done: 0,
            pending: VecDeque::new(),
        })
    }

    pub fn frames_emitted(&self) -> u64 {
        self.frames_done
    }

    /// Octets of the frame portion emitted so far (slots, gaps included).
    pub fn frame_octets(&self) -> u64 {
        self.octets_done
    }

    fn next_slot(&self) -> usize {
        // cumulative target, rounded to whole groups
        let busy = (PREAMBLE_LEN + self.spec.frame_length) as f64;
        let n = (self.frames_done + 1) as f64;
        let target = libm::round(n * busy / self.spec.target_utilization / 8.0) as u64 * 8;
        let slot = target.saturating_sub(self.octets_done) as usize;
        slot.max(min_slot(self.spec.frame_length))
    }
}

impl Iterator for FrameSource {
    type Item = CharGroup8;

    fn next(&mut self) -> Option<CharGroup8> {
        if self.emitted < self.warmup {
            self.emitted += 1;
            return Some(CharGroup8::idle());
        }
        if self.pending.is_empty() && self.frames_done < self.spec.frame_count {
            let frame = self.frames.next_frame();
            let slot = self.next_slot();
            let mut groups = Vec::with_capacity(slot / 8);
            frame_to_groups(&frame, slot, &mut groups);
            self.pending.extend(groups);
            self.frames_done += 1;
            self.octets_done += slot as u64;
        }
        if let Some(g) = self.pending.pop_front() {
            self.emitted += 1;
            return Some(g);
        }
        if self.emitted < self.min_groups {
            self.emitted += 1;
            return Some(CharGroup8::idle());
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScheduleAction {
    CipherOn,
    CipherOff,
}

/// A management request issued just before the TX block with this index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScheduleEvent {
    pub block: u64,
    pub action: ScheduleAction,
}

/// Wire-side counters of a transmit pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TxStats {
    pub blocks_sent: u64,
    pub encode_errors: u64,
    pub header_ones: u64,
    pub payload_ones: u64,
    pub rejected_requests: u64,
}

/// Encoder, management/cipher and scrambler of one transmitter.
#[derive(Debug, Clone)]
pub struct TxPipeline {
    sec: SecDirectionState,
    scrambler: Scrambler,
    schedule: Vec<ScheduleEvent>,
    next_event: usize,
    stats: TxStats,
}

impl TxPipeline {
    pub fn new(key: &CipherKey, schedule: &[ScheduleEvent], scrambler: ScramblerState) -> Self {
        let mut schedule = schedule.to_vec();
        schedule.sort_by_key(|e| e.block);
        TxPipeline {
            sec: SecDirectionState::new(key),
            scrambler: Scrambler::new(scrambler),
            schedule,
            next_event: 0,
            stats: TxStats::default(),
        }
    }

    pub fn process(&mut self, g: &CharGroup8) -> Block66 {
        let index = self.stats.blocks_sent;
        while let Some(ev) = self.schedule.get(self.next_event) {
            if ev.block > index {
                break;
            }
            let r = match ev.action {
                ScheduleAction::CipherOn => self.sec.request_cipher_on(),
                ScheduleAction::CipherOff => self.sec.request_cipher_off(),
            };
            if r.is_err() {
                self.stats.rejected_requests += 1;
            }
            self.next_event += 1;
        }
        let block = encode_group(g).unwrap_or_else(|e| {
            self.stats.encode_errors += 1;
            e.recovery()
        });
        // encoder output always carries a legal header
        let ciphered = self.sec.tx_process(&block).unwrap_or(block);
        let wire = Block66::new(ciphered.sync, self.scrambler.scramble(ciphered.payload));
        self.stats.blocks_sent += 1;
        self.stats.header_ones += (wire.sync == 0b10) as u64;
        self.stats.payload_ones += wire.payload.count_ones() as u64;
        wire
    }

    pub fn stats(&self) -> TxStats {
        self.stats
    }

    pub fn mode(&self) -> Mode {
        self.sec.mode()
    }

    pub fn keystream_positions(&self) -> u64 {
        self.sec.keystream_positions()
    }
}

/// Serializes a block, header bit 0 first.
#[inline]
pub fn block_to_bits(b: &Block66) -> u128 {
    (b.sync & 0b11) as u128 | ((b.payload as u128) << 2)
}

#[inline]
pub fn bits_to_block(bits: u128) -> Block66 {
    Block66::new((bits & 0b11) as u8, (bits >> 2) as u64)
}

/// Lossless bit FIFO that flips the bits at the listed wire indices.
#[derive(Debug, Clone, Default)]
pub struct Channel {
    errors: Vec<u64>,
    next_error: usize,
    position: u64,
}

impl Channel {
    pub fn new(error_positions: &[u64]) -> Self {
        let mut errors = error_positions.to_vec();
        errors.sort_unstable();
        errors.dedup();
        Channel {
            errors,
            next_error: 0,
            position: 0,
        }
    }

    /// Passes one block worth of bits, returning them with any injected flips.
    pub fn transmit(&mut self, b: &Block66) -> u128 {
        let mut bits = block_to_bits(b);
        let end = self.position + BLOCK_BITS as u64;
        while let Some(&p) = self.errors.get(self.next_error) {
            if p >= end {
                break;
            }
            bits ^= 1u128 << (p - self.position);
            self.next_error += 1;
        }
        self.position = end;
        bits
    }

    pub fn position(&self) -> u64 {
        self.position
    }
}

const MASK66: u128 = (1u128 << 66) - 1;

/// Finds and tracks 66-bit block boundaries.
///
/// While hunting, every bit offset is a candidate; the first offset to show
/// 64 consecutive legal headers wins and its 64 blocks are released. While
/// locked, an illegal header drops lock and hunting resumes one bit later.
#[derive(Debug, Clone)]
pub struct BlockLock {
    locked: bool,
    hist: Vec<bool>,
    hist_base: u64,
    scan: u64,
    good: [u32; BLOCK_BITS as usize],
    acc: u128,
    acc_bits: u32,
    next_start: u64,
    received: u64,
    invalid_headers: u64,
    lock_acquired_at: Option<u64>,
    locks: u64,
}

impl Default for BlockLock {
    fn default() -> Self {
        Self::new()
    }
}

impl BlockLock {
    pub fn new() -> Self {
        BlockLock {
            locked: false,
            hist: Vec::new(),
            hist_base: 0,
            scan: 0,
            good: [0; BLOCK_BITS as usize],
            acc: 0,
            acc_bits: 0,
            next_start: 0,
            received: 0,
            invalid_headers: 0,
            lock_acquired_at: None,
            locks: 0,
        }
    }

    pub fn is_locked(&self) -> bool {
        self.locked
    }

    pub fn invalid_headers(&self) -> u64 {
        self.invalid_headers
    }

    /// Bit count at which lock was first acquired.
    pub fn lock_acquired_at(&self) -> Option<u64> {
        self.lock_acquired_at
    }

    /// Number of times lock was acquired.
    pub fn locks(&self) -> u64 {
        self.locks
    }

    /// Feeds the low `n` bits of `bits` (first bit in bit 0, `n <= 66`),
    /// appending aligned blocks to `out`.
    pub fn push(&mut self, bits: u128, n: u32, out: &mut Vec<Block66>) {
        assert!(n <= BLOCK_BITS);
        let mut rest = bits & ((1u128 << n) - 1);
        let mut left = n;
        while left > 0 {
            let m = left.min(33);
            let piece = rest & ((1u128 << m) - 1);
            rest >>= m;
            left -= m;
            self.received += m as u64;
            if self.locked {
                self.push_locked(piece, m, out);
            } else {
                self.hist.extend((0..m).map(|i| (piece >> i) & 1 == 1));
                self.hunt(out);
            }
        }
    }

    fn push_locked(&mut self, piece: u128, m: u32, out: &mut Vec<Block66>) {
        self.acc |= piece << self.acc_bits;
        self.acc_bits += m;
        while self.acc_bits >= BLOCK_BITS {
            let b = bits_to_block(self.acc & MASK66);
            if b.has_legal_header() {
                out.push(b);
                self.acc >>= BLOCK_BITS;
                self.acc_bits -= BLOCK_BITS;
                self.next_start += BLOCK_BITS as u64;
            } else {
                self.invalid_headers += 1;
                self.locked = false;
                self.good = [0; BLOCK_BITS as usize];
                self.hist.clear();
                self.hist
                    .extend((0..self.acc_bits).map(|i| (self.acc >> i) & 1 == 1));
                self.hist_base = self.next_start;
                self.scan = self.next_start + 1;
                self.acc = 0;
                self.acc_bits = 0;
                self.hunt(out);
                return;
            }
        }
    }

    fn hunt(&mut self, out: &mut Vec<Block66>) {
        let end = self.hist_base + self.hist.len() as u64;
        while self.scan + 2 <= end {
            let i = (self.scan - self.hist_base) as usize;
            let legal = self.hist[i] != self.hist[i + 1];
            let slot = &mut self.good[(self.scan % BLOCK_BITS as u64) as usize];
            *slot = if legal { *slot + 1 } else { 0 };
            if *slot == LOCK_HEADERS {
                let first = self.scan - (LOCK_HEADERS as u64 - 1) * BLOCK_BITS as u64;
                self.acquire(first, out);
                return;
            }
            self.scan += 1;
        }
        // keep enough history to release 64 blocks behind the scan point
        let keep_from = self
            .scan
            .saturating_sub(LOCK_HEADERS as u64 * BLOCK_BITS as u64)
            .max(self.hist_base);
        let drop = (keep_from - self.hist_base) as usize;
        if drop > 4096 {
            self.hist.drain(..drop);
            self.hist_base = keep_from;
        }
    }

    fn acquire(&mut self, first: u64, out: &mut Vec<Block66>) {
        self.locked = true;
        self.locks += 1;
        self.lock_acquired_at
            .get_or_insert(self.scan + BLOCK_BITS as u64);
        let end = self.hist_base + self.hist.len() as u64;
        let mut k = first;
        let bits_at = |hist: &[bool], from: usize, n: usize| -> u128 {
            hist[from..from + n]
                .iter()
                .enumerate()
                .fold(0u128, |a, (j, &b)| a | ((b as u128) << j))
        };
        while k + BLOCK_BITS as u64 <= end {
            let from = (k - self.hist_base) as usize;
            out.push(bits_to_block(bits_at(
                &self.hist,
                from,
                BLOCK_BITS as usize,
            )));
            k += BLOCK_BITS as u64;
        }
        let from = (k - self.hist_base) as usize;
        let n = self.hist.len() - from;
        self.acc = bits_at(&self.hist, from, n);
        self.acc_bits = n as u32;
        self.next_start = k;
        self.hist.clear();
        self.hist_base = k;
    }
}

/// Receiver-side counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RxStats {
    pub blocks_received: u64,
    pub frames_received: u64,
    pub crc_errors: u64,
    pub frames_aborted: u64,
    pub decode_errors: u64,
    pub invalid_headers: u64,
    pub lock_acquired_at: Option<u64>,
}

#[derive(Debug, Clone)]
enum DeframeState {
    Idle,
    Preamble(usize),
    Data(Vec<u8>),
}

/// Reassembles frames from XGMII characters and checks their FCS.
#[derive(Debug, Clone)]
pub struct Deframer {
    state: DeframeState,
    frames_received: u64,
    crc_errors: u64,
    frames_aborted: u64,
    capture: Option<Vec<Vec<u8>>>,
}

impl Deframer {
    pub fn new(capture: bool) -> Self {
        Deframer {
            state: DeframeState::Idle,
            frames_received: 0,
            crc_errors: 0,
            frames_aborted: 0,
            capture: capture.then(Vec::new),
        }
    }

    pub fn push_group(&mut self, g: &CharGroup8) {
        for (lane, c) in g.lanes().iter().enumerate() {
            self.push_char(lane, *c);
        }
    }

    fn push_char(&mut self, lane: usize, c: TxChar) {
        let state = core::mem::replace(&mut self.state, DeframeState::Idle);
        self.state = match (state, c.as_data()) {
            (DeframeState::Idle, _) => self.idle(lane, c),
            (DeframeState::Preamble(n), Some(0x55)) => DeframeState::Preamble(n + 1),
            (DeframeState::Preamble(n), Some(0xD5)) if n >= 1 => DeframeState::Data(Vec::new()),
            (DeframeState::Data(mut f), Some(b)) => {
                f.push(b);
                DeframeState::Data(f)
            }
            (DeframeState::Data(f), None) if c.as_control() == Some(Control::Terminate) => {
                self.finish(f);
                DeframeState::Idle
            }
            _ => {
                self.frames_aborted += 1;
                self.idle(lane, c)
            }
        };
    }

    fn idle(&self, lane: usize, c: TxChar) -> DeframeState {
        if c.as_control() == Some(Control::Start) && (lane == 0 || lane == 4) {
            DeframeState::Preamble(0)
        } else {
            DeframeState::Idle
        }
    }

    fn finish(&mut self, f: Vec<u8>) {
        let ok = f.len() >= FCS_LEN && {
            let (body, fcs) = f.split_at(f.len() - FCS_LEN);
            crc32(body).to_le_bytes() == fcs
        };
        if ok {
            self.frames_received += 1;
            if let Some(c) = &mut self.capture {
                c.push(f);
            }
        } else {
            self.crc_errors += 1;
        }
    }

    pub fn take_captured(&mut self) -> Vec<Vec<u8>> {
        self.capture
            .as_mut()
            .map(core::mem::take)
            .unwrap_or_default()
    }
}

/// Block lock, descrambler, management/cipher, decoder and deframer of one
/// receiver.
#[derive(Debug, Clone)]
pub struct RxPipeline {
    lock: BlockLock,
    descrambler: Descrambler,
    sec: SecDirectionState,
    deframer: Deframer,
    aligned: Vec<Block66>,
    blocks_received: u64,
    decode_errors: u64,
}

impl RxPipeline {
    pub fn new(key: &CipherKey, scrambler: ScramblerState, capture: bool) -> Self {
        RxPipeline {
            lock: BlockLock::new(),
            descrambler: Descrambler::new(scrambler),
            sec: SecDirectionState::new(key),
            deframer: Deframer::new(capture),
            aligned: Vec::with_capacity(LOCK_HEADERS as usize + 2),
            blocks_received: 0,
            decode_errors: 0,
        }
    }

    /// Feeds up to 66 wire bits, first bit in bit 0.
    pub fn receive(&mut self, bits: u128, n: u32) {
        let mut aligned = core::mem::take(&mut self.aligned);
        self.lock.push(bits, n, &mut aligned);
        for b in aligned.drain(..) {
            self.process_block(&b);
        }
        self.aligned = aligned;
    }

    fn process_block(&mut self, wire: &Block66) {
        self.blocks_received += 1;
        let b = Block66::new(wire.sync, self.descrambler.descramble(wire.payload));
        // block lock only releases legal headers
        let clear = self.sec.rx_process(&b).unwrap_or(b);
        let g = decode_block(&clear).unwrap_or_else(|e| {
            self.decode_errors += 1;
            e.recovery()
        });
        self.deframer.push_group(&g);
    }

    pub fn stats(&self) -> RxStats {
        RxStats {
            blocks_received: self.blocks_received,
            frames_received: self.deframer.frames_received,
            crc_errors: self.deframer.crc_errors,
            frames_aborted: self.deframer.frames_aborted,
            decode_errors: self.decode_errors,
            invalid_headers: self.lock.invalid_headers(),
            lock_acquired_at: self.lock.lock_acquired_at(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.sec.mode()
    }

    pub fn keystream_positions(&self) -> u64 {
        self.sec.keystream_positions()
    }

    pub fn take_captured(&mut self) -> Vec<Vec<u8>> {
        self.deframer.take_captured()
    }
}

/// One direction of a simulated link.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub frames: FrameSpec,
    pub tx_key: CipherKey,
    pub rx_key: CipherKey,
    pub schedule: Vec<ScheduleEvent>,
    pub error_positions: Vec<u64>,
    /// Idle blocks sent before the first frame.
    pub warmup_blocks: u64,
    /// Idle blocks are appended until at least this many blocks are sent.
    pub min_blocks: u64,
    /// Initial state of both scrambler and descrambler.
    pub scrambler_seed: u64,
}

impl SimConfig {
    pub const DEFAULT_WARMUP_BLOCKS: u64 = 128;

    /// Encryption switched on at block 0, clean channel, default warm-up.
    pub fn new(frames: FrameSpec, tx_key: CipherKey, rx_key: CipherKey) -> Self {
        SimConfig {
            frames,
            tx_key,
            rx_key,
            schedule: vec![ScheduleEvent {
                block: 0,
                action: ScheduleAction::CipherOn,
            }],
            error_positions: Vec::new(),
            warmup_blocks: Self::DEFAULT_WARMUP_BLOCKS,
            min_blocks: 0,
            scrambler_seed: 0,
        }
    }

    pub fn source(&self) -> Result<FrameSource, ConfigError> {
        FrameSource::new(self.frames, self.warmup_blocks, self.min_blocks)
    }

    pub fn tx_pipeline(&self) -> TxPipeline {
        TxPipeline::new(
            &self.tx_key,
            &self.schedule,
            ScramblerState::new(self.scrambler_seed),
        )
    }

    pub fn channel(&self) -> Channel {
        Channel::new(&self.error_positions)
    }

    pub fn rx_pipeline(&self, capture: bool) -> RxPipeline {
        RxPipeline::new(
            &self.rx_key,
            ScramblerState::new(self.scrambler_seed),
            capture,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkReport {
    pub frames_sent: u64,
    pub frames_received: u64,
    pub crc_errors: u64,
    pub frames_aborted: u64,
    pub invalid_headers: u64,
    pub decode_errors: u64,
    pub encode_errors: u64,
    pub blocks_sent: u64,
    pub blocks_received: u64,
    /// Fraction of wire blocks with a `0b10` header.
    pub header_one_fraction: f64,
    pub wire_payload_ones: u64,
    pub wire_payload_bits: u64,
    pub lock_acquired_at: Option<u64>,
    pub tx_keystream_steps: u64,
    pub rx_keystream_steps: u64,
    pub rejected_requests: u64,
    pub tx_mode: Mode,
    pub rx_mode: Mode,
    /// Preamble plus frame octets over all octets of the frame portion.
    pub measured_utilization: f64,
}

impl LinkReport {
    pub fn collect(
        source: &FrameSource,
        spec: &FrameSpec,
        tx: &TxPipeline,
        rx: &RxPipeline,
    ) -> Self {
        let t = tx.stats();
        let r = rx.stats();
        let busy = source.frames_emitted() * (PREAMBLE_LEN + spec.frame_length) as u64;
        LinkReport {
            frames_sent: source.frames_emitted(),
            frames_received: r.frames_received,
            crc_errors: r.crc_errors,
            frames_aborted: r.frames_aborted,
            invalid_headers: r.invalid_headers,
            decode_errors: r.decode_errors,
            encode_errors: t.encode_errors,
            blocks_sent: t.blocks_sent,
            blocks_received: r.blocks_received,
            header_one_fraction: if t.blocks_sent == 0 {
                0.0
            } else {
                t.header_ones as f64 / t.blocks_sent as f64
            },
            wire_payload_ones: t.payload_ones,
            wire_payload_bits: t.blocks_sent * 64,
            lock_acquired_at: r.lock_acquired_at,
            tx_keystream_steps: tx.keystream_positions(),
            rx_keystream_steps: rx.keystream_positions(),
            rejected_requests: t.rejected_requests,
            tx_mode: tx.mode(),
            rx_mode: rx.mode(),
            measured_utilization: if source.frame_octets() == 0 {
                0.0
            } else {
                busy as f64 / source.frame_octets() as f64
            },
        }
    }
}

/// Runs one direction single-threaded.
pub fn run_simulation(config: &SimConfig) -> Result<LinkReport, ConfigError> {
    run(config, false).map(|(r, _)| r)
}

/// Like [`run_simulation`], also returning every frame that passed the FCS
/// check, in arrival order.
pub fn run_simulation_with_capture(
    config: &SimConfig,
) -> Result<(LinkReport, Vec<Vec<u8>>), ConfigError> {
    run(config, true)
}

fn run(config: &SimConfig, capture: bool) -> Result<(LinkReport, Vec<Vec<u8>>), ConfigError> {
    let mut source = config.source()?;
    let mut tx = config.tx_pipeline();
    let mut channel = config.channel();
    let mut rx = config.rx_pipeline(capture);
    for g in source.by_ref() {
        let wire = tx.process(&g);
        rx.receive(channel.transmit(&wire), BLOCK_BITS);
    }
    let report = LinkReport::collect(&source, &config.frames, &tx, &rx);
    Ok((report, rx.take_captured()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::GeneratorKey;
    use crate::codec::make_idle_block;

    fn key(seed: u64) -> CipherKey {
        let k = |i: u64| {
            let s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i);
            GeneratorKey::new(s | 1, s.rotate_left(17), (s % ((1 << 61) - 1)) + 1).unwrap()
        };
        CipherKey::new([k(1), k(2), k(3), k(4)], k(5))
    }

    fn spec(frame_length: usize, frame_count: u64, u: f64) -> FrameSpec {
        FrameSpec {
            frame_length,
            frame_count,
            target_utilization: u,
            payload_seed: 7,
        }
    }

    #[test]
    fn crc_check_values() {
        assert_eq!(crc32(b"123456789"), 0xCBF4_3926);
        assert_eq!(crc32(b""), 0);
    }

    #[test]
    fn frame_layout() {
        let mut g = FrameGenerator::new(64, 1);
        let f = g.next_frame();
        assert_eq!(f.len(), 64);
        assert_eq!(&f[..6], &DEST_ADDR);
        assert_eq!(&f[12..14], &[0x88, 0xB5]);
        assert_eq!(&f[14..18], &[0, 0, 0, 0]);
        assert_eq!(crc32(&f[..60]).to_le_bytes(), f[60..]);
        assert_eq!(&g.next_frame()[14..18], &[1, 0, 0, 0]);
    }

    #[test]
    fn one_small_frame_structure() {
        let groups: Vec<_> = FrameSource::new(spec(64, 1, 0.5), 0, 0).unwrap().collect();
        let starts = groups
            .iter()
            .filter(|g| g.0.contains(&TxChar::START))
            .count();
        let terms = groups
            .iter()
            .filter(|g| g.0.contains(&TxChar::TERMINATE))
            .count();
        assert_eq!((starts, terms), (1, 1));
        assert_eq!(groups[0].0[0], TxChar::START);
        // 72 busy octets at 50% -> 144 octets
        assert_eq!(groups.len(), 18);
    }

    #[test]
    fn utilization_validation() {
        assert_eq!(
            spec(63, 1, 0.5).validate(),
            Err(ConfigError::FrameTooShort(63))
        );
        assert!(matches!(
            spec(64, 1, 0.0).validate(),
            Err(ConfigError::UtilizationOutOfRange(_))
        ));
        assert!(matches!(
            spec(64, 1, 1.5).validate(),
            Err(ConfigError::UtilizationOutOfRange(_))
        ));
        assert!(matches!(
            spec(1024, 1, 0.99).validate(),
            Err(ConfigError::UtilizationUnrealizable { .. })
        ));
        assert!(spec(1024, 1, 0.98).validate().is_ok());
        assert!((spec(1024, 1, 0.5).max_utilization() - 1032.0 / 1048.0).abs() < 1e-12);
    }

    #[test]
    fn aligned_stream_locks_after_64_blocks() {
        let mut lock = BlockLock::new();
        let mut out = Vec::new();
        let mut s = Scrambler::default();
        for i in 0..63 {
            let b = Block66::new(0b10, s.scramble(0x1e ^ i));
            lock.push(block_to_bits(&b), 66, &mut out);
        }
        assert!(!lock.is_locked());
        assert!(out.is_empty());
        let b = Block66::new(0b01, s.scramble(99));
        lock.push(block_to_bits(&b), 66, &mut out);
        assert!(lock.is_locked());
        assert_eq!(lock.lock_acquired_at(), Some(64 * 66));
        assert_eq!(out.len(), 64);
        assert_eq!(out[63], b);
    }

    #[test]
    fn clean_link_no_encryption_is_transparent() {
        let mut cfg = SimConfig::new(spec(128, 20, 0.6), key(1), key(1));
        cfg.schedule.clear();
        let (r, frames) = run_simulation_with_capture(&cfg).unwrap();
        assert_eq!(r.frames_sent, 20);
        assert_eq!(r.frames_received, 20);
        assert_eq!(r.crc_errors + r.frames_aborted + r.decode_errors, 0);
        assert_eq!(r.blocks_received, r.blocks_sent);
        assert_eq!(r.tx_keystream_steps, 0);
        let mut g = FrameGenerator::new(128, 7);
        for f in &frames {
            assert_eq!(f, &g.next_frame());
        }
    }

    #[test]
    fn encrypted_link_matched_keys() {
        let cfg = SimConfig::new(spec(256, 50, 0.9), key(2), key(2));
        let r = run_simulation(&cfg).unwrap();
        assert_eq!(r.frames_received, 50);
        assert_eq!(r.crc_errors, 0);
        assert_eq!(r.tx_mode, Mode::Ciphering);
        assert_eq!(r.rx_mode, Mode::Ciphering);
        assert_eq!(r.tx_keystream_steps, r.rx_keystream_steps);
        assert_eq!(r.tx_keystream_steps, r.blocks_sent - 1);
    }

    #[test]
    fn encrypted_link_mismatched_keys() {
        let cfg = SimConfig::new(spec(256, 50, 0.9), key(2), key(3));
        let r = run_simulation(&cfg).unwrap();
        assert_eq!(r.frames_received, 0);
        assert!(r.decode_errors > 0);
    }

    #[test]
    fn cipher_off_restores_clear_traffic() {
        let mut cfg = SimConfig::new(spec(128, 40, 0.5), key(4), key(4));
        cfg.schedule.push(ScheduleEvent {
            block: 400,
            action: ScheduleAction::CipherOff,
        });
        cfg.schedule.push(ScheduleEvent {
            block: 500,
            action: ScheduleAction::CipherOn,
        });
        cfg.schedule.push(ScheduleEvent {
            block: 500,
            action: ScheduleAction::CipherOn,
        });
        let r = run_simulation(&cfg).unwrap();
        assert_eq!(r.frames_received, 40);
        assert_eq!(r.rejected_requests, 1);
        assert_eq!(r.tx_keystream_steps, r.rx_keystream_steps);
        assert_eq!(r.rx_mode, Mode::Ciphering);
    }

    #[test]
    fn channel_flips_requested_bits() {
        let mut ch = Channel::new(&[0, 67, 67]);
        let b = make_idle_block();
        assert_eq!(ch.transmit(&b), block_to_bits(&b) ^ 1);
        assert_eq!(ch.transmit(&b), block_to_bits(&b) ^ 2);
        assert_eq!(ch.transmit(&b), block_to_bits(&b));
        assert_eq!(ch.position(), 198);
    }

    #[test]
    fn header_error_breaks_and_reacquires_lock() {
        let mut cfg = SimConfig::new(spec(128, 30, 0.3), key(5), key(5));
        cfg.schedule.clear();
        cfg.error_positions = vec![200 * 66];
        let r = run_simulation(&cfg).unwrap();
        assert_eq!(r.invalid_headers, 1);
        assert!(r.blocks_received < r.blocks_sent);
        assert!(r.frames_received >= 27, "{r:?}");
    }
}
