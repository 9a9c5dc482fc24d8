//! Self-synchronizing `G(x) = 1 + x^39 + x^58` payload scrambler.
//!
//! Bit-serial definition, payload bit 0 first:
//!
//! ```text
//! out_t = in_t ^ state[38] ^ state[57]
//! ```
//!
//! where `state[k]` is the register bit shifted in `k + 1` steps ago. The
//! scrambler shifts in its output, the descrambler the received bit. Sync
//! headers never pass through here.

const STATE_BITS: u32 = 58;
const STATE_MASK: u64 = (1 << STATE_BITS) - 1;

/// 58-bit shift register. Bit `k` holds the bit shifted in `k + 1` steps ago.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ScramblerState(u64);

impl ScramblerState {
    pub const fn new(raw: u64) -> Self {
        ScramblerState(raw & STATE_MASK)
    }

    pub const fn raw(self) -> u64 {
        self.0
    }

    /// History bits laid out oldest first: bit `i` = `state[57 - i]`.
    #[inline]
    fn oldest_first(self) -> u128 {
        (self.0.reverse_bits() >> (64 - STATE_BITS)) as u128
    }

    /// Inverse of [`oldest_first`] applied to the last 58 bits of an
    /// extended history whose bit 58 + 63 is the newest.
    #[inline]
    fn from_extended(ext: u128) -> Self {
        let newest = (ext >> 64) as u64;
        ScramblerState(newest.reverse_bits() >> (64 - STATE_BITS))
    }
}

/// Scrambles one payload word.
pub fn scramble64(payload: u64, state: ScramblerState) -> (u64, ScramblerState) {
    // ext bit 58 + t holds output bit t; bits 0..58 hold the history.
    // out_t depends on ext[t + 19] and ext[t], so 39 outputs can be formed
    // before any of them is needed as feedback.
    let mut ext = state.oldest_first();
    let mut out = 0u64;
    let mut t = 0u32;
    while t < 64 {
        let n = (64 - t).min(39);
        let mask = (1u64 << n) - 1;
        let chunk = ((payload >> t) ^ (ext >> (t + 19)) as u64 ^ (ext >> t) as u64) & mask;
        out |= chunk << t;
        ext |= (chunk as u128) << (58 + t);
        t += n;
    }
    (out, ScramblerState::from_extended(ext))
}

/// Descrambles one payload word.
pub fn descramble64(payload: u64, state: ScramblerState) -> (u64, ScramblerState) {
    let ext = state.oldest_first() | ((payload as u128) << 58);
    let out = payload ^ (ext >> 19) as u64 ^ ext as u64;
    (out, ScramblerState::from_extended(ext))
}

/// Owned scrambler for a transmit path.
#[derive(Debug, Clone, Default)]
pub struct Scrambler {
    state: ScramblerState,
}

impl Scrambler {
    pub fn new(state: ScramblerState) -> Self {
        Scrambler { state }
    }

    #[inline]
    pub fn scramble(&mut self, payload: u64) -> u64 {
        let (out, next) = scramble64(payload, self.state);
        self.state = next;
        out
    }

    pub fn state(&self) -> ScramblerState {
        self.state
    }
}

/// Owned descrambler for a receive path.
#[derive(Debug, Clone, Default)]
pub struct Descrambler {
    state: ScramblerState,
}

impl Descrambler {
    pub fn new(state: ScramblerState) -> Self {
        Descrambler { state }
    }

    #[inline]
    pub fn descramble(&mut self, payload: u64) -> u64 {
        let (out, next) = descramble64(payload, self.state);
        self.state = next;
        out
    }

    pub fn state(&self) -> ScramblerState {
        self.state
    }
}
