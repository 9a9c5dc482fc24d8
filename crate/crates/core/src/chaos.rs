//! Fixed-point skew tent map (STM) keystream generators.
//!
//! A basic generator iterates the skew tent map
//!
//! ```text
//!            ⎧ x / γ              x ∈ [0, γ]
//!   f(x) =  ⎨
//!            ⎩ (1 - x) / (1 - γ)  x ∈ (γ, 1)
//! ```
//!
//! on a 64-bit binary fraction. After every iteration the 8 least significant
//! bits of the state fed back into the map are XORed with the 8 least
//! significant bits of a 61-bit maximal-length LFSR, which keeps the finite
//! precision orbit from collapsing into short cycles. The output of one
//! iteration is the 16 least significant bits of the map value, taken before
//! the perturbation.
//!
//! Three configurations are built from it: the 16-bit [`BasicGenerator`], the
//! 64-bit [`KeystreamBank64`] (four independently keyed basic generators) and
//! the 1-bit [`SyncGenerator`].

use thiserror::Error;

/// Errors raised when loading generator parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ChaosError {
    #[error("control parameter gamma must be nonzero")]
    ZeroGamma,
    #[error("LFSR state must be nonzero")]
    ZeroLfsrState,
    #[error("LFSR state {0:#x} does not fit in 61 bits")]
    LfsrStateTooWide(u64),
}

/// An unsigned 64-bit binary fraction: `raw / 2^64`, always in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fraction64(u64);

impl Fraction64 {
    pub const ZERO: Fraction64 = Fraction64(0);
    pub const HALF: Fraction64 = Fraction64(1 << 63);

    pub const fn from_raw(raw: u64) -> Self {
        Fraction64(raw)
    }

    pub const fn raw(self) -> u64 {
        self.0
    }

    /// Lossy conversion, for diagnostics only.
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 18_446_744_073_709_551_616.0
    }
}

/// Applies one iteration of the skew tent map.
///
/// Uses exact 128-bit integer division truncated toward zero. The boundary
/// `x = gamma` belongs to the first branch; its exact image 1.0 is not
/// representable and saturates to `2^64 - 1`.
pub fn stm_step(x: Fraction64, gamma: Fraction64) -> Result<Fraction64, ChaosError> {
    if gamma.0 == 0 {
        return Err(ChaosError::ZeroGamma);
    }
    Ok(stm_step_nonzero(x, gamma))
}

#[inline]
fn stm_step_nonzero(x: Fraction64, gamma: Fraction64) -> Fraction64 {
    debug_assert!(gamma.0 != 0);
    let x = x.0 as u128;
    let g = gamma.0 as u128;
    if x <= g {
        let q = (x << 64) / g;
        Fraction64(q.min(u64::MAX as u128) as u64)
    } else {
        // x > g >= 1, so 2^64 - x < 2^64 - g and the quotient is below 2^64.
        let num = (1u128 << 64) - x;
        let den = (1u128 << 64) - g;
        Fraction64(((num << 64) / den) as u64)
    }
}

const LFSR_MASK: u64 = (1 << 61) - 1;

/// State of the 61-bit Fibonacci LFSR with taps at bits {60, 59, 45, 44}
/// (polynomial `x^61 + x^60 + x^46 + x^45 + 1`). Never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LfsrState61(u64);

impl LfsrState61 {
    pub const BITS: u32 = 61;

    pub fn new(raw: u64) -> Result<Self, ChaosError> {
        if raw == 0 {
            Err(ChaosError::ZeroLfsrState)
        } else if raw > LFSR_MASK {
            Err(ChaosError::LfsrStateTooWide(raw))
        } else {
            Ok(LfsrState61(raw))
        }
    }

    pub const fn raw(self) -> u64 {
        self.0
    }

    /// Shifts once toward the most significant bit, feeding the XOR of the
    /// taps into bit 0.
    #[inline]
    pub fn step(self) -> Self {
        let s = self.0;
        let feedback = ((s >> 60) ^ (s >> 59) ^ (s >> 45) ^ (s >> 44)) & 1;
        LfsrState61(((s << 1) | feedback) & LFSR_MASK)
    }
}

/// Steps a raw LFSR word. Rejects the absorbing all-zero state.
pub fn lfsr_step(raw: u64) -> Result<u64, ChaosError> {
    LfsrState61::new(raw).map(|s| s.step().raw())
}

/// The 189-bit key of one basic generator: `gamma` (64 bits), `x0` (64 bits)
/// and the LFSR seed `y0` (61 bits).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorKey {
    gamma: Fraction64,
    x0: Fraction64,
    y0: LfsrState61,
}

impl GeneratorKey {
    pub const BITS: u32 = 64 + 64 + LfsrState61::BITS;

    /// Builds a key from raw words. `x0 = 0` is accepted since the LFSR
    /// perturbation moves the orbit off the fixed point.
    pub fn new(gamma: u64, x0: u64, y0: u64) -> Result<Self, ChaosError> {
        if gamma == 0 {
            return Err(ChaosError::ZeroGamma);
        }
        Ok(GeneratorKey {
            gamma: Fraction64(gamma),
            x0: Fraction64(x0),
            y0: LfsrState61::new(y0)?,
        })
    }

    pub fn gamma(&self) -> Fraction64 {
        self.gamma
    }

    pub fn x0(&self) -> Fraction64 {
        self.x0
    }

    pub fn y0(&self) -> LfsrState61 {
        self.y0
    }
}

/// STM cell plus perturbing LFSR. Produces 16 bits per iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicGenerator {
    /// Perturbed state fed back into the map.
    x: Fraction64,
    lfsr: LfsrState61,
    gamma: Fraction64,
}

impl BasicGenerator {
    pub fn new(key: &GeneratorKey) -> Self {
        BasicGenerator {
            x: key.x0,
            lfsr: key.y0,
            gamma: key.gamma,
        }
    }

    /// Advances one iteration and returns the unperturbed map value `x_i`.
    #[inline]
    pub fn step(&mut self) -> Fraction64 {
        let xi = stm_step_nonzero(self.x, self.gamma);
        self.lfsr = self.lfsr.step();
        self.x = Fraction64(xi.0 ^ (self.lfsr.0 & 0xff));
        xi
    }

    /// Advances one iteration and returns the 16 low bits of `x_i`.
    #[inline]
    pub fn next16(&mut self) -> u16 {
        self.step().0 as u16
    }

    /// The state that will be fed to the map on the next step.
    pub fn feedback_state(&self) -> Fraction64 {
        self.x
    }

    pub fn lfsr(&self) -> LfsrState61 {
        self.lfsr
    }
}

/// Four basic generators whose 16-bit outputs are concatenated into one
/// 64-bit word, lane 0 in bits `[15:0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeystreamBank64 {
    gens: [BasicGenerator; 4],
}

impl KeystreamBank64 {
    pub fn new(keys: &[GeneratorKey; 4]) -> Self {
        KeystreamBank64 {
            gens: [
                BasicGenerator::new(&keys[0]),
                BasicGenerator::new(&keys[1]),
                BasicGenerator::new(&keys[2]),
                BasicGenerator::new(&keys[3]),
            ],
        }
    }

    #[inline]
    pub fn next_word(&mut self) -> u64 {
        let mut word = 0u64;
        for (lane, g) in self.gens.iter_mut().enumerate() {
            word |= (g.next16() as u64) << (16 * lane);
        }
        word
    }

    pub fn lanes(&self) -> &[BasicGenerator; 4] {
        &self.gens
    }
}

/// One basic generator whose output is the least significant bit of `x_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncGenerator {
    inner: BasicGenerator,
}

impl SyncGenerator {
    pub fn new(key: &GeneratorKey) -> Self {
        SyncGenerator {
            inner: BasicGenerator::new(key),
        }
    }

    #[inline]
    pub fn next_bit(&mut self) -> bool {
        self.inner.step().0 & 1 == 1
    }
}
