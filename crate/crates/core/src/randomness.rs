//! Statistical randomness tests from NIST SP 800-22 Rev. 1a.
//!
//! Implemented: frequency (monobit), frequency within a block, runs, longest
//! run of ones in a block, cumulative sums (forward and backward) and
//! approximate entropy. A sequence passes a test when its p-value is at least
//! [`ALPHA`].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, SQRT_2};

use thiserror::Error;

pub const ALPHA: f64 = 0.01;
pub const BLOCK_FREQUENCY_M: usize = 128;
pub const APPROXIMATE_ENTROPY_M: usize = 10;

/// A sequence of bits stored packed, bit 0 of byte 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitSequence {
    bytes: Vec<u8>,
    len: usize,
}

impl BitSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// All bits of `bytes`, least significant bit of each byte first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        BitSequence {
            bytes: bytes.to_vec(),
            len: bytes.len() * 8,
        }
    }

    /// The first `len` bits of `bytes`.
    pub fn from_bytes_truncated(bytes: &[u8], len: usize) -> Self {
        assert!(len <= bytes.len() * 8);
        let mut bytes = bytes[..len.div_ceil(8)].to_vec();
        if !len.is_multiple_of(8) {
            if let Some(last) = bytes.last_mut() {
                *last &= (1u8 << (len % 8)) - 1;
            }
        }
        BitSequence { bytes, len }
    }

    /// Words in little-endian order, bit 0 of each word first.
    pub fn from_words(words: &[u64]) -> Self {
        let bytes: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
        Self::from_bytes(&bytes)
    }

    /// Parses a string of `'0'`/`'1'`, ignoring anything else.
    pub fn from_ascii(s: &str) -> Self {
        s.chars()
            .filter_map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect()
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 1 << (self.len % 8);
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.bytes[i / 8] >> (i % 8)) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Packed bytes; unused high bits of the last byte are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

impl FromIterator<bool> for BitSequence {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut s = BitSequence::new();
        for b in iter {
            s.push(b);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub name: &'static str,
    pub p_value: f64,
    pub statistic: f64,
    pub passed: bool,
}

impl TestResult {
    fn new(name: &'static str, statistic: f64, p_value: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestResult {
            name,
            p_value,
            statistic,
            passed: p_value >= ALPHA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RandomnessError {
    #[error("{test}: needs at least {required} bits, got {actual}")]
    InsufficientData {
        test: &'static str,
        required: usize,
        actual: usize,
    },
    #[error("{test}: invalid parameter")]
    InvalidParameter { test: &'static str },
}

fn require(test: &'static str, s: &BitSequence, required: usize) -> Result<(), RandomnessError> {
    if s.len() < required {
        Err(RandomnessError::InsufficientData {
            test,
            required,
            actual: s.len(),
        })
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// special functions

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

const MACHEP: f64 = 1.110_223_024_625_156_5e-16;
const MAXLOG: f64 = 709.782_712_893_384;
const BIG: f64 = 4.503_599_627_370_496e15;
const BIGINV: f64 = 2.220_446_049_250_313e-16;

/// Regularized upper incomplete gamma function `Q(a, x)`.
pub fn igamc(a: f64, x: f64) -> f64 {
    if x <= 0.0 || a <= 0.0 {
        return 1.0;
    }
    if x < 1.0 || x < a {
        return 1.0 - igam_series(a, x);
    }
    let ax = a * libm::log(x) - x - libm::lgamma(a);
    if ax < -MAXLOG {
        return 0.0;
    }
    let ax = libm::exp(ax);

    // continued fraction
    let mut y = 1.0 - a;
    let mut z = x + y + 1.0;
    let mut c = 0.0;
    let mut pkm2 = 1.0;
    let mut qkm2 = x;
    let mut pkm1 = x + 1.0;
    let mut qkm1 = z * x;
    let mut ans = pkm1 / qkm1;
    loop {
        c += 1.0;
        y += 1.0;
        z += 2.0;
        let yc = y * c;
        let pk = pkm1 * z - pkm2 * yc;
        let qk = qkm1 * z - qkm2 * yc;
        let t = if qk != 0.0 {
            let r = pk / qk;
            let t = libm::fabs((ans - r) / r);
            ans = r;
            t
        } else {
            1.0
        };
        pkm2 = pkm1;
        pkm1 = pk;
        qkm2 = qkm1;
        qkm1 = qk;
        if libm::fabs(pk) > BIG {
            pkm2 *= BIGINV;
            pkm1 *= BIGINV;
            qkm2 *= BIGINV;
            qkm1 *= BIGINV;
        }
        if t <= MACHEP {
            break;
        }
    }
    ans * ax
}

/// Regularized lower incomplete gamma function `P(a, x)` by power series.
fn igam_series(a: f64, x: f64) -> f64 {
    let ax = a * libm::log(x) - x - libm::lgamma(a);
    if ax < -MAXLOG {
        return 0.0;
    }
    let ax = libm::exp(ax);
    let mut r = a;
    let mut c = 1.0;
    let mut ans = 1.0;
    loop {
        r += 1.0;
        c *= x / r;
        ans += c;
        if c / ans <= MACHEP {
            break;
        }
    }
    ans * ax / a
}

// ---------------------------------------------------------------------------
// tests

const MONOBIT: &str = "monobit";
const BLOCK_FREQUENCY: &str = "block_frequency";
const RUNS: &str = "runs";
const LONGEST_RUN: &str = "longest_run_of_ones";
const CUSUM_FORWARD: &str = "cumulative_sums_forward";
const CUSUM_BACKWARD: &str = "cumulative_sums_backward";
const APPROXIMATE_ENTROPY: &str = "approximate_entropy";

/// Frequency (monobit) test.
pub fn monobit(s: &BitSequence) -> Result<TestResult, RandomnessError> {
    require(MONOBIT, s, 100)?;
    Ok(monobit_from_counts(s.count_ones() as u64, s.len() as u64))
}

/// Monobit test from a ones count, for streams too long to hold in memory.
pub fn monobit_from_counts(ones: u64, n: u64) -> TestResult {
    let sum = 2.0 * ones as f64 - n as f64;
    let s_obs = libm::fabs(sum) / libm::sqrt(n as f64);
    TestResult::new(MONOBIT, s_obs, erfc(s_obs / SQRT_2))
}

/// Frequency test within blocks of `m` bits.
pub fn block_frequency(s: &BitSequence, m: usize) -> Result<TestResult, RandomnessError> {
    if m == 0 {
        return Err(RandomnessError::InvalidParameter {
            test: BLOCK_FREQUENCY,
        });
    }
    require(BLOCK_FREQUENCY, s, 100 * m)?;
    Ok(block_frequency_inner(s, m))
}

fn block_frequency_inner(s: &BitSequence, m: usize) -> TestResult {
    let blocks = s.len() / m;
    let mut chi = 0.0;
    for i in 0..blocks {
        let ones = (i * m..(i + 1) * m).filter(|&j| s.get(j)).count();
        let pi = ones as f64 / m as f64 - 0.5;
        chi += pi * pi;
    }
    chi *= 4.0 * m as f64;
    TestResult::new(BLOCK_FREQUENCY, chi, igamc(blocks as f64 / 2.0, chi / 2.0))
}

/// Runs test.
pub fn runs(s: &BitSequence) -> Result<TestResult, RandomnessError> {
    require(RUNS, s, 100)?;
    Ok(runs_inner(s))
}

fn runs_inner(s: &BitSequence) -> TestResult {
    let n = s.len() as f64;
    let pi = s.count_ones() as f64 / n;
    let tau = 2.0 / libm::sqrt(n);
    if libm::fabs(pi - 0.5) >= tau {
        // frequency prerequisite failed
        return TestResult::new(RUNS, 0.0, 0.0);
    }
    let mut v = 1u64;
    let mut prev = s.get(0);
    for i in 1..s.len() {
        let b = s.get(i);
        if b != prev {
            v += 1;
        }
        prev = b;
    }
    let v = v as f64;
    let num = libm::fabs(v - 2.0 * n * pi * (1.0 - pi));
    let den = 2.0 * libm::sqrt(2.0 * n) * pi * (1.0 - pi);
    TestResult::new(RUNS, v, erfc(num / den))
}

/// Longest run of ones in a block. Block size follows the sequence length:
/// 8 below 6272 bits, 128 below 750 000 bits, 10 000 otherwise.
pub fn longest_run_of_ones(s: &BitSequence) -> Result<TestResult, RandomnessError> {
    require(LONGEST_RUN, s, 128)?;
    let n = s.len();
    // class probabilities of the reference implementation
    let (m, v0, pis): (usize, usize, &[f64]) = if n < 6272 {
        (8, 1, &[0.214_843_75, 0.367_187_5, 0.230_468_75, 0.1875])
    } else if n < 750_000 {
        (
            128,
            4,
            &[
                0.117_403_578_8,
                0.242_955_959,
                0.249_363_483,
                0.175_177_06,
                0.102_701_071,
                0.112_398_847,
            ],
        )
    } else {
        (
            10_000,
            10,
            &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
        )
    };
    let k = pis.len() - 1;
    let blocks = n / m;
    let mut counts = vec![0u64; k + 1];
    for i in 0..blocks {
        let (mut longest, mut run) = (0usize, 0usize);
        for j in i * m..(i + 1) * m {
            if s.get(j) {
                run += 1;
                longest = longest.max(run);
            } else {
                run = 0;
            }
        }
        counts[longest.saturating_sub(v0).min(k)] += 1;
    }
    let nb = blocks as f64;
    let chi: f64 = counts
        .iter()
        .zip(pis)
        .map(|(&c, &p)| {
            let d = c as f64 - nb * p;
            d * d / (nb * p)
        })
        .sum();
    Ok(TestResult::new(
        LONGEST_RUN,
        chi,
        igamc(k as f64 / 2.0, chi / 2.0),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CusumMode {
    Forward,
    Backward,
}

/// Cumulative sums test.
pub fn cumulative_sums(s: &BitSequence, mode: CusumMode) -> Result<TestResult, RandomnessError> {
    let name = match mode {
        CusumMode::Forward => CUSUM_FORWARD,
        CusumMode::Backward => CUSUM_BACKWARD,
    };
    require(name, s, 100)?;
    Ok(cumulative_sums_inner(s, mode, name))
}

fn cumulative_sums_inner(s: &BitSequence, mode: CusumMode, name: &'static str) -> TestResult {
    let n = s.len();
    let step = |i: usize| if s.get(i) { 1i64 } else { -1 };
    let mut sum = 0i64;
    let mut z = 0i64;
    for i in 0..n {
        let idx = match mode {
            CusumMode::Forward => i,
            CusumMode::Backward => n - 1 - i,
        };
        sum += step(idx);
        z = z.max(sum.abs());
    }
    let nf = n as f64;
    let zf = z as f64;
    let sqrt_n = libm::sqrt(nf);

    let mut sum1 = 0.0;
    let lo = libm::floor((-nf / zf + 1.0) / 4.0) as i64;
    let hi = libm::floor((nf / zf - 1.0) / 4.0) as i64;
    for k in lo..=hi {
        let k = k as f64;
        sum1 +=
            normal_cdf((4.0 * k + 1.0) * zf / sqrt_n) - normal_cdf((4.0 * k - 1.0) * zf / sqrt_n);
    }
    let mut sum2 = 0.0;
    let lo = libm::floor((-nf / zf - 3.0) / 4.0) as i64;
    for k in lo..=hi {
        let k = k as f64;
        sum2 +=
            normal_cdf((4.0 * k + 3.0) * zf / sqrt_n) - normal_cdf((4.0 * k + 1.0) * zf / sqrt_n);
    }
    TestResult::new(name, zf, 1.0 - sum1 + sum2)
}

/// Minimum length for approximate entropy with block length `m`:
/// `m < floor(log2 n) - 5`.
pub fn approximate_entropy_min_len(m: usize) -> usize {
    1usize << (m + 6)
}

/// Approximate entropy test with block length `m`.
pub fn approximate_entropy(s: &BitSequence, m: usize) -> Result<TestResult, RandomnessError> {
    if m == 0 || m > 24 {
        return Err(RandomnessError::InvalidParameter {
            test: APPROXIMATE_ENTROPY,
        });
    }
    require(APPROXIMATE_ENTROPY, s, approximate_entropy_min_len(m))?;
    Ok(approximate_entropy_inner(s, m))
}

fn approximate_entropy_inner(s: &BitSequence, m: usize) -> TestResult {
    let n = s.len();
    let phi = |len: usize| -> f64 {
        if len == 0 {
            return 0.0;
        }
        let mask = (1usize << len) - 1;
        let mut counts = vec![0u64; 1 << len];
        // prime the window with the first len-1 bits, wrapping at the end
        let mut w = 0usize;
        for i in 0..len - 1 {
            w = (w << 1) | s.get(i) as usize;
        }
        for i in 0..n {
            let bit = s.get((i + len - 1) % n) as usize;
            w = ((w << 1) | bit) & mask;
            counts[w] += 1;
        }
        let nf = n as f64;
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / nf;
                p * libm::log(p)
            })
            .sum()
    };
    let ap_en = phi(m) - phi(m + 1);
    let chi = 2.0 * n as f64 * (LN_2 - ap_en);
    let a = libm::pow(2.0, m as f64 - 1.0);
    TestResult::new(APPROXIMATE_ENTROPY, chi, igamc(a, chi / 2.0))
}

/// One suite entry: the test name and its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteEntry {
    pub name: &'static str,
    pub outcome: Result<TestResult, RandomnessError>,
}

impl SuiteEntry {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, Ok(r) if r.passed)
    }
}

/// Runs every implemented test with the default parameters.
pub fn run_suite(s: &BitSequence) -> Vec<SuiteEntry> {
    let entry = |name, outcome| SuiteEntry { name, outcome };
    vec![
        entry(MONOBIT, monobit(s)),
        entry(BLOCK_FREQUENCY, block_frequency(s, BLOCK_FREQUENCY_M)),
        entry(RUNS, runs(s)),
        entry(LONGEST_RUN, longest_run_of_ones(s)),
        entry(CUSUM_FORWARD, cumulative_sums(s, CusumMode::Forward)),
        entry(CUSUM_BACKWARD, cumulative_sums(s, CusumMode::Backward)),
        entry(
            APPROXIMATE_ENTROPY,
            approximate_entropy(s, APPROXIMATE_ENTROPY_M),
        ),
    ]
}
