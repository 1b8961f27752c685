//! Deterministic, splittable random streams.
//!
//! Every stream is a PCG-XSH-RR 64/32 generator seeded the same way as the
//! reference `pcg32_srandom_r(initstate, initseq)`: the root seed is the
//! initial state and the stream id selects the increment. Conversions to
//! reals and bounded integers use fixed algorithms so that any port of this
//! library reproduces the same datasets bit for bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const MULTIPLIER: u64 = 6_364_136_223_846_793_005;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RngError {
    #[error("invalid range: lo ({lo}) must be < hi ({hi})")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("invalid range: cannot draw an index below 0")]
    EmptyIndexRange,
}

/// Root seed of a dataset or experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}

/// One independent PCG32 stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    state: u64,
    inc: u64,
    stream_id: u64,
}

/// Derives the stream labelled `stream_id` from `root`.
pub fn derive_stream(root: Seed, stream_id: u64) -> RngStream {
    let mut s = RngStream {
        state: 0,
        inc: (stream_id << 1) | 1,
        stream_id,
    };
    s.step();
    s.state = s.state.wrapping_add(root.0);
    s.step();
    s
}

impl RngStream {
    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    #[inline]
    fn step(&mut self) {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(self.inc);
    }

    /// Next raw 32-bit output.
    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        let old = self.state;
        self.step();
        let xorshifted = (((old >> 18) ^ old) >> 27) as u32;
        let rot = (old >> 59) as u32;
        xorshifted.rotate_right(rot)
    }

    /// Next 64-bit draw: the first 32-bit output is the high word.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let hi = self.next_u32() as u64;
        let lo = self.next_u32() as u64;
        (hi << 32) | lo
    }

    /// Uniform real in `[lo, hi)` from the top 53 bits of one 64-bit draw.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn draw_uniform(&mut self, lo: f64, hi: f64) -> Result<f64, RngError> {
        // also rejects NaN bounds
        if !(lo < hi) {
            return Err(RngError::InvalidRange { lo, hi });
        }
        Ok(self.uniform_unchecked(lo, hi))
    }

    #[inline]
    pub(crate) fn uniform_unchecked(&mut self, lo: f64, hi: f64) -> f64 {
        let unit = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let v = lo + (hi - lo) * unit;
        // (hi - lo) * unit can round up to hi for wide ranges.
        if v < hi {
            v
        } else {
            lo.max(next_down(hi))
        }
    }

    /// Unbiased index in `[0, n)` using Lemire's bounded rejection on 64-bit draws.
    pub fn draw_index(&mut self, n: usize) -> Result<usize, RngError> {
        if n == 0 {
            return Err(RngError::EmptyIndexRange);
        }
        Ok(self.index_unchecked(n))
    }

    #[inline]
    pub(crate) fn index_unchecked(&mut self, n: usize) -> usize {
        let range = n as u64;
        let mut m = (self.next_u64() as u128) * (range as u128);
        let mut low = m as u64;
        if low < range {
            let threshold = range.wrapping_neg() % range;
            while low < threshold {
                m = (self.next_u64() as u128) * (range as u128);
                low = m as u64;
            }
        }
        (m >> 64) as usize
    }

    /// Fair coin.
    pub fn coin(&mut self) -> bool {
        self.index_unchecked(2) == 0
    }

    /// `k` distinct values from `0..n`, in draw order (partial Fisher-Yates).
    pub fn sample_distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "cannot draw {k} distinct values from {n}");
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.index_unchecked(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }

    /// Uniform random permutation of `0..n` (Fisher-Yates, front to back).
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        self.sample_distinct(n, n)
    }
}

fn next_down(x: f64) -> f64 {
    if x > 0.0 {
        f64::from_bits(x.to_bits() - 1)
    } else if x == 0.0 {
        -f64::from_bits(1)
    } else {
        f64::from_bits(x.to_bits() + 1)
    }
}

/// SplitMix64 finalizer; a bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream label for sample `index` of split `split` of task `task`.
///
/// Packs the three coordinates into disjoint bit ranges, then mixes them.
pub fn sample_stream_id(task: u8, split: u8, index: u64) -> u64 {
    debug_assert!(index < 1 << 48);
    mix64(((task as u64) << 56) | ((split as u64) << 48) | (index & ((1 << 48) - 1)))
}
