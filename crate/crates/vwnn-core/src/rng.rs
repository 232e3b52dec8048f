//! Seeded, labeled random streams.
//!
//! Every source of randomness in the crate is an `RngStream` constructed from
//! a `(seed, label)` pair. Distinct labels under the same seed give
//! statistically independent streams, so per-layer, per-fold, and per-epoch
//! randomness does not depend on execution order. Sequences are bit-identical
//! across platforms: ChaCha8 keyed by a fixed mixing of the pair, with all
//! float/integer conversions done locally from raw `u64` output.

use crate::error::{Error, Result};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A deterministic random stream identified by `(seed, label)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    label: String,
    rng: ChaCha8Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn derive_key(seed: u64, label: &str) -> [u8; 32] {
    let mut state = seed;
    let _ = splitmix64(&mut state);
    state ^= fnv1a(label.as_bytes());
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

impl RngStream {
    pub fn new(seed: u64, label: &str) -> Self {
        RngStream {
            seed,
            label: label.to_string(),
            rng: ChaCha8Rng::from_seed(derive_key(seed, label)),
        }
    }

    /// Derives an independent child stream; the child's identity is this
    /// stream's label extended by `label`.
    pub fn child(&self, label: &str) -> RngStream {
        RngStream::new(self.seed, &format!("{}/{}", self.label, label))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// `n` uniform draws in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
        if !(lo < hi) {
            return Err(Error::Argument(format!(
                "uniform bounds require lo < hi, got lo={lo}, hi={hi}"
            )));
        }
        let out = (0..n)
            .map(|_| {
                let v = lo + self.next_f64() * (hi - lo);
                // rounding at the top of the range must not produce hi itself
                if v >= hi {
                    lo + (hi - lo) * (1.0 - f64::EPSILON)
                } else {
                    v
                }
            })
            .collect();
        Ok(out)
    }

    /// Uniform integer in `[0, bound)` without modulo bias.
    pub fn next_below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "next_below: bound must be positive");
        let bound = bound as u64;
        let limit = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < limit {
                return (x % bound) as usize;
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i + 1);
            items.swap(i, j);
        }
    }

    /// Bernoulli draw with success probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Draws an index from an unnormalized weight table.
    pub fn weighted_index(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut u = self.next_f64() * total;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                return i;
            }
            u -= w;
        }
        weights.len() - 1
    }
}
