//! Seeded random stream shared by every randomized component.
//!
//! All randomness in a run flows through [`RngStream`], so a run is a pure
//! function of its master seed. Per-phase streams are derived with
//! [`derive_seed`] instead of being drawn from the parent stream, which keeps
//! phase `k` reproducible no matter how many draws earlier phases made.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream label used for the initial construction.
pub const CONSTRUCTION_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Child stream for the `label`-th phase (or any other named sub-stream).
    pub fn derive(master_seed: u64, label: u64) -> Self {
        Self::new(derive_seed(master_seed, label))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform index in `0..n`. Panics when `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "RngStream::below called with an empty range");
        self.inner.random_range(0..n)
    }

    /// Uniform real in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.inner);
    }

    pub fn range_i64(&mut self, lo: i64, hi_inclusive: i64) -> i64 {
        self.inner.random_range(lo..=hi_inclusive)
    }
}

/// SplitMix64 finalizer over `seed ^ label`-mixed input.
pub fn derive_seed(master_seed: u64, label: u64) -> u64 {
    let mut z = master_seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(label.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
