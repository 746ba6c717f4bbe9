//! Fixed pseudo-random machinery.
//!
//! Every random draw in the crate comes from xoshiro256** seeded through
//! SplitMix64 (`Xoshiro256StarStar::seed_from_u64`). Independent streams are
//! derived with [`mix`], so a task's randomness depends only on
//! `(master_seed, tag)` and never on scheduling order. Uniform reals use the
//! top 53 bits of a draw, bounded integers use Lemire's widening multiply
//! with rejection, and normals use Box–Muller. None of these go through a
//! platform or crate distribution whose output could change between versions.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

/// Stream tags; one per consumer of randomness.
pub mod tag {
    pub const SPLIT: u64 = 0x5350_4c49;
    pub const INIT: u64 = 0x494e_4954;
    pub const TRAIN: u64 = 0x5452_4149;
    pub const QUERY: u64 = 0x5155_4552;
    pub const MASK: u64 = 0x4d41_534b;
    pub const KMEANS: u64 = 0x4b4d_4541;
    pub const SILHOUETTE: u64 = 0x5349_4c48;
    pub const PROBE: u64 = 0x5052_4f42;
    pub const AUGMENT: u64 = 0x4155_474d;
    pub const CENTERS: u64 = 0x4345_4e54;
    pub const SAMPLES: u64 = 0x5341_4d50;
}

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed: `splitmix64(seed ^ splitmix64(tag))`.
#[inline]
pub fn mix(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}

/// Derive a child seed from a chain of tags.
pub fn mix_all(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(seed, |s, &t| mix(s, t))
}

#[derive(Clone, Debug)]
pub struct Rng {
    inner: Xoshiro256StarStar,
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, bound). `bound` must be non-zero.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "below(0)");
        let bound = bound as u64;
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let m = (self.next_u64() as u128) * (bound as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as usize;
            }
        }
    }

    /// Standard normal via Box–Muller; both variates of a pair are used.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - uniform() lies in (0, 1], keeping ln finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// Partial Fisher–Yates: the first `count` entries become a uniform
    /// sample without replacement, in draw order.
    pub fn choose_prefix<T>(&mut self, items: &mut [T], count: usize) {
        let n = items.len();
        for i in 0..count.min(n) {
            let j = i + self.below(n - i);
            items.swap(i, j);
        }
    }
}

/// Round-half-up, the single rounding rule for counts derived from fractions.
#[inline]
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor().max(0.0) as usize
}
