//! Deterministic random data generation.
//!
//! Seeded initial data must reproduce byte-identically across runs, platforms,
//! and releases, so the generator is pinned here rather than taken from a
//! library whose stream may change between versions. SplitMix64 is Vigna's
//! public-domain mixer: one 64-bit state word, period 2^64, passes BigCrush.

/// SplitMix64 pseudo-random generator.
///
/// The sequence produced by a given seed is part of this crate's output
/// contract; do not alter the constants.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1): top 53 bits scaled by 2^-53.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [-1, 1).
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }
}
