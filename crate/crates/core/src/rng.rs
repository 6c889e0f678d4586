//! Seeded deterministic uniform generator.
//!
//! SplitMix64 (Steele, Lea & Flood 2014), chosen because it is tiny, has a
//! one-word state, and is trivially reproducible in any language, so sampled
//! test fixtures can be regenerated outside this crate. The exact algorithm,
//! for a 64-bit state `s` seeded directly with the user seed:
//!
//! ```text
//! s  = s + 0x9E3779B97F4A7C15                 (wrapping)
//! z  = s
//! z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (wrapping)
//! z  = (z ^ (z >> 27)) * 0x94D049BB133111EB   (wrapping)
//! out = z ^ (z >> 31)
//! ```
//!
//! Uniform doubles take the top 53 bits: `(out >> 11) * 2^-53` for `[0, 1)`
//! and `((out >> 11) + 0.5) * 2^-53` for the open interval `(0, 1)` used by
//! inversion samplers. First outputs for seed 0:
//! `0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F`.

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)` with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on the open interval `(0, 1)`; safe to feed quantile
    /// functions that diverge at either end.
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}
