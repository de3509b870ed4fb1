//! Deterministic pseudo-random number generation.
//!
//! Every random draw in this crate flows through [`SplitMix64`], a seedable
//! counter-advanced 64-bit generator. Uniform doubles are formed from the top
//! 53 bits of the output word, so streams are reproducible bit-for-bit across
//! runs and across worker counts. Independent substreams for parallel work are
//! derived with [`substream`].

/// Golden-ratio increment of the SplitMix64 counter.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output mixing function (Stafford variant 13).
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of an independent substream.
///
/// `substream(seed, k)` mixes the realization index `k` into the base seed
/// through one SplitMix64 finalization, so workers can draw from disjoint
/// streams without coordination: `mix64(seed + (k + 1) * GOLDEN)`.
pub fn substream(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// SplitMix64: a counter that advances by a golden-ratio constant, with a
/// finalizing mix on each output word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Next raw 64-bit word.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform double in `[0, 1)` from the top 53 bits of the next word.
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// A pair of independent standard normal deviates (Box-Muller).
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        // 1 - u keeps the argument of ln strictly positive.
        let u = 1.0 - self.next_f64();
        let v = self.next_f64();
        let r = (-2.0 * u.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * v;
        (r * angle.cos(), r * angle.sin())
    }
}
