//! Counter-based deterministic random numbers for the synthesizer.
//!
//! Uses the SplitMix64 finalizer over a (key, counter) pair: every draw is a
//! pure function of (seed, stream id, counter), so output is identical
//! across platforms and thread counts regardless of evaluation order.

/// Keyed counter-based generator. Cheap to copy; no mutable state.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    key: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline(always)]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl CounterRng {
    /// Derive an independent stream for (seed, stream id).
    pub fn new(seed: u64, stream: u64) -> Self {
        let key = mix64(seed ^ mix64(stream.wrapping_mul(GOLDEN).wrapping_add(GOLDEN)));
        Self { key }
    }

    /// The `counter`-th 64-bit draw of this stream.
    #[inline(always)]
    pub fn u64_at(&self, counter: u64) -> u64 {
        mix64(self.key.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN)))
    }

    /// Uniform in [0, 1) with 24-bit resolution.
    #[inline(always)]
    pub fn f32_at(&self, counter: u64) -> f32 {
        (self.u64_at(counter) >> 40) as f32 * (1.0 / (1u64 << 24) as f32)
    }

    /// Complex circular Gaussian sample with mean-square power `power`,
    /// via the polar Box-Muller form: one draw yields both components.
    #[inline(always)]
    pub fn complex_gaussian_at(&self, counter: u64, power: f32) -> (f32, f32) {
        let bits = self.u64_at(counter);
        // u1 in (0, 1] so the log is finite; u2 in [0, 1).
        let u1 = ((bits >> 40) as f32 + 1.0) * (1.0 / (1u64 << 24) as f32);
        let u2 = ((bits >> 16) & 0x00FF_FFFF) as f32 * (1.0 / (1u64 << 24) as f32);
        let radius = (-power * u1.ln()).sqrt();
        let theta = std::f32::consts::TAU * u2;
        let (s, c) = theta.sin_cos();
        (radius * c, radius * s)
    }
}
