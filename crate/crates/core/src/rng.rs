//! Splittable splitmix64 streams.
//!
//! Every augmented sample owns a stream derived from
//! `(global seed, image id, sample index, epoch)`, so outputs do not depend
//! on the order in which samples are evaluated.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const SAMPLE_MULT: u64 = 0x632B_E59B_D9B4_E019;
const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// splitmix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    state: u64,
}

impl RngStream {
    pub fn new(state: u64) -> Self {
        RngStream { state }
    }

    /// Child stream for one (sample, epoch) of the item identified by `key`.
    pub fn derive(seed: u64, key: &str, sample_index: u64, epoch: u64) -> Self {
        let mixed = seed
            ^ fnv1a64(key.as_bytes())
            ^ sample_index.wrapping_mul(SAMPLE_MULT)
            ^ epoch.wrapping_mul(GOLDEN_GAMMA);
        RngStream::new(mix64(mixed))
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn unit_float(&mut self) -> f64 {
        (self.next() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// First `n` outputs of the stream started at `seed`.
pub fn rng_reference_vector(seed: u64, n: usize) -> Vec<u64> {
    let mut s = RngStream::new(seed);
    (0..n).map(|_| s.next()).collect()
}
