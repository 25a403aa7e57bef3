//! Counter-based random streams.
//!
//! Every random quantity in a trial is addressed by a tuple
//! `(trial key, purpose, p-bit, sub-step)`. The tuple is hashed into a stream
//! id and the stream yields `mix(id, counter)` for an incrementing counter, so
//! no generator state is shared between p-bits, sub-steps or trials. Results
//! do not depend on evaluation order or on how work is split across threads.

use rand::RngCore;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// What a stream is used for. Distinct purposes never share a stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    InitialSpin = 1,
    Intensity = 2,
    Offset = 3,
    Timing = 4,
    Update = 5,
}

/// Root of all streams belonging to one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrialKey(u64);

impl TrialKey {
    pub fn new(seed: u64) -> Self {
        Self(mix64(seed ^ 0x5851_F42D_4C95_7F2D))
    }

    /// Key of trial `index` in a batch seeded with `base_seed`.
    pub fn for_trial(base_seed: u64, index: u64) -> Self {
        Self::new(mix64(base_seed.wrapping_add(GOLDEN)) ^ mix64(index.wrapping_mul(GOLDEN) ^ 0xD6E8_FEB8_6659_FD93))
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    /// Independent stream for `(purpose, pbit, substep)`.
    pub fn stream(self, purpose: Purpose, pbit: usize, substep: u64) -> Stream {
        let mut id = mix64(self.0 ^ (purpose as u64).wrapping_mul(0xA076_1D64_78BD_642F));
        id = mix64(id ^ (pbit as u64).wrapping_mul(0xE703_7ED1_A0B4_28DB));
        id = mix64(id ^ substep.wrapping_mul(0x8EBC_6AF0_9C88_C6E3));
        Stream { id, counter: 0 }
    }
}

/// A finite-use random stream; cheap to create, usable through [`RngCore`].
#[derive(Clone, Debug)]
pub struct Stream {
    id: u64,
    counter: u64,
}

impl Stream {
    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[−1, 1)`.
    #[inline]
    pub fn next_signed_unit(&mut self) -> f64 {
        // (k − 2⁵³)/2⁵³ for k in [0, 2⁵⁴): exactly representable, never reaches 1
        let k = (self.next_u64() >> 10) as i64 - (1i64 << 53);
        k as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn next_bool(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}

impl RngCore for Stream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(mix64(self.id ^ self.counter.wrapping_mul(GOLDEN)).wrapping_add(self.id))
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
