//! Deterministic seed derivation.
//!
//! Every stochastic routine takes an explicit 64-bit master seed and derives
//! sub-seeds with [`mix`], a SplitMix64 finalizer over `master ^ index * PHI`.
//! The derivation is part of the output-file contract: re-running from the
//! provenance block must reproduce every replica stream bit-exactly,
//! independent of thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PHI: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer of `master ^ index * PHI`.
pub fn mix(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(PHI).wrapping_add(PHI);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Namespaces for sub-seed derivation, so independent experiment arms never
/// share a replica stream.
#[derive(Debug, Clone, Copy)]
pub enum Stream {
    Replica,
    FieldRow,
    EdgeNoise,
    Resample,
    Arm,
    Bootstrap,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Replica => 0x01,
            Stream::FieldRow => 0x02,
            Stream::EdgeNoise => 0x03,
            Stream::Resample => 0x04,
            Stream::Arm => 0x05,
            Stream::Bootstrap => 0x06,
        }
    }
}

/// Sub-seed for stream `stream`, element `index`, under `master`.
pub fn sub_seed(master: u64, stream: Stream, index: u64) -> u64 {
    mix(mix(master, stream.tag()), index)
}

/// The RNG used throughout: ChaCha with 8 rounds, seeded from a 64-bit value.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
