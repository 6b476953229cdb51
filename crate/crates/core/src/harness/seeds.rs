//! Seed derivation.
//!
//! `derive_seed(root, stream, index) = mix(mix(root ^ mix(stream)) ^ index)`
//! where `mix` is the SplitMix64 finalizer applied after adding the golden
//! gamma `0x9E3779B97F4A7C15`. Every trial owns the seed
//! `derive_seed(root, SAMPLE_STREAM, trial)`, so trials can be replayed one
//! at a time and in any order.

pub const ROTATION_STREAM: u64 = 1;
pub const SAMPLE_STREAM: u64 = 2;
pub const PROBE_STREAM: u64 = 3;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(root ^ splitmix64(stream)) ^ index)
}

pub fn trial_seed(root: u64, trial: usize) -> u64 {
    derive_seed(root, SAMPLE_STREAM, trial as u64)
}
