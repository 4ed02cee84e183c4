//! Seed derivation helpers shared by the seeded modules.

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed so that sub-streams (per trial, per tick) never overlap no
/// matter in which order they are drawn.
pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives a child seed from a parent seed and a stream index.
pub(crate) fn derive_seed(parent: u64, stream: u64) -> u64 {
    splitmix64(parent ^ splitmix64(stream))
}
