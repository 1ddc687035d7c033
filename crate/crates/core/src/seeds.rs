//! Counter-based seed derivation.
//!
//! Sweeps assign one RNG stream per grid point (and per realization). A
//! master seed expands to per-point seeds through the SplitMix64 output
//! function evaluated at a counter, so the k-th derived seed depends only
//! on `(master, k)`: appending grid points never perturbs earlier streams,
//! and points can be generated in any order (or in parallel) with
//! identical results.

/// Weyl increment used by SplitMix64.
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the `index`-th child seed of `master`.
///
/// Equals the `index`-th output of the SplitMix64 sequence seeded with
/// `master`, computed in O(1) via the counter form.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master.wrapping_add(GAMMA.wrapping_mul(index.wrapping_add(1))))
}
