//! Seeded RNG helpers shared by the generators and the learning loops.
//!
//! Everything is built on `ChaCha8Rng` so that a `(seed, draw order)` pair
//! pins down every run bit-for-bit across platforms.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw in `[0, 1)` with 53 bits of precision.
pub(crate) fn next_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in `[lo, hi)`.
pub(crate) fn uniform(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    lo + next_f64(rng) * (hi - lo)
}

/// Uniform index in `[0, n)`.
pub(crate) fn uniform_index(rng: &mut impl RngCore, n: usize) -> usize {
    let u = next_f64(rng);
    let idx = (u * n as f64) as usize;
    idx.min(n - 1)
}

/// Sample an index from a probability vector by cumulative scan.
///
/// Ties and floating residue at the top of the scan resolve to the last
/// entry with positive mass, so a valid distribution always yields an
/// in-range index.
pub(crate) fn sample_index(rng: &mut impl RngCore, probs: &[f64]) -> usize {
    let u = next_f64(rng);
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = k;
        }
        acc += p;
        if u < acc {
            return k;
        }
    }
    last_positive
}
