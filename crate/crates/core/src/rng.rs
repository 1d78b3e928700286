//! The toolkit's single random source: ChaCha8 seeded from a `u64`.
//! Bounded draws go through `u64` so streams match on 32- and 64-bit targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type ToolkitRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ToolkitRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform index in `0..n`.
pub fn uniform_below<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    rng.random_range(0..n as u64) as usize
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T, R: Rng + ?Sized>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_below(rng, i + 1);
        items.swap(i, j);
    }
}
