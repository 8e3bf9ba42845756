//! Seeded inputs shared by the benchmarks.

use mtcherry_core::{HypothesisFamily, IndexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` p-values, a tenth of them concentrated near zero.
pub fn synthetic_family(n: usize, seed: u64) -> HypothesisFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = (0..n)
        .map(|i| {
            let u: f64 = rng.random();
            if i % 10 == 0 {
                u * 1e-4
            } else {
                u
            }
        })
        .collect();
    HypothesisFamily::from_p_values(p).expect("p-values lie in [0, 1]")
}

/// Every other hypothesis.
pub fn alternate_set(n: usize) -> IndexSet {
    IndexSet::from_indices(n, (0..n).step_by(2))
}

/// Random edges of two or three elements each.
pub fn random_edges(width: usize, count: usize, seed: u64) -> Vec<IndexSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let size = rng.random_range(2..=3.min(width));
            let mut s = IndexSet::empty(width);
            while s.len() < size {
                s.insert(rng.random_range(0..width));
            }
            s
        })
        .collect()
}
