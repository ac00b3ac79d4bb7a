//! Shared fixtures for the solver benchmarks.

use trimatch::{Instance, TargetTriple};

/// A connected instance of size `n` from a fixed seed.
pub fn connected_instance(n: usize, seed: u64) -> Instance {
    trimatch::oracle::gen_random(n, seed, true).expect("generation succeeds")
}

/// A near-equal split of `n - 1` across the three colors.
pub fn balanced_target(n: usize) -> TargetTriple {
    let a1 = (n - 1) / 3;
    let a2 = (n - 1 - a1) / 2;
    TargetTriple::new(a1, a2, n - 1 - a1 - a2)
}
