//! Shared fixtures for the criterion benchmarks.

use purikit::sampler::{sample_states, ChainConfig};
use purikit::DensityMatrix;

/// A reproducible batch of uniform two-qubit states.
pub fn uniform_states(n: usize, seed: u64) -> Vec<DensityMatrix> {
    sample_states(ChainConfig {
        seed,
        burn_in: 500,
        thinning: 1,
        n_samples: n,
    })
    .expect("valid chain config")
    .map(|s| s.expect("chain does not stall"))
    .collect()
}
