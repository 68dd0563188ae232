//! Fixtures shared by the benchmarks.

use adim_core::{generate, EnvKind, GenSpec, Generated};

/// A generated environment small enough for criterion's repeated sampling.
pub fn fixture(kind: EnvKind, size: usize, seed: u64, obstacles: usize) -> Generated {
    generate(&GenSpec::new(kind, size, seed, obstacles)).expect("fixture generates")
}
