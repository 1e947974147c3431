//! Shared fixtures for the benchmarks.

use vrpsd_core::synthetic::{generate, Synthetic, SyntheticSpec};

/// Mid-sized instance: big enough that operators do real work, small
/// enough that a bench sample stays under a second.
pub fn mid_instance() -> Synthetic {
    generate(
        &SyntheticSpec::new(80, vec![21_600, 28_800, 50_400, 64_800]),
        7,
    )
}

/// The full-size generated instance.
pub fn full_instance() -> Synthetic {
    generate(&SyntheticSpec::full_size(), 0)
}
