// SPDX-License-Identifier: MIT OR Apache-2.0

//! Shared fixtures for the benchmarks.

use kernseg_core::{mad_scale, simulate, Signal};

/// Scaled univariate signal with ten unit-variance mean jumps of size 5.
pub fn mean_shift_signal(n: usize, seed: u64) -> Signal {
    let sim = simulate::mean_shift(n, 10.min(n - 1), 5.0, seed).expect("valid length");
    mad_scale(&sim.signal).expect("at least four points").signal
}

/// Scaled two-coordinate profile with ten change-points.
pub fn two_track_signal(n: usize, seed: u64) -> Signal {
    let sim = simulate::two_track(n, 10.min(n - 1), 1.0, seed).expect("valid length");
    mad_scale(&sim.signal).expect("at least four points").signal
}
