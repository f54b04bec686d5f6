// SPDX-License-Identifier: MIT OR Apache-2.0

//! Kernel multiple change-point detection.
//!
//! * [`exact_dp`]: exact best segmentations for every segment count in
//!   quadratic time and linear memory, with an optional minimum segment
//!   length.
//! * [`lowrank`]: Nystrom features plus heap-driven binary segmentation,
//!   linear in the signal length.
//! * [`model_selection`]: penalties, slope-heuristic calibration and the
//!   choice of the number of segments.
//! * [`metrics`] and [`simulate`]: evaluation helpers.
//!
//! Internally every index is 0-based and every range half-open. Public
//! change-points follow the 1-based convention of [`Segmentation`].
//!
//! ```
//! use kernseg_core::{kernseg, mad_scale, select_with_slope_heuristic, simulate, KernelGram, KernelSpec};
//!
//! let sim = simulate::mean_shift(600, 3, 5.0, 7)?;
//! let signal = mad_scale(&sim.signal)?.signal;
//! let kernel = KernelSpec::Gaussian { bandwidth: 1.0 };
//! let dp = kernseg(&KernelGram::new(&kernel, &signal)?, 20)?;
//! let choice = select_with_slope_heuristic(&dp.final_losses(), signal.len(), 1)?;
//! let found = dp.backtrack(choice.selected)?;
//! assert_eq!(found.num_segments(), 4);
//! for (f, t) in found.change_points().iter().zip(sim.truth.change_points()) {
//!     assert!(f.abs_diff(*t) <= 3);
//! }
//! # Ok::<(), kernseg_core::Error>(())
//! ```

#![forbid(unsafe_code)]

pub mod error;
pub mod exact_dp;
pub mod kernels;
pub mod lowrank;
pub mod metrics;
pub mod model_selection;
pub mod segmentation;
pub mod signal;
pub mod simulate;

pub use error::{Error, Result};
pub use exact_dp::{
    kernseg, kernseg_constrained, naive_dp, segment_cost_direct, CostColumn, DpResult,
};
pub use kernels::{DenseGram, Gram, KernelGram, KernelSpec, SumComponent};
pub use lowrank::{
    best_split, binary_segmentation, nystrom_embed, BinsegResult, Embedding, LandmarkRule,
    SegmentCost, SplitCandidate,
};
pub use metrics::{empirical_risk, frobenius_distance, piecewise_mean_fit};
pub use model_selection::{
    count_segmentations, penalty, select, select_with_slope_heuristic, slope_heuristic,
    PenaltySpec, SelectionResult,
};
pub use segmentation::Segmentation;
pub use signal::{mad_scale, ScaledSignal, Signal};
