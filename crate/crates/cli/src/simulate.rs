// SPDX-License-Identifier: MIT OR Apache-2.0

//! The `simulate` subcommand.

use kernseg_core::simulate::{self, SyntheticSignal};
use serde::Serialize;

use crate::args::{Scenario, SimulateArgs};
use crate::error::CliResult;

/// Ground truth written next to a simulated signal.
#[derive(Debug, Clone, Serialize)]
pub struct Truth {
    pub scenario: &'static str,
    pub n: usize,
    pub seed: u64,
    pub segments: usize,
    /// 1-based first index of every true segment.
    pub starts: Vec<usize>,
    /// `means[c][t]`: expected value of coordinate `c` at 0-based time `t`.
    pub means: Vec<Vec<f64>>,
}

pub fn run_simulate(args: &SimulateArgs) -> CliResult<(SyntheticSignal, Truth)> {
    let (synthetic, scenario) = match args.scenario {
        Scenario::MeanShift => (
            simulate::mean_shift(args.n, args.changes, args.jump, args.seed)?,
            "mean-shift",
        ),
        Scenario::VarianceShift => (
            simulate::variance_shift(args.n, 1.0, args.sd_after, args.seed)?,
            "variance-shift",
        ),
        Scenario::TwoTrack => (
            simulate::two_track(args.n, args.changes, args.noise, args.seed)?,
            "two-track",
        ),
    };
    let truth = Truth {
        scenario,
        n: args.n,
        seed: args.seed,
        segments: synthetic.truth.num_segments(),
        starts: synthetic.truth.starts().to_vec(),
        means: synthetic.means.clone(),
    };
    Ok((synthetic, truth))
}
