// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kernseg_core::lowrank::DEFAULT_LANDMARKS;
use kernseg_core::KernelSpec;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "kernseg",
    version,
    about = "Kernel multiple change-point detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment a CSV signal and print a JSON report.
    Segment(SegmentArgs),
    /// Write a synthetic signal as CSV, with its truth as JSON.
    Simulate(SimulateArgs),
    /// Time the segmenters over a grid of signal lengths.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelFamily {
    Linear,
    Gaussian,
    Laplace,
    Exponential,
    Energy,
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    #[arg(long, value_enum, default_value_t = KernelFamily::Gaussian)]
    pub kernel: KernelFamily,
    /// Bandwidth of the gaussian, laplace and exponential kernels.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Exponent of the energy kernel, in (0, 2).
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Anchor of the energy kernel, repeated on every coordinate.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x0: f64,
    /// Sum one kernel per coordinate instead of one kernel on the vector.
    #[arg(long)]
    pub per_coordinate: bool,
}

impl KernelArgs {
    /// Kernel for a signal with `dim` coordinates.
    pub fn build(&self, dim: usize) -> KernelSpec {
        let base = |d: usize| match self.kernel {
            KernelFamily::Linear => KernelSpec::Linear,
            KernelFamily::Gaussian => KernelSpec::Gaussian {
                bandwidth: self.delta,
            },
            KernelFamily::Laplace => KernelSpec::Laplace {
                bandwidth: self.delta,
            },
            KernelFamily::Exponential => KernelSpec::Exponential {
                bandwidth: self.delta,
            },
            KernelFamily::Energy => KernelSpec::Energy {
                alpha: self.alpha,
                anchor: vec![self.x0; d],
            },
        };
        if self.per_coordinate && dim > 1 {
            KernelSpec::per_coordinate(base(1), dim)
        } else {
            base(dim)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    /// Exact dynamic programming.
    Exact,
    /// Nystrom features and binary segmentation.
    LowrankBinseg,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::LowrankBinseg => "lowrank-binseg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LandmarkChoice {
    /// Grid when every kernel acts on one coordinate, stride otherwise.
    Auto,
    /// Evenly spaced values over each coordinate's range.
    Grid,
    /// Every k-th observation.
    Stride,
}

#[derive(Debug, Clone, Args)]
pub struct SegmentArgs {
    /// Input CSV; standard input when absent or "-".
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output JSON; standard output when absent or "-".
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, value_enum, default_value_t = Algorithm::Exact)]
    pub algorithm: Algorithm,
    /// Largest number of segments considered.
    #[arg(long, default_value_t = 100)]
    pub dmax: usize,
    /// Minimum number of points per segment.
    #[arg(long, default_value_t = 1)]
    pub min_seg_len: usize,
    /// Number of landmarks for the low-rank path [default: 100].
    #[arg(long)]
    pub landmarks: Option<usize>,
    #[arg(long, value_enum, default_value_t = LandmarkChoice::Auto)]
    pub landmark_rule: LandmarkChoice,
    /// Skip the per-coordinate noise scaling.
    #[arg(long)]
    pub no_scale: bool,
    /// Penalty constant on the number of segments. Needs --c2.
    #[arg(long, requires = "c2")]
    pub c1: Option<f64>,
    /// Penalty constant on the log segmentation count. Needs --c1.
    #[arg(long, requires = "c1")]
    pub c2: Option<f64>,
}

impl SegmentArgs {
    pub fn landmark_count(&self) -> usize {
        self.landmarks.unwrap_or(DEFAULT_LANDMARKS)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    /// Unit-variance Gaussian whose mean alternates between 0 and --jump.
    MeanShift,
    /// Zero-mean Gaussian whose standard deviation changes once.
    VarianceShift,
    /// Two coordinates: a Gaussian level and a folded ratio.
    TwoTrack,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Number of change-points (mean-shift and two-track).
    #[arg(long, default_value_t = 10)]
    pub changes: usize,
    #[arg(long, value_enum, default_value_t = Scenario::MeanShift)]
    pub scenario: Scenario,
    /// Mean jump in noise standard deviations (mean-shift).
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub jump: f64,
    /// Standard deviation after the change (variance-shift).
    #[arg(long, default_value_t = 3.0)]
    pub sd_after: f64,
    /// Noise multiplier (two-track).
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV; standard output when absent or "-".
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Where to write the true segmentation and means as JSON.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LandmarkGrowth {
    /// The same --landmarks for every n.
    Fixed,
    /// ceil(sqrt(n)) landmarks.
    Sqrt,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Signal lengths, ascending.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [4000, 8000, 16000])]
    pub lengths: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algorithm::Exact, Algorithm::LowrankBinseg])]
    pub algorithms: Vec<Algorithm>,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value_t = 100)]
    pub dmax: usize,
    #[arg(long, default_value_t = DEFAULT_LANDMARKS)]
    pub landmarks: usize,
    #[arg(long, value_enum, default_value_t = LandmarkGrowth::Fixed)]
    pub p_rule: LandmarkGrowth,
    #[arg(long, value_enum, default_value_t = LandmarkChoice::Auto)]
    pub landmark_rule: LandmarkChoice,
    /// Timed runs per cell; the median is reported.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Cells whose tables would exceed this many bytes are skipped.
    #[arg(long, default_value_t = 8 << 30)]
    pub memory_budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV; standard output when absent or "-".
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl BenchArgs {
    pub fn validate(&self) -> CliResult<()> {
        if self.lengths.is_empty() || self.algorithms.is_empty() {
            return Err(CliError::Input("the grid is empty".into()));
        }
        if self.lengths.windows(2).any(|w| w[0] > w[1]) {
            return Err(CliError::Input("--n must be sorted ascending".into()));
        }
        if self.repeats == 0 {
            return Err(CliError::Input("--repeats must be >= 1".into()));
        }
        Ok(())
    }

    pub fn landmarks_for(&self, n: usize) -> usize {
        match self.p_rule {
            LandmarkGrowth::Fixed => self.landmarks,
            LandmarkGrowth::Sqrt => (n as f64).sqrt().ceil() as usize,
        }
    }
}
