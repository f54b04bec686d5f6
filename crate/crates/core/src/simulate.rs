// SPDX-License-Identifier: MIT OR Apache-2.0

//! Synthetic piecewise-distribution signals with known truth.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)`; each entry
//! consumes exactly one standard normal draw (ziggurat sampler of
//! `rand_distr`) in row-major order, so a seed fixes the output bit for
//! bit on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::segmentation::Segmentation;
use crate::signal::Signal;

/// Distribution of one coordinate within one segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentDistribution {
    /// `N(mean, sd^2)`; covers mean and variance shifts.
    Gaussian { mean: f64, sd: f64 },
    /// `|N(center, sd^2) - 0.5|`, a folded allelic-ratio-like track.
    FoldedGaussian { center: f64, sd: f64 },
}

impl SegmentDistribution {
    fn sd(&self) -> f64 {
        match *self {
            Self::Gaussian { sd, .. } | Self::FoldedGaussian { sd, .. } => sd,
        }
    }

    /// Expected value once the noise multiplier is applied.
    pub fn mean(&self, noise: f64) -> f64 {
        match *self {
            Self::Gaussian { mean, .. } => mean,
            Self::FoldedGaussian { center, sd } => {
                let m = center - 0.5;
                let s = sd * noise;
                if s == 0.0 {
                    m.abs()
                } else {
                    s * (2.0 / std::f64::consts::PI).sqrt() * (-m * m / (2.0 * s * s)).exp()
                        + m * erf(m / (s * std::f64::consts::SQRT_2))
                }
            }
        }
    }

    fn draw(&self, noise: f64, z: f64) -> f64 {
        match *self {
            Self::Gaussian { mean, sd } => mean + noise * sd * z,
            Self::FoldedGaussian { center, sd } => (center + noise * sd * z - 0.5).abs(),
        }
    }
}

/// A generated signal with its true segmentation and regression means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSignal {
    pub signal: Signal,
    pub truth: Segmentation,
    /// `means[c][t]`: expected value of coordinate `c` at time `t`.
    pub means: Vec<Vec<f64>>,
    pub seed: u64,
    pub noise: f64,
}

/// Draws a signal following `truth`, with `segments[d][c]` describing
/// coordinate `c` of segment `d`. Every standard deviation is multiplied
/// by `noise`; `noise == 0` returns the means exactly.
pub fn generate(
    truth: &Segmentation,
    segments: &[Vec<SegmentDistribution>],
    noise: f64,
    seed: u64,
) -> Result<SyntheticSignal> {
    if segments.len() != truth.num_segments() {
        return Err(Error::DimensionMismatch {
            expected: truth.num_segments(),
            got: segments.len(),
        });
    }
    let q = segments.first().map_or(0, Vec::len);
    if q == 0 {
        return Err(Error::invalid_input(
            "segments must describe at least one coordinate",
        ));
    }
    if let Some(bad) = segments.iter().find(|s| s.len() != q) {
        return Err(Error::DimensionMismatch {
            expected: q,
            got: bad.len(),
        });
    }
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(Error::invalid_input(format!(
            "noise must be finite and >= 0; got {noise}"
        )));
    }
    if segments
        .iter()
        .flatten()
        .any(|d| !(d.sd().is_finite() && d.sd() >= 0.0))
    {
        return Err(Error::invalid_input(
            "standard deviations must be finite and >= 0",
        ));
    }

    let n = truth.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n * q);
    let mut means = vec![Vec::with_capacity(n); q];
    for ((s, e), dists) in truth.bounds().zip(segments) {
        for _ in s..e {
            for (c, dist) in dists.iter().enumerate() {
                let z: f64 = StandardNormal.sample(&mut rng);
                data.push(dist.draw(noise, z));
                means[c].push(dist.mean(noise));
            }
        }
    }
    Ok(SyntheticSignal {
        signal: Signal::new(data, n, q)?,
        truth: truth.clone(),
        means,
        seed,
        noise,
    })
}

/// `changes` change-points spread evenly over `1..=n`.
pub fn evenly_spaced(n: usize, changes: usize) -> Result<Segmentation> {
    if changes >= n {
        return Err(Error::infeasible(format!(
            "{changes} change-points do not fit in n={n}"
        )));
    }
    let starts = (0..=changes).map(|i| 1 + i * n / (changes + 1)).collect();
    Segmentation::new(starts, n)
}

/// Unit-variance Gaussian signal whose mean alternates between `0` and
/// `jump` at `changes` evenly spaced change-points.
pub fn mean_shift(n: usize, changes: usize, jump: f64, seed: u64) -> Result<SyntheticSignal> {
    let truth = evenly_spaced(n, changes)?;
    let segments: Vec<Vec<SegmentDistribution>> = (0..=changes)
        .map(|d| {
            vec![SegmentDistribution::Gaussian {
                mean: if d % 2 == 0 { 0.0 } else { jump },
                sd: 1.0,
            }]
        })
        .collect();
    generate(&truth, &segments, 1.0, seed)
}

/// Zero-mean Gaussian signal whose standard deviation changes once, at the
/// middle of the signal.
pub fn variance_shift(
    n: usize,
    sd_before: f64,
    sd_after: f64,
    seed: u64,
) -> Result<SyntheticSignal> {
    let truth = evenly_spaced(n, 1)?;
    let segments = [sd_before, sd_after]
        .map(|sd| vec![SegmentDistribution::Gaussian { mean: 0.0, sd }])
        .to_vec();
    generate(&truth, &segments, 1.0, seed)
}

/// Two-track profile: a copy-number-like Gaussian track and a folded
/// allelic-ratio track. Consecutive segments cycle through four states
/// that differ in one or both tracks; `noise` plays the role of the
/// inverse signal-to-noise ratio.
pub fn two_track(n: usize, changes: usize, noise: f64, seed: u64) -> Result<SyntheticSignal> {
    const STATES: [(f64, f64); 4] = [(2.0, 0.5), (3.0, 0.67), (2.0, 0.9), (1.0, 1.0)];
    let truth = evenly_spaced(n, changes)?;
    let segments: Vec<Vec<SegmentDistribution>> = (0..=changes)
        .map(|d| {
            let (level, baf) = STATES[d % STATES.len()];
            vec![
                SegmentDistribution::Gaussian {
                    mean: level,
                    sd: 0.3,
                },
                SegmentDistribution::FoldedGaussian {
                    center: baf,
                    sd: 0.1,
                },
            ]
        })
        .collect();
    generate(&truth, &segments, noise, seed)
}
