// SPDX-License-Identifier: MIT OR Apache-2.0

//! Penalized choice of the number of segments.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Smallest `max_segments` accepted by [`slope_heuristic`].
pub const SLOPE_MIN_SEGMENTS: usize = 10;

/// Condition number above which the two-shape regression is abandoned.
pub const SLOPE_CONDITION_LIMIT: f64 = 1e8;

/// Number of segmentations of `n` points into `d` segments of length at
/// least `min_len`: `binom(n - d (min_len - 1) - 1, d - 1)`, or zero when
/// `n < d * min_len`.
pub fn count_segmentations(n: u64, d: u64, min_len: u64) -> BigUint {
    if d == 0 || min_len == 0 || n < d.saturating_mul(min_len) {
        return BigUint::from(0u32);
    }
    binomial(n - d * (min_len - 1) - 1, d - 1)
}

fn binomial(m: u64, k: u64) -> BigUint {
    let k = k.min(m - k);
    let mut acc = BigUint::from(1u32);
    for i in 1..=k {
        acc *= m - k + i;
        acc /= i;
    }
    acc
}

/// `ln binom(m, k)` through log-gamma.
pub fn ln_binomial(m: u64, k: u64) -> f64 {
    assert!(k <= m, "ln_binomial({m}, {k})");
    if k == 0 || k == m {
        return 0.0;
    }
    let (m, k) = (m as f64, k as f64);
    ln_gamma(m + 1.0) - ln_gamma(k + 1.0) - ln_gamma(m - k + 1.0)
}

/// Logarithm of [`count_segmentations`], `-inf` when it is zero.
pub fn ln_count(n: usize, d: usize, min_len: usize) -> f64 {
    if d == 0 || min_len == 0 || n < d.saturating_mul(min_len) {
        return f64::NEG_INFINITY;
    }
    ln_binomial((n - d * (min_len - 1) - 1) as u64, (d - 1) as u64)
}

/// Constants and problem size of `pen(d) = c1 d + c2 ln count(n, d, min_len)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub c1: f64,
    pub c2: f64,
    pub min_len: usize,
    pub max_segments: usize,
    pub n: usize,
}

impl PenaltySpec {
    pub fn new(c1: f64, c2: f64, n: usize, max_segments: usize, min_len: usize) -> Result<Self> {
        if !(c1 >= 0.0 && c2 >= 0.0 && c1.is_finite() && c2.is_finite()) {
            return Err(Error::invalid_input(format!(
                "penalty constants must be finite and >= 0; got c1={c1}, c2={c2}"
            )));
        }
        if min_len == 0 || max_segments == 0 || max_segments.saturating_mul(min_len) > n {
            return Err(Error::infeasible(format!(
                "{max_segments} segments of length >= {min_len} do not fit in n={n}"
            )));
        }
        Ok(Self {
            c1,
            c2,
            min_len,
            max_segments,
            n,
        })
    }
}

/// Penalty of a segmentation with `d` segments; `+inf` if `d` is infeasible.
pub fn penalty(d: usize, spec: &PenaltySpec) -> f64 {
    if d == 0 || d > spec.max_segments {
        return f64::INFINITY;
    }
    let shape = ln_count(spec.n, d, spec.min_len);
    if shape == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    spec.c1 * d as f64 + spec.c2 * shape
}

/// Penalty without a length constraint, `c1 d + c2 ln binom(n - 1, d - 1)`.
pub fn penalty_unconstrained(d: usize, c1: f64, c2: f64, n: usize) -> f64 {
    if d == 0 || d > n {
        return f64::INFINITY;
    }
    c1 * d as f64 + c2 * ln_binomial((n - 1) as u64, (d - 1) as u64)
}

/// Outcome of the slope-heuristic regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub c1: f64,
    pub c2: f64,
    pub intercept: f64,
    /// Fitted slopes of the loss against `d` and the log-count shape.
    pub slopes: [f64; 2],
    /// Segment counts used in the fit.
    pub window: [usize; 2],
    pub condition_number: f64,
    /// The regressors were too collinear and one combined shape was used.
    pub combined_shape: bool,
    pub residual_sum_squares: f64,
}

/// Calibrates `(c1, c2)` from the loss curve.
///
/// `losses[d - 1]` is the best loss with `d` segments. Over the upper half
/// `ceil(D/2)..=D` of the feasible counts the loss is regressed on
/// `(1, d, ln count(n, d, min_len))`; each constant is `-2` times its slope,
/// clamped at zero. When the design is ill-conditioned the two shapes are
/// summed into one regressor and both constants take the same value.
pub fn slope_heuristic(losses: &[f64], n: usize, min_len: usize) -> Result<SlopeFit> {
    let max_segments = losses
        .iter()
        .rposition(|l| l.is_finite())
        .map_or(0, |i| i + 1);
    if max_segments < SLOPE_MIN_SEGMENTS {
        return Err(Error::invalid_input(format!(
            "slope heuristic needs at least {SLOPE_MIN_SEGMENTS} feasible segment counts; got {max_segments}. Supply c1 and c2 explicitly"
        )));
    }
    let lo = max_segments.div_ceil(2);
    let ds: Vec<usize> = (lo..=max_segments)
        .filter(|&d| losses[d - 1].is_finite())
        .collect();
    let m = ds.len();
    let y = DVector::from_iterator(m, ds.iter().map(|&d| losses[d - 1]));
    let design = DMatrix::from_fn(m, 3, |r, c| match c {
        0 => 1.0,
        1 => ds[r] as f64,
        _ => ln_count(n, ds[r], min_len),
    });
    let condition_number = condition(&design);
    let window = [lo, max_segments];

    if condition_number <= SLOPE_CONDITION_LIMIT {
        if let Some(beta) = least_squares(&design, &y) {
            let rss = (&design * &beta - &y).norm_squared();
            return Ok(SlopeFit {
                c1: (-2.0 * beta[1]).max(0.0),
                c2: (-2.0 * beta[2]).max(0.0),
                intercept: beta[0],
                slopes: [beta[1], beta[2]],
                window,
                condition_number,
                combined_shape: false,
                residual_sum_squares: rss,
            });
        }
    }

    let combined = DMatrix::from_fn(m, 2, |r, c| {
        if c == 0 {
            1.0
        } else {
            ds[r] as f64 + ln_count(n, ds[r], min_len)
        }
    });
    let beta = least_squares(&combined, &y)
        .ok_or_else(|| Error::invalid_input("slope regression is singular"))?;
    let rss = (&combined * &beta - &y).norm_squared();
    let c = (-2.0 * beta[1]).max(0.0);
    Ok(SlopeFit {
        c1: c,
        c2: c,
        intercept: beta[0],
        slopes: [beta[1], beta[1]],
        window,
        condition_number,
        combined_shape: true,
        residual_sum_squares: rss,
    })
}

fn condition(design: &DMatrix<f64>) -> f64 {
    let sv = design.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

fn least_squares(design: &DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    design.clone().svd(true, true).solve(y, 1e-14).ok()
}

/// One row of the model-selection table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub segments: usize,
    pub loss: f64,
    pub penalty: f64,
    pub criterion: f64,
}

/// The chosen number of segments and the table it was chosen from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected: usize,
    pub c1: f64,
    pub c2: f64,
    pub table: Vec<SelectionRow>,
    pub slope_fit: Option<SlopeFit>,
}

/// Minimizes `losses[d - 1] + penalty(d)`; ties go to the smaller `d`.
pub fn select(losses: &[f64], spec: &PenaltySpec) -> Result<SelectionResult> {
    let table: Vec<SelectionRow> = losses
        .iter()
        .take(spec.max_segments)
        .enumerate()
        .map(|(i, &loss)| {
            let d = i + 1;
            let pen = penalty(d, spec);
            SelectionRow {
                segments: d,
                loss,
                penalty: pen,
                criterion: loss + pen,
            }
        })
        .collect();
    let mut best: Option<&SelectionRow> = None;
    for row in &table {
        if row.criterion.is_finite() && best.is_none_or(|b| row.criterion < b.criterion) {
            best = Some(row);
        }
    }
    let selected = best
        .ok_or_else(|| Error::infeasible("no feasible segment count"))?
        .segments;
    Ok(SelectionResult {
        selected,
        c1: spec.c1,
        c2: spec.c2,
        table,
        slope_fit: None,
    })
}

/// Calibrates the constants with [`slope_heuristic`], then [`select`]s.
pub fn select_with_slope_heuristic(
    losses: &[f64],
    n: usize,
    min_len: usize,
) -> Result<SelectionResult> {
    let fit = slope_heuristic(losses, n, min_len)?;
    let max_segments = losses
        .iter()
        .rposition(|l| l.is_finite())
        .map_or(0, |i| i + 1);
    let spec = PenaltySpec::new(fit.c1, fit.c2, n, max_segments, min_len)?;
    let mut result = select(losses, &spec)?;
    result.slope_fit = Some(fit);
    Ok(result)
}
