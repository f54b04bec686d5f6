// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::error::{Error, Result};
use crate::segmentation::Segmentation;

/// Frobenius distance between the block matrices of two segmentations.
///
/// The matrix of a segmentation has entry `1 / len` wherever `i` and `j`
/// share a segment of length `len`, so its squared norm is the segment
/// count and
/// `d^2 = D + D* - 2 sum_{k,k'} |seg_k & seg*_k'|^2 / (len_k len*_k')`.
/// Only overlapping pairs contribute, found by one merge sweep.
pub fn frobenius_distance(a: &Segmentation, b: &Segmentation) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let sa: Vec<(usize, usize)> = a.bounds().collect();
    let sb: Vec<(usize, usize)> = b.bounds().collect();
    let (mut i, mut j) = (0, 0);
    let mut cross = 0.0;
    while i < sa.len() && j < sb.len() {
        let (s1, e1) = sa[i];
        let (s2, e2) = sb[j];
        let overlap = (e1.min(e2) - s1.max(s2)) as f64;
        cross += overlap * overlap / ((e1 - s1) as f64 * (e2 - s2) as f64);
        if e1 <= e2 {
            i += 1;
        }
        if e2 <= e1 {
            j += 1;
        }
    }
    let sq = sa.len() as f64 + sb.len() as f64 - 2.0 * cross;
    Ok(sq.max(0.0).sqrt())
}

/// Mean squared gap between fitted and true values.
pub fn empirical_risk(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: estimate.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::invalid_input("empty input"));
    }
    let total: f64 = estimate
        .iter()
        .zip(truth)
        .map(|(f, t)| (f - t) * (f - t))
        .sum();
    Ok(total / truth.len() as f64)
}

/// Replaces every value by the mean of its segment.
pub fn piecewise_mean_fit(values: &[f64], seg: &Segmentation) -> Result<Vec<f64>> {
    if values.len() != seg.n() {
        return Err(Error::DimensionMismatch {
            expected: seg.n(),
            got: values.len(),
        });
    }
    let mut fitted = Vec::with_capacity(values.len());
    for (s, e) in seg.bounds() {
        let mean = values[s..e].iter().sum::<f64>() / (e - s) as f64;
        fitted.extend(std::iter::repeat_n(mean, e - s));
    }
    Ok(fitted)
}
