// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exact segmentation by dynamic programming over kernel segment costs.
//!
//! All indices here are 0-based and half-open: the cost `C(s, e)` covers
//! observations `s..e`, and `L[d][e]` is the best loss of the first `e`
//! observations cut into `d` segments. The 1-based change-point convention
//! only appears in [`Segmentation`].
//!
//! [`kernseg`] never stores the cost matrix. It keeps one column state,
//! `A[i] = -k(i, i) + 2 * sum_{j=i}^{e-1} k(i, j)`, from which every cost
//! `C(s, e) = sum_{i=s}^{e-1} k(i, i) - sum_{i=s}^{e-1} A[i] / (e - s)` of the
//! current column follows by one backward sweep. Moving to `e + 1` costs one
//! kernel evaluation per row.

use crate::error::{Error, Result};
use crate::kernels::Gram;
use crate::segmentation::Segmentation;

/// Default largest `n` accepted by [`naive_dp`].
pub const NAIVE_DP_MAX_N: usize = 4000;

/// `C(start, end)` by explicit double summation over the Gram matrix.
pub fn segment_cost_direct(gram: &impl Gram, start: usize, end: usize) -> Result<f64> {
    check_range(gram.len(), start, end)?;
    let mut diag = 0.0;
    let mut block = 0.0;
    for i in start..end {
        diag += gram.diag(i);
        for j in start..end {
            block += gram.entry(i, j);
        }
    }
    Ok(diag - block / (end - start) as f64)
}

/// Sum of [`segment_cost_direct`] over the segments of `seg`.
pub fn segmentation_loss(gram: &impl Gram, seg: &Segmentation) -> Result<f64> {
    if seg.n() != gram.len() {
        return Err(Error::DimensionMismatch {
            expected: gram.len(),
            got: seg.n(),
        });
    }
    seg.bounds()
        .map(|(s, e)| segment_cost_direct(gram, s, e))
        .sum()
}

fn check_range(n: usize, start: usize, end: usize) -> Result<()> {
    if start >= end || end > n {
        return Err(Error::out_of_bounds(format!(
            "segment {start}..{end} invalid for n={n}"
        )));
    }
    Ok(())
}

/// Running state of one cost-matrix column.
#[derive(Debug, Clone)]
pub struct CostColumn {
    a: Vec<f64>,
    diag_prefix: Vec<f64>,
}

impl CostColumn {
    /// Empty state (`end == 0`) with room for `capacity` observations.
    pub fn with_capacity(capacity: usize) -> Self {
        let mut diag_prefix = Vec::with_capacity(capacity + 1);
        diag_prefix.push(0.0);
        Self {
            a: Vec::with_capacity(capacity),
            diag_prefix,
        }
    }

    /// Exclusive end of the current column.
    pub fn end(&self) -> usize {
        self.a.len()
    }

    /// Moves the column from `end` to `end + 1`.
    pub fn advance(&mut self, gram: &impl Gram) -> Result<()> {
        let t = self.end();
        if t >= gram.len() {
            return Err(Error::out_of_bounds(format!(
                "no column after end={t} for n={}",
                gram.len()
            )));
        }
        let k_tt = gram.diag(t);
        self.a.push(-k_tt);
        gram.accumulate_column(t, 2.0, &mut self.a);
        let last = self.diag_prefix[t];
        self.diag_prefix.push(last + k_tt);
        Ok(())
    }

    /// `A[i]` for the current column.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// `C(start, end)` read from the state in `O(end - start)`.
    pub fn cost(&self, start: usize) -> Result<f64> {
        let end = self.end();
        check_range(end, start, end)?;
        let sum: f64 = self.a[start..end].iter().sum();
        Ok(self.diag_prefix[end] - self.diag_prefix[start] - sum / (end - start) as f64)
    }

    /// Writes `C(s, end)` into `out[s]` for every `s < end`.
    ///
    /// The suffix sums of `A` use Neumaier compensation.
    pub fn costs_into(&self, out: &mut [f64]) {
        let end = self.end();
        assert_eq!(out.len(), end, "cost buffer must match the column length");
        let total = self.diag_prefix[end];
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for s in (0..end).rev() {
            let v = self.a[s];
            let t = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - t) + v;
            } else {
                comp += (v - t) + sum;
            }
            sum = t;
            out[s] = (total - self.diag_prefix[s]) - (sum + comp) / (end - s) as f64;
        }
    }
}

/// Best losses for every segment count up to `max_segments`, with
/// backpointers for recovering the attaining segmentations.
#[derive(Debug, Clone)]
pub struct DpResult {
    n: usize,
    max_segments: usize,
    min_len: usize,
    /// Row `d - 1` holds `L[d][0..=n]`.
    losses: Vec<f64>,
    /// Row `d - 2` holds the start of the last segment for `L[d][e]`, `d >= 2`.
    back: Vec<u32>,
}

impl DpResult {
    fn allocate(n: usize, max_segments: usize, min_len: usize) -> Self {
        let width = n + 1;
        Self {
            n,
            max_segments,
            min_len,
            losses: vec![f64::INFINITY; max_segments * width],
            back: vec![0; (max_segments - 1) * width],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_segments(&self) -> usize {
        self.max_segments
    }

    pub fn min_len(&self) -> usize {
        self.min_len
    }

    /// `L[d][end]`; `+inf` when no admissible segmentation exists.
    pub fn loss(&self, d: usize, end: usize) -> f64 {
        assert!((1..=self.max_segments).contains(&d) && end <= self.n);
        self.losses[(d - 1) * (self.n + 1) + end]
    }

    /// Best loss of the whole signal in `d` segments.
    pub fn final_loss(&self, d: usize) -> f64 {
        self.loss(d, self.n)
    }

    /// `final_loss(d)` for `d = 1..=max_segments`.
    pub fn final_losses(&self) -> Vec<f64> {
        (1..=self.max_segments)
            .map(|d| self.final_loss(d))
            .collect()
    }

    /// Optimal segmentation of the whole signal into `d` segments.
    pub fn backtrack(&self, d: usize) -> Result<Segmentation> {
        if d == 0 || d > self.max_segments {
            return Err(Error::infeasible(format!(
                "segment count {d} outside 1..={}",
                self.max_segments
            )));
        }
        if !self.final_loss(d).is_finite() {
            return Err(Error::infeasible(format!(
                "no segmentation of n={} into {d} segments of length >= {}",
                self.n, self.min_len
            )));
        }
        let width = self.n + 1;
        let mut boundaries = Vec::with_capacity(d - 1);
        let mut end = self.n;
        for k in (2..=d).rev() {
            end = self.back[(k - 2) * width + end] as usize;
            boundaries.push(end);
        }
        boundaries.reverse();
        Segmentation::from_boundaries(&boundaries, self.n)
    }

    /// Numbers held by the loss and backpointer tables.
    pub fn table_numbers(&self) -> usize {
        self.losses.len() + self.back.len()
    }

    /// Bytes held by the loss and backpointer tables.
    pub fn table_bytes(&self) -> usize {
        self.losses.len() * std::mem::size_of::<f64>()
            + self.back.len() * std::mem::size_of::<u32>()
    }

    fn row_mut(&mut self, d: usize) -> &mut [f64] {
        let width = self.n + 1;
        &mut self.losses[(d - 1) * width..d * width]
    }

    fn set(&mut self, d: usize, end: usize, value: f64, start: usize) {
        let width = self.n + 1;
        self.losses[(d - 1) * width + end] = value;
        if d >= 2 {
            self.back[(d - 2) * width + end] = start as u32;
        }
    }
}

/// Upper bound on the numbers held by [`kernseg_constrained`]: both tables
/// plus the column state and the cost buffer.
pub const fn working_numbers_bound(n: usize, max_segments: usize) -> usize {
    2 * max_segments * (n + 1) + 3 * (n + 1)
}

fn check_problem(n: usize, max_segments: usize, min_len: usize) -> Result<()> {
    if max_segments == 0 {
        return Err(Error::infeasible("at least one segment is required"));
    }
    if min_len == 0 {
        return Err(Error::infeasible("minimum segment length must be >= 1"));
    }
    if n > u32::MAX as usize {
        return Err(Error::invalid_input(format!("signal too long: n={n}")));
    }
    if max_segments.saturating_mul(min_len) > n {
        return Err(Error::infeasible(format!(
            "{max_segments} segments of length >= {min_len} do not fit in n={n}"
        )));
    }
    Ok(())
}

/// Smallest `prev[i] + cost[i]` and the first index attaining it.
#[inline]
fn argmin_sum(prev: &[f64], cost: &[f64]) -> (f64, usize) {
    const LANES: usize = 8;
    debug_assert_eq!(prev.len(), cost.len());
    // Each lane keeps its first minimum; lane `l` of chunk `c` is index `c * LANES + l`.
    let mut lanes = [f64::INFINITY; LANES];
    let mut chunk_of = [0usize; LANES];
    let mut p_chunks = prev.chunks_exact(LANES);
    let mut c_chunks = cost.chunks_exact(LANES);
    for (c, (p, k)) in (&mut p_chunks).zip(&mut c_chunks).enumerate() {
        for l in 0..LANES {
            let v = p[l] + k[l];
            let better = v < lanes[l];
            lanes[l] = if better { v } else { lanes[l] };
            chunk_of[l] = if better { c } else { chunk_of[l] };
        }
    }
    let mut best = f64::INFINITY;
    let mut idx = 0;
    for l in 0..LANES {
        let i = chunk_of[l] * LANES + l;
        if lanes[l] < best || (lanes[l] == best && i < idx) {
            best = lanes[l];
            idx = i;
        }
    }
    let tail = prev.len() - p_chunks.remainder().len();
    for (j, (p, k)) in p_chunks
        .remainder()
        .iter()
        .zip(c_chunks.remainder())
        .enumerate()
    {
        let v = p + k;
        if v < best {
            best = v;
            idx = tail + j;
        }
    }
    if best == f64::INFINITY {
        return (best, 0);
    }
    (best, idx)
}

/// Exact best segmentations in `1..=max_segments` segments.
///
/// `O(max_segments * n^2)` time, `O(max_segments * n)` memory.
pub fn kernseg(gram: &impl Gram, max_segments: usize) -> Result<DpResult> {
    let n = gram.len();
    check_problem(n, max_segments, 1)?;
    let mut result = DpResult::allocate(n, max_segments, 1);
    let mut column = CostColumn::with_capacity(n);
    let mut costs = vec![0.0; n];
    for end in 1..=n {
        column.advance(gram)?;
        let costs = &mut costs[..end];
        column.costs_into(costs);
        result.set(1, end, costs[0], 0);
        for d in 2..=max_segments.min(end) {
            // The last segment starts at s in [d - 1, end - 1].
            let lo = d - 1;
            let (value, idx) = {
                let prev = &result.row_mut(d - 1)[lo..end];
                argmin_sum(prev, &costs[lo..end])
            };
            result.set(d, end, value, lo + idx);
        }
    }
    Ok(result)
}

/// Exact best segmentations whose segments all have at least `min_len`
/// observations. Identical to [`kernseg`] when `min_len == 1`.
pub fn kernseg_constrained(
    gram: &impl Gram,
    max_segments: usize,
    min_len: usize,
) -> Result<DpResult> {
    let n = gram.len();
    check_problem(n, max_segments, min_len)?;
    let mut result = DpResult::allocate(n, max_segments, min_len);
    let mut column = CostColumn::with_capacity(n);
    let mut costs = vec![0.0; n];
    for end in 1..=n {
        column.advance(gram)?;
        if end < min_len {
            continue;
        }
        let costs = &mut costs[..end];
        column.costs_into(costs);
        result.set(1, end, costs[0], 0);
        for d in 2..=max_segments.min(end / min_len) {
            // d - 1 segments before s, and the last one needs min_len points.
            let lo = (d - 1) * min_len;
            let hi = end - min_len;
            let (value, idx) = {
                let prev = &result.row_mut(d - 1)[lo..=hi];
                argmin_sum(prev, &costs[lo..=hi])
            };
            result.set(d, end, value, lo + idx);
        }
    }
    Ok(result)
}

/// Textbook dynamic programming over a fully stored cost matrix.
///
/// Quadratic memory; kept as a reference implementation. Refuses `n`
/// above [`NAIVE_DP_MAX_N`].
pub fn naive_dp(gram: &impl Gram, max_segments: usize) -> Result<DpResult> {
    naive_dp_with_cap(gram, max_segments, NAIVE_DP_MAX_N)
}

pub fn naive_dp_with_cap(gram: &impl Gram, max_segments: usize, cap: usize) -> Result<DpResult> {
    let n = gram.len();
    if n > cap {
        return Err(Error::invalid_input(format!(
            "naive dynamic programming refuses n={n} above the cap {cap}"
        )));
    }
    check_problem(n, max_segments, 1)?;
    let width = n + 1;
    // Column-major: cost[e * width + s] = C(s, e), built from block sums
    // B(s, e + 1) = B(s, e) + 2 * sum_{i=s}^{e-1} k(i, e) + k(e, e).
    let mut cost = vec![0.0; width * width];
    let mut diag_prefix = vec![0.0; width];
    for e in 0..n {
        diag_prefix[e + 1] = diag_prefix[e] + gram.diag(e);
    }
    for e in 1..=n {
        let last = e - 1;
        let k_ll = gram.diag(last);
        let mut cross = 0.0;
        for s in (0..e).rev() {
            let block = if s == last {
                k_ll
            } else {
                cross += gram.entry(s, last);
                cost[last * width + s] + 2.0 * cross + k_ll
            };
            cost[e * width + s] = block;
        }
    }
    for e in 1..=n {
        for s in 0..e {
            let block = cost[e * width + s];
            cost[e * width + s] = diag_prefix[e] - diag_prefix[s] - block / (e - s) as f64;
        }
    }

    let mut result = DpResult::allocate(n, max_segments, 1);
    for e in 1..=n {
        result.set(1, e, cost[e * width], 0);
    }
    for d in 2..=max_segments {
        for e in d..=n {
            let mut best = f64::INFINITY;
            let mut arg = d - 1;
            for s in d - 1..e {
                let v = result.loss(d - 1, s) + cost[e * width + s];
                if v < best {
                    best = v;
                    arg = s;
                }
            }
            result.set(d, e, best, arg);
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{KernelGram, KernelSpec};
    use crate::signal::Signal;

    fn gram_of(values: Vec<f64>, kernel: &KernelSpec) -> (Signal, KernelSpec) {
        (Signal::univariate(values).unwrap(), kernel.clone())
    }

    #[test]
    fn direct_cost_examples() {
        let (signal, k) = gram_of(vec![0.0, 2.0], &KernelSpec::Linear);
        let gram = KernelGram::new(&k, &signal).unwrap();
        assert_eq!(segment_cost_direct(&gram, 0, 2).unwrap(), 2.0);
        assert_eq!(segment_cost_direct(&gram, 1, 2).unwrap(), 0.0);

        let (signal, k) = gram_of(vec![0.0, 1.0], &KernelSpec::Gaussian { bandwidth: 1.0 });
        let gram = KernelGram::new(&k, &signal).unwrap();
        let c = segment_cost_direct(&gram, 0, 2).unwrap();
        assert!((c - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((c - 0.6321).abs() < 1e-4);
        assert!(segment_cost_direct(&gram, 1, 1).is_err());
        assert!(segment_cost_direct(&gram, 0, 3).is_err());
    }

    #[test]
    fn column_state_two_points() {
        let (signal, k) = gram_of(vec![0.3, -0.8], &KernelSpec::Laplace { bandwidth: 0.9 });
        let gram = KernelGram::new(&k, &signal).unwrap();
        let mut col = CostColumn::with_capacity(2);
        col.advance(&gram).unwrap();
        assert_eq!(col.cost(0).unwrap(), 0.0);
        col.advance(&gram).unwrap();
        let (k11, k22, k12) = (gram.entry(0, 0), gram.entry(1, 1), gram.entry(0, 1));
        let expected = k11 + k22 - 0.5 * (k11 + k22 + 2.0 * k12);
        assert!((col.cost(0).unwrap() - expected).abs() < 1e-15);
        assert_eq!(col.cost(1).unwrap(), 0.0);
        assert!(col.advance(&gram).is_err());
    }

    #[test]
    fn constant_signal_has_zero_costs() {
        let (signal, k) = gram_of(vec![1.5; 12], &KernelSpec::Linear);
        let gram = KernelGram::new(&k, &signal).unwrap();
        let mut col = CostColumn::with_capacity(12);
        for end in 1..=12 {
            col.advance(&gram).unwrap();
            let mut out = vec![0.0; end];
            col.costs_into(&mut out);
            assert!(out.iter().all(|c| c.abs() < 1e-12), "{out:?}");
        }
    }

    #[test]
    fn step_signal() {
        let (signal, k) = gram_of(vec![0.0, 0.0, 0.0, 5.0, 5.0, 5.0], &KernelSpec::Linear);
        let gram = KernelGram::new(&k, &signal).unwrap();
        let dp = kernseg(&gram, 3).unwrap();
        assert_eq!(dp.final_loss(2), 0.0);
        assert_eq!(dp.backtrack(2).unwrap().starts(), &[1, 4]);
        assert_eq!(dp.backtrack(1).unwrap().starts(), &[1]);
        let constrained = kernseg_constrained(&gram, 3, 1).unwrap();
        assert_eq!(constrained.backtrack(2).unwrap().starts(), &[1, 4]);
    }

    #[test]
    fn single_point() {
        let (signal, k) = gram_of(vec![4.0], &KernelSpec::Gaussian { bandwidth: 1.0 });
        let gram = KernelGram::new(&k, &signal).unwrap();
        for dp in [kernseg(&gram, 1).unwrap(), naive_dp(&gram, 1).unwrap()] {
            assert_eq!(dp.final_loss(1), 0.0);
        }
    }

    #[test]
    fn infeasible_configurations() {
        let (signal, k) = gram_of(vec![0.0; 10], &KernelSpec::Linear);
        let gram = KernelGram::new(&k, &signal).unwrap();
        assert!(matches!(kernseg(&gram, 0), Err(Error::Infeasible(_))));
        assert!(matches!(kernseg(&gram, 11), Err(Error::Infeasible(_))));
        assert!(matches!(
            kernseg_constrained(&gram, 4, 3),
            Err(Error::Infeasible(_))
        ));
        assert!(naive_dp_with_cap(&gram, 2, 5).is_err());
    }

    #[test]
    fn constrained_segments_respect_min_length() {
        let values: Vec<f64> = (0..40).map(|i| ((i * 7919) % 13) as f64).collect();
        let (signal, k) = gram_of(values, &KernelSpec::Gaussian { bandwidth: 2.0 });
        let gram = KernelGram::new(&k, &signal).unwrap();
        let dp = kernseg_constrained(&gram, 6, 5).unwrap();
        for d in 1..=6 {
            let seg = dp.backtrack(d).unwrap();
            assert_eq!(seg.num_segments(), d);
            assert!(seg.min_length() >= 5);
            let loss = segmentation_loss(&gram, &seg).unwrap();
            assert!((loss - dp.final_loss(d)).abs() <= 1e-9 * loss.abs().max(1.0));
        }
        // A 6x5 table fits n=40 but some cells of smaller ends are infeasible.
        assert!(dp.loss(6, 29).is_infinite());
        assert!(dp.loss(6, 30).is_finite());
    }

    #[test]
    fn argmin_prefers_smallest_index() {
        let prev = vec![3.0, 1.0, 2.0, 1.0, 0.5, 0.5, 9.0, 0.0, 0.0, 1.0];
        let cost = vec![0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 1.0, 1.0, 0.0];
        assert_eq!(argmin_sum(&prev, &cost), (1.0, 1));
        assert_eq!(argmin_sum(&[f64::INFINITY; 3], &[0.0; 3]).0, f64::INFINITY);
    }

    #[test]
    fn table_size_matches_bound() {
        let (signal, k) = gram_of(vec![0.0; 50], &KernelSpec::Linear);
        let gram = KernelGram::new(&k, &signal).unwrap();
        let dp = kernseg(&gram, 7).unwrap();
        assert!(dp.table_numbers() + 3 * 51 <= working_numbers_bound(50, 7));
    }
}
