// SPDX-License-Identifier: MIT OR Apache-2.0

//! Low-rank (Nystrom) features and binary segmentation on them.
//!
//! With `K ~ Z'Z` every segment cost reduces to
//! `sum |Z_i|^2 - |sum Z_i|^2 / len`, so prefix sums of the features and of
//! their squared norms give each cost in `O(rank)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Gram, KernelSpec};
use crate::segmentation::Segmentation;
use crate::signal::Signal;

/// Eigenvalues at or below this fraction of the largest are discarded by
/// the pseudo-inverse.
pub const EIGEN_CUTOFF: f64 = 1e-10;

/// Default number of landmarks.
pub const DEFAULT_LANDMARKS: usize = 100;

const CHUNK: usize = 2048;

/// How landmark points are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandmarkRule {
    /// `p` equally spaced values between the observed minimum and maximum.
    /// Needs every kernel block to act on a single coordinate.
    Grid,
    /// Every `ceil(n / p)`-th observation, starting with the first.
    Stride,
    /// Explicit landmark vectors of the full signal dimension.
    Points(Vec<Vec<f64>>),
}

/// Landmarks and retained rank for one kernel block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingBlock {
    /// Signal coordinates the block acts on (0-based).
    pub coords: Vec<usize>,
    /// Landmarks in the block's own coordinates.
    pub landmarks: Vec<Vec<f64>>,
    pub rank: usize,
    /// Eigenvalues discarded by the pseudo-inverse.
    pub dropped: usize,
}

/// Low-rank features `Z_i` with `k(x_i, x_j) ~ <Z_i, Z_j>`.
#[derive(Debug, Clone)]
pub struct Embedding {
    n: usize,
    rank: usize,
    /// Column `i` (contiguous) is `Z_i`.
    features: Vec<f64>,
    blocks: Vec<EmbeddingBlock>,
    /// Row `t` holds `sum_{i<t} Z_i`.
    prefix_sum: Vec<f64>,
    /// `sum_{i<t} |Z_i|^2`.
    prefix_sqnorm: Vec<f64>,
}

/// Segment costs queried by index range (0-based, half-open).
pub trait SegmentCost {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cost(&self, start: usize, end: usize) -> f64;
}

impl Embedding {
    fn from_features(
        n: usize,
        rank: usize,
        features: Vec<f64>,
        blocks: Vec<EmbeddingBlock>,
    ) -> Self {
        let mut prefix_sum = vec![0.0; (n + 1) * rank];
        let mut prefix_sqnorm = vec![0.0; n + 1];
        for i in 0..n {
            let z = &features[i * rank..(i + 1) * rank];
            let (done, rest) = prefix_sum.split_at_mut((i + 1) * rank);
            let prev = &done[i * rank..];
            for ((out, p), v) in rest[..rank].iter_mut().zip(prev).zip(z) {
                *out = p + v;
            }
            prefix_sqnorm[i + 1] = prefix_sqnorm[i] + z.iter().map(|v| v * v).sum::<f64>();
        }
        Self {
            n,
            rank,
            features,
            blocks,
            prefix_sum,
            prefix_sqnorm,
        }
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Feature dimension after the pseudo-inverse cutoff.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn feature(&self, i: usize) -> &[f64] {
        &self.features[i * self.rank..(i + 1) * self.rank]
    }

    pub fn blocks(&self) -> &[EmbeddingBlock] {
        &self.blocks
    }

    /// Eigenvalues dropped over all blocks.
    pub fn dropped(&self) -> usize {
        self.blocks.iter().map(|b| b.dropped).sum()
    }

    /// Numbers stored by the features and prefix tables.
    pub fn stored_numbers(&self) -> usize {
        self.features.len() + self.prefix_sum.len() + self.prefix_sqnorm.len()
    }

    /// Segment cost on the features, `O(rank)`.
    pub fn segment_cost(&self, start: usize, end: usize) -> Result<f64> {
        if start >= end || end > self.n {
            return Err(Error::out_of_bounds(format!(
                "segment {start}..{end} invalid for n={}",
                self.n
            )));
        }
        Ok(self.cost_unchecked(start, end))
    }

    #[inline]
    fn cost_unchecked(&self, start: usize, end: usize) -> f64 {
        let r = self.rank;
        let hi = &self.prefix_sum[end * r..(end + 1) * r];
        let lo = &self.prefix_sum[start * r..(start + 1) * r];
        let sq: f64 = hi.iter().zip(lo).map(|(a, b)| (a - b) * (a - b)).sum();
        (self.prefix_sqnorm[end] - self.prefix_sqnorm[start]) - sq / (end - start) as f64
    }
}

impl SegmentCost for Embedding {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn cost(&self, start: usize, end: usize) -> f64 {
        self.cost_unchecked(start, end)
    }
}

/// The approximated Gram matrix `Z'Z`.
impl Gram for Embedding {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn entry(&self, i: usize, j: usize) -> f64 {
        self.feature(i)
            .iter()
            .zip(self.feature(j))
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// Nystrom features from `p` landmarks.
///
/// For a sum kernel each component is embedded on its own coordinates and
/// the feature vectors are concatenated, so inner products add up.
pub fn nystrom_embed(
    signal: &Signal,
    kernel: &KernelSpec,
    rule: &LandmarkRule,
    p: usize,
) -> Result<Embedding> {
    kernel.validate(signal.dim())?;
    let n = signal.len();
    let q = signal.dim();
    let parts: Vec<(Vec<usize>, &KernelSpec)> = match kernel {
        KernelSpec::Sum(children) => children
            .iter()
            .map(|c| (c.coords.clone(), &c.kernel))
            .collect(),
        other => vec![((0..q).collect(), other)],
    };
    if let LandmarkRule::Points(points) = rule {
        if points.is_empty() {
            return Err(Error::invalid_input("no landmark points given"));
        }
        if let Some(bad) = points.iter().find(|pt| pt.len() != q) {
            return Err(Error::DimensionMismatch {
                expected: q,
                got: bad.len(),
            });
        }
    } else if p == 0 {
        return Err(Error::invalid_input("at least one landmark is required"));
    }

    let mut factors = Vec::with_capacity(parts.len());
    for (coords, block_kernel) in &parts {
        let landmarks = choose_landmarks(signal, coords, rule, p)?;
        let (weights, dropped) = pseudo_inverse_root(block_kernel, &landmarks)?;
        factors.push((coords.clone(), *block_kernel, landmarks, weights, dropped));
    }
    let rank: usize = factors.iter().map(|f| f.3.nrows()).sum();
    let mut features = vec![0.0; n * rank];
    let mut offset = 0;
    let mut local = vec![0.0; q];
    for (coords, block_kernel, landmarks, weights, _) in &factors {
        let r = weights.nrows();
        let m = landmarks.len();
        for chunk_start in (0..n).step_by(CHUNK) {
            let chunk_end = (chunk_start + CHUNK).min(n);
            let width = chunk_end - chunk_start;
            let mut cross = DMatrix::<f64>::zeros(m, width);
            for (c, i) in (chunk_start..chunk_end).enumerate() {
                let row = signal.row(i);
                for (slot, &coord) in local.iter_mut().zip(coords) {
                    *slot = row[coord];
                }
                let x = &local[..coords.len()];
                for (a, u) in landmarks.iter().enumerate() {
                    cross[(a, c)] = block_kernel.eval_unchecked(u, x);
                }
            }
            let z = weights * cross;
            for c in 0..width {
                let i = chunk_start + c;
                features[i * rank + offset..i * rank + offset + r]
                    .copy_from_slice(z.column(c).as_slice());
            }
        }
        offset += r;
    }
    let blocks = factors
        .into_iter()
        .map(|(coords, _, landmarks, weights, dropped)| EmbeddingBlock {
            coords,
            rank: weights.nrows(),
            landmarks,
            dropped,
        })
        .collect();
    Ok(Embedding::from_features(n, rank, features, blocks))
}

fn choose_landmarks(
    signal: &Signal,
    coords: &[usize],
    rule: &LandmarkRule,
    p: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = signal.len();
    let restrict = |row: &[f64]| coords.iter().map(|&c| row[c]).collect::<Vec<f64>>();
    match rule {
        LandmarkRule::Grid => {
            if coords.len() != 1 {
                return Err(Error::invalid_input(
                    "grid landmarks need a kernel block on a single coordinate; use the stride rule",
                ));
            }
            let values = signal.column(coords[0]);
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if p == 1 {
                return Ok(vec![vec![0.5 * (lo + hi)]]);
            }
            let step = (hi - lo) / (p - 1) as f64;
            Ok((0..p).map(|a| vec![lo + step * a as f64]).collect())
        }
        LandmarkRule::Stride => {
            if p > n {
                return Err(Error::invalid_input(format!(
                    "stride rule needs p <= n; got p={p}, n={n}"
                )));
            }
            let stride = n.div_ceil(p);
            Ok((0..n)
                .step_by(stride)
                .map(|i| restrict(signal.row(i)))
                .collect())
        }
        LandmarkRule::Points(points) => Ok(points.iter().map(|pt| restrict(pt)).collect()),
    }
}

/// `Lambda_r^{-1/2} U_r'` for the landmark Gram matrix, eigenvalues sorted
/// in decreasing order.
fn pseudo_inverse_root(
    kernel: &KernelSpec,
    landmarks: &[Vec<f64>],
) -> Result<(DMatrix<f64>, usize)> {
    let m = landmarks.len();
    let gram = DMatrix::from_fn(m, m, |a, b| {
        kernel.eval_unchecked(&landmarks[a], &landmarks[b])
    });
    let eigen = SymmetricEigen::new(gram);
    let lambda_max = eigen
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if lambda_max.is_nan() || lambda_max <= 0.0 {
        return Err(Error::DegenerateLandmarks);
    }
    let mut kept: Vec<usize> = (0..m)
        .filter(|&a| {
            let l = eigen.eigenvalues[a];
            l > 0.0 && l > EIGEN_CUTOFF * lambda_max
        })
        .collect();
    kept.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));
    let weights = DMatrix::from_fn(kept.len(), m, |r, a| {
        let idx = kept[r];
        eigen.eigenvectors[(a, idx)] / eigen.eigenvalues[idx].sqrt()
    });
    Ok((weights, m - kept.len()))
}

/// The best way to cut one segment in two (0-based, half-open bounds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitCandidate {
    pub start: usize,
    pub end: usize,
    /// First index of the right-hand child.
    pub split: usize,
    /// Cost reduction `C(start, end) - C(start, split) - C(split, end)`,
    /// clamped at zero.
    pub gain: f64,
}

/// Best split of `start..end` with both children at least `min_len` long;
/// `None` when no such split exists. Ties go to the smallest split.
pub fn best_split(
    costs: &impl SegmentCost,
    start: usize,
    end: usize,
    min_len: usize,
) -> Result<Option<SplitCandidate>> {
    if start >= end || end > costs.len() {
        return Err(Error::out_of_bounds(format!(
            "segment {start}..{end} invalid for n={}",
            costs.len()
        )));
    }
    let min_len = min_len.max(1);
    if end - start < 2 * min_len {
        return Ok(None);
    }
    let mut best = f64::INFINITY;
    let mut split = start + min_len;
    for t in start + min_len..=end - min_len {
        let v = costs.cost(start, t) + costs.cost(t, end);
        if v < best {
            best = v;
            split = t;
        }
    }
    let gain = (costs.cost(start, end) - best).max(0.0);
    Ok(Some(SplitCandidate {
        start,
        end,
        split,
        gain,
    }))
}

/// Nested segmentations produced by greedy binary segmentation.
#[derive(Debug, Clone)]
pub struct BinsegResult {
    /// Entry `d - 1` has `d` segments, unless splitting stopped early.
    pub segmentations: Vec<Segmentation>,
    /// Loss of each entry of `segmentations`.
    pub losses: Vec<f64>,
    /// Splits in the order they were committed.
    pub splits: Vec<SplitCandidate>,
    /// First segment count that could not be reached, if any. Later
    /// entries repeat the last reachable segmentation.
    pub exhausted_at: Option<usize>,
}

#[derive(Debug)]
struct Ranked(SplitCandidate);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    // Max-heap on gain; equal gains favour the leftmost segment.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .gain
            .total_cmp(&other.0.gain)
            .then_with(|| other.0.start.cmp(&self.0.start))
    }
}

/// Greedy binary segmentation for `1..=max_segments` segments.
///
/// Each segment enters the heap once, when it is created, and leaves it
/// when split, so no stale candidates can surface.
pub fn binary_segmentation(
    costs: &impl SegmentCost,
    max_segments: usize,
    min_len: usize,
) -> Result<BinsegResult> {
    let n = costs.len();
    if max_segments == 0 {
        return Err(Error::infeasible("at least one segment is required"));
    }
    if n == 0 {
        return Err(Error::invalid_input("empty signal"));
    }
    let min_len = min_len.max(1);
    if min_len > n {
        return Err(Error::infeasible(format!(
            "minimum segment length {min_len} exceeds n={n}"
        )));
    }
    let mut heap = BinaryHeap::new();
    if let Some(c) = best_split(costs, 0, n, min_len)? {
        heap.push(Ranked(c));
    }
    let mut boundaries: Vec<usize> = Vec::new();
    let mut segmentations = Vec::with_capacity(max_segments);
    let mut losses = Vec::with_capacity(max_segments);
    let mut splits = Vec::new();
    let mut exhausted_at = None;
    segmentations.push(Segmentation::whole(n));
    losses.push(costs.cost(0, n));
    for d in 2..=max_segments {
        let Some(Ranked(chosen)) = heap.pop() else {
            exhausted_at.get_or_insert(d);
            segmentations.push(segmentations.last().unwrap().clone());
            losses.push(*losses.last().unwrap());
            continue;
        };
        let pos = boundaries.partition_point(|&b| b < chosen.split);
        boundaries.insert(pos, chosen.split);
        splits.push(chosen);
        for (s, e) in [(chosen.start, chosen.split), (chosen.split, chosen.end)] {
            if let Some(c) = best_split(costs, s, e, min_len)? {
                heap.push(Ranked(c));
            }
        }
        let seg = Segmentation::from_boundaries(&boundaries, n)?;
        losses.push(seg.bounds().map(|(s, e)| costs.cost(s, e)).sum());
        segmentations.push(seg);
    }
    Ok(BinsegResult {
        segmentations,
        losses,
        splits,
        exhausted_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_dp::{kernseg, segment_cost_direct};
    use crate::kernels::{DenseGram, KernelGram};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn step_embedding() -> Embedding {
        let signal = Signal::univariate(vec![0.0, 0.0, 5.0, 5.0]).unwrap();
        nystrom_embed(
            &signal,
            &KernelSpec::Linear,
            &LandmarkRule::Points(vec![vec![1.0]]),
            1,
        )
        .unwrap()
    }

    #[test]
    fn best_split_of_a_step() {
        let emb = step_embedding();
        let c = best_split(&emb, 0, 4, 1).unwrap().unwrap();
        assert_eq!(c.split, 2);
        assert!((c.gain - 25.0).abs() < 1e-12);
        assert!((emb.segment_cost(0, 4).unwrap() - 25.0).abs() < 1e-12);
        assert!(best_split(&emb, 0, 3, 2).unwrap().is_none());
        assert!(best_split(&emb, 0, 5, 1).is_err());
    }

    #[test]
    fn constant_segment_has_zero_gain() {
        let signal = Signal::univariate(vec![2.0; 9]).unwrap();
        let emb = nystrom_embed(
            &signal,
            &KernelSpec::Gaussian { bandwidth: 1.0 },
            &LandmarkRule::Grid,
            5,
        )
        .unwrap();
        let c = best_split(&emb, 0, 9, 1).unwrap().unwrap();
        // Prefix-sum rounding leaves the costs at ~1e-15 instead of exactly zero.
        assert!(c.gain < 1e-12, "{c:?}");
        // Grid on a constant signal collapses to rank one.
        assert_eq!(emb.rank(), 1);
        assert_eq!(emb.dropped(), 4);
    }

    #[test]
    fn rank_one_formula() {
        let signal = Signal::univariate(vec![0.2, -0.7, 1.4, 0.9]).unwrap();
        let kernel = KernelSpec::Laplace { bandwidth: 1.5 };
        let u = vec![0.5];
        let emb =
            nystrom_embed(&signal, &kernel, &LandmarkRule::Points(vec![u.clone()]), 1).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let k = |a: &[f64], b: &[f64]| kernel.eval(a, b).unwrap();
                let expected = k(signal.row(i), &u) * k(&u, signal.row(j)) / k(&u, &u);
                assert!((emb.entry(i, j) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn full_landmarks_reproduce_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..50)
            .map(|i| i as f64 * 0.8 + rng.random::<f64>() * 0.1)
            .collect();
        let signal = Signal::univariate(values).unwrap();
        let kernel = KernelSpec::Gaussian { bandwidth: 1.0 };
        let emb = nystrom_embed(&signal, &kernel, &LandmarkRule::Stride, 50).unwrap();
        assert_eq!(emb.dropped(), 0);
        let gram = KernelGram::new(&kernel, &signal).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..50 {
            for j in 0..50 {
                err = err.max((emb.entry(i, j) - gram.entry(i, j)).abs());
            }
        }
        assert!(err <= 1e-6, "max error {err}");
    }

    #[test]
    fn linear_kernel_on_basis_landmarks_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| vec![rng.random::<f64>() * 4.0, rng.random::<f64>()])
            .collect();
        let signal = Signal::from_rows(&rows).unwrap();
        let basis = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let emb = nystrom_embed(
            &signal,
            &KernelSpec::Linear,
            &LandmarkRule::Points(basis),
            2,
        )
        .unwrap();
        let gram = KernelGram::new(&KernelSpec::Linear, &signal).unwrap();
        for s in 0..30 {
            for e in s + 1..=30 {
                let exact = segment_cost_direct(&gram, s, e).unwrap();
                let approx = emb.segment_cost(s, e).unwrap();
                assert!((exact - approx).abs() <= 1e-9 * exact.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sum_kernel_blocks_concatenate() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![(i as f64).sin(), (i as f64 * 0.3).cos()])
            .collect();
        let signal = Signal::from_rows(&rows).unwrap();
        let kernel = KernelSpec::per_coordinate(KernelSpec::Gaussian { bandwidth: 1.0 }, 2);
        let emb = nystrom_embed(&signal, &kernel, &LandmarkRule::Grid, 6).unwrap();
        assert_eq!(emb.blocks().len(), 2);
        assert_eq!(
            emb.rank(),
            emb.blocks().iter().map(|b| b.rank).sum::<usize>()
        );
        let multi = nystrom_embed(
            &signal,
            &KernelSpec::Gaussian { bandwidth: 1.0 },
            &LandmarkRule::Grid,
            6,
        );
        assert!(multi.is_err());
    }

    #[test]
    fn embedded_cost_matches_double_sum_on_approximation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let values: Vec<f64> = (0..60).map(|_| rng.random::<f64>() * 3.0).collect();
        let signal = Signal::univariate(values).unwrap();
        let emb =
            nystrom_embed(&signal, &KernelSpec::energy(1.0, 1), &LandmarkRule::Grid, 7).unwrap();
        let dense = DenseGram::from_gram(&emb);
        for s in 0..60 {
            for e in s + 1..=60 {
                let direct = segment_cost_direct(&dense, s, e).unwrap();
                let fast = emb.segment_cost(s, e).unwrap();
                assert!(
                    (direct - fast).abs() <= 1e-9 * direct.abs().max(1.0),
                    "{s}..{e}: {direct} vs {fast}"
                );
            }
        }
    }

    /// Heap-free binary segmentation that rescans every open segment.
    fn rescan_binseg(
        costs: &impl SegmentCost,
        max_segments: usize,
        min_len: usize,
    ) -> Vec<SplitCandidate> {
        let mut open: Vec<SplitCandidate> = best_split(costs, 0, costs.len(), min_len)
            .unwrap()
            .into_iter()
            .collect();
        let mut order = Vec::new();
        for _ in 1..max_segments {
            let Some(pos) = (0..open.len()).max_by(|&a, &b| {
                open[a]
                    .gain
                    .total_cmp(&open[b].gain)
                    .then_with(|| open[b].start.cmp(&open[a].start))
            }) else {
                break;
            };
            let chosen = open.swap_remove(pos);
            order.push(chosen);
            for (s, e) in [(chosen.start, chosen.split), (chosen.split, chosen.end)] {
                open.extend(best_split(costs, s, e, min_len).unwrap());
            }
        }
        order
    }

    #[test]
    fn heap_order_matches_rescan() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..20 {
            let n = 80 + trial * 7;
            let values: Vec<f64> = (0..n)
                .map(|i| ((i / 13) % 3) as f64 * 1.5 + rng.random::<f64>())
                .collect();
            let signal = Signal::univariate(values).unwrap();
            let emb = nystrom_embed(
                &signal,
                &KernelSpec::Gaussian { bandwidth: 1.0 },
                &LandmarkRule::Grid,
                12,
            )
            .unwrap();
            for min_len in [1, 3] {
                let fast = binary_segmentation(&emb, 15, min_len).unwrap();
                assert_eq!(fast.splits, rescan_binseg(&emb, 15, min_len));
            }
        }
    }

    #[test]
    fn binseg_is_nested_and_bounded_by_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let values: Vec<f64> = (0..120)
            .map(|i| if i < 50 { 0.0 } else { 2.0 } + rng.random::<f64>())
            .collect();
        let signal = Signal::univariate(values).unwrap();
        let emb = nystrom_embed(
            &signal,
            &KernelSpec::Gaussian { bandwidth: 1.0 },
            &LandmarkRule::Grid,
            10,
        )
        .unwrap();
        let bs = binary_segmentation(&emb, 8, 1).unwrap();
        let dp = kernseg(&emb, 8).unwrap();
        assert_eq!(bs.segmentations[0].starts(), &[1]);
        for d in 1..=8 {
            let seg = &bs.segmentations[d - 1];
            assert_eq!(seg.num_segments(), d);
            if d > 1 {
                assert!(bs.segmentations[d - 2].is_refined_by(seg));
            }
            assert!(bs.losses[d - 1] >= dp.final_loss(d) - 1e-9 * dp.final_loss(d).abs());
        }
    }

    #[test]
    fn binseg_reports_exhaustion() {
        let signal = Signal::univariate((0..10).map(|i| i as f64).collect()).unwrap();
        let emb = nystrom_embed(&signal, &KernelSpec::Linear, &LandmarkRule::Grid, 2).unwrap();
        let bs = binary_segmentation(&emb, 6, 4).unwrap();
        // Only one split of length-10 into parts >= 4 is possible.
        assert_eq!(bs.exhausted_at, Some(3));
        assert_eq!(bs.segmentations.len(), 6);
        assert_eq!(bs.segmentations[5], bs.segmentations[1]);
        assert!(bs.segmentations.iter().all(|s| s.min_length() >= 4));
    }
}
