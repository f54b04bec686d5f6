// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition of `1..=n` into contiguous segments.
///
/// Starts are stored 1-based, `starts[0] == 1`, with the implicit end
/// `n + 1`. Segment `d` covers `starts[d]..starts[d + 1]` (1-based, end
/// exclusive), which is the 0-based half-open range
/// `starts[d] - 1..starts[d + 1] - 1` returned by [`Segmentation::bounds`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segmentation {
    starts: Vec<usize>,
    n: usize,
}

impl Segmentation {
    pub fn new(starts: Vec<usize>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid_input("segmentation of an empty signal"));
        }
        if starts.first() != Some(&1) {
            return Err(Error::invalid_input(format!(
                "first segment must start at 1; got {starts:?}"
            )));
        }
        if starts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid_input(format!(
                "segment starts must be strictly increasing; got {starts:?}"
            )));
        }
        if *starts.last().unwrap() > n {
            return Err(Error::out_of_bounds(format!(
                "segment start {} exceeds n={n}",
                starts.last().unwrap()
            )));
        }
        Ok(Self { starts, n })
    }

    /// The single-segment partition.
    pub fn whole(n: usize) -> Self {
        Self {
            starts: vec![1],
            n: n.max(1),
        }
    }

    /// Builds from sorted 0-based interior boundaries (each the first
    /// 0-based index of a new segment).
    pub fn from_boundaries(boundaries: &[usize], n: usize) -> Result<Self> {
        let mut starts = Vec::with_capacity(boundaries.len() + 1);
        starts.push(1);
        starts.extend(boundaries.iter().map(|b| b + 1));
        Self::new(starts, n)
    }

    /// 1-based segment starts, beginning with 1.
    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    /// 1-based change-points, i.e. every start except the first.
    pub fn change_points(&self) -> &[usize] {
        &self.starts[1..]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_segments(&self) -> usize {
        self.starts.len()
    }

    /// 0-based half-open `(start, end)` pairs.
    pub fn bounds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let ends = self.starts[1..]
            .iter()
            .copied()
            .chain(std::iter::once(self.n + 1));
        self.starts.iter().zip(ends).map(|(&s, e)| (s - 1, e - 1))
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.bounds().map(|(s, e)| e - s).collect()
    }

    pub fn min_length(&self) -> usize {
        self.bounds().map(|(s, e)| e - s).min().unwrap_or(0)
    }

    /// Whether every change-point of `self` is also one of `other`.
    pub fn is_refined_by(&self, other: &Segmentation) -> bool {
        self.n == other.n
            && self
                .starts
                .iter()
                .all(|s| other.starts.binary_search(s).is_ok())
    }
}
