// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A time-ordered `n x q` matrix of observations, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    data: Vec<f64>,
    n: usize,
    q: usize,
}

impl Signal {
    /// Builds a signal from row-major data. Every entry must be finite.
    pub fn new(data: Vec<f64>, n: usize, q: usize) -> Result<Self> {
        if n == 0 || q == 0 {
            return Err(Error::invalid_input(format!(
                "signal must have at least one row and one column; got {n}x{q}"
            )));
        }
        if data.len() != n * q {
            return Err(Error::DimensionMismatch {
                expected: n * q,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / q,
                col: pos % q,
            });
        }
        Ok(Self { data, n, q })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let q = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * q);
        for row in rows {
            if row.len() != q {
                return Err(Error::DimensionMismatch {
                    expected: q,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(data, rows.len(), q)
    }

    /// Single-coordinate signal.
    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(values, n, 1)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.q..(t + 1) * self.q]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.q)
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows().map(|r| r[c]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Contiguous sub-signal of rows `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.n {
            return Err(Error::out_of_bounds(format!(
                "row range {start}..{end} invalid for n={}",
                self.n
            )));
        }
        Self::new(
            self.data[start * self.q..end * self.q].to_vec(),
            end - start,
            self.q,
        )
    }

    /// Restriction to the listed coordinates, in the given order.
    pub fn select_columns(&self, coords: &[usize]) -> Result<Self> {
        if let Some(&bad) = coords.iter().find(|&&c| c >= self.q) {
            return Err(Error::out_of_bounds(format!(
                "coordinate {bad} out of range for q={}",
                self.q
            )));
        }
        let data = self
            .rows()
            .flat_map(|r| coords.iter().map(move |&c| r[c]))
            .collect();
        Self::new(data, self.n, coords.len())
    }
}

/// Result of [`mad_scale`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSignal {
    pub signal: Signal,
    /// Estimated noise standard deviation per coordinate.
    pub scales: Vec<f64>,
    /// Coordinates whose estimate was zero and were left untouched.
    pub unscaled: Vec<usize>,
}

/// Gaussian consistency factor of the median absolute deviation.
pub const MAD_CONSISTENCY: f64 = 1.4826;

/// Divides each coordinate by a difference-based noise estimate.
///
/// The estimate uses disjoint successive differences `x[2i+1] - x[2i]`
/// (an odd trailing point is dropped), whose MAD is rescaled by
/// [`MAD_CONSISTENCY`] and divided by `sqrt(2)`. Mean shifts affect at most
/// one difference each, so the estimate is robust to change-points.
pub fn mad_scale(signal: &Signal) -> Result<ScaledSignal> {
    let n = signal.len();
    if n < 4 {
        return Err(Error::invalid_input(format!(
            "noise scaling needs at least 4 points; got {n}"
        )));
    }
    let q = signal.dim();
    let mut scales = Vec::with_capacity(q);
    let mut unscaled = Vec::new();
    for c in 0..q {
        let diffs: Vec<f64> = (0..n / 2)
            .map(|i| signal.row(2 * i + 1)[c] - signal.row(2 * i)[c])
            .collect();
        let sigma = mad(&diffs) * MAD_CONSISTENCY / std::f64::consts::SQRT_2;
        if sigma <= 0.0 {
            unscaled.push(c);
        }
        scales.push(sigma);
    }
    let data = signal
        .rows()
        .flat_map(|r| {
            r.iter()
                .zip(&scales)
                .map(|(&v, &s)| if s > 0.0 { v / s } else { v })
        })
        .collect();
    Ok(ScaledSignal {
        signal: Signal::new(data, n, q)?,
        scales,
        unscaled,
    })
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    values.sort_unstable_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

fn mad(values: &[f64]) -> f64 {
    let mut buf = values.to_vec();
    let center = median(&mut buf);
    for v in buf.iter_mut() {
        *v = (*v - center).abs();
    }
    median(&mut buf)
}
