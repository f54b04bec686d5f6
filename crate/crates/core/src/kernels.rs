// SPDX-License-Identifier: MIT OR Apache-2.0

//! Kernel families and Gram-matrix access.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

/// A positive semi-definite kernel on real vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `<x, y>`
    Linear,
    /// `exp(-|x - y|^2 / bandwidth)`
    Gaussian { bandwidth: f64 },
    /// `exp(-|x - y| / bandwidth)`
    Laplace { bandwidth: f64 },
    /// `exp(-<x, y> / bandwidth)`
    Exponential { bandwidth: f64 },
    /// Energy-distance kernel `(rho(x, x0) + rho(y, x0) - rho(x, y)) / 2`
    /// with `rho(x, y) = |x - y|^alpha`.
    Energy { alpha: f64, anchor: Vec<f64> },
    /// Sum of kernels, each acting on its own set of coordinates.
    Sum(Vec<SumComponent>),
}

/// One summand of [`KernelSpec::Sum`]. Coordinates are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumComponent {
    pub coords: Vec<usize>,
    pub kernel: KernelSpec,
}

impl KernelSpec {
    /// Energy kernel with the zero anchor.
    pub fn energy(alpha: f64, dim: usize) -> Self {
        Self::Energy {
            alpha,
            anchor: vec![0.0; dim],
        }
    }

    /// Sum of one copy of `kernel` per coordinate.
    pub fn per_coordinate(kernel: KernelSpec, dim: usize) -> Self {
        Self::Sum(
            (0..dim)
                .map(|c| SumComponent {
                    coords: vec![c],
                    kernel: kernel.with_dim(1),
                })
                .collect(),
        )
    }

    /// Same family with an anchor resized to `dim` (energy only).
    fn with_dim(&self, dim: usize) -> Self {
        match self {
            Self::Energy { alpha, anchor } => Self::Energy {
                alpha: *alpha,
                anchor: if anchor.len() == dim {
                    anchor.clone()
                } else {
                    vec![anchor.first().copied().unwrap_or(0.0); dim]
                },
            },
            other => other.clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Gaussian { .. } => "gaussian",
            Self::Laplace { .. } => "laplace",
            Self::Exponential { .. } => "exponential",
            Self::Energy { .. } => "energy",
            Self::Sum(_) => "sum",
        }
    }

    /// Checks hyperparameters and that the kernel applies to vectors of length `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let bandwidth_ok = |b: f64| {
            if b.is_finite() && b > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidKernel(format!(
                    "bandwidth must be finite and > 0; got {b}"
                )))
            }
        };
        match self {
            Self::Linear => Ok(()),
            Self::Gaussian { bandwidth }
            | Self::Laplace { bandwidth }
            | Self::Exponential { bandwidth } => bandwidth_ok(*bandwidth),
            Self::Energy { alpha, anchor } => {
                if !(alpha.is_finite() && *alpha > 0.0 && *alpha < 2.0) {
                    return Err(Error::InvalidKernel(format!(
                        "energy exponent must lie in (0, 2); got {alpha}"
                    )));
                }
                if anchor.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: anchor.len(),
                    });
                }
                if anchor.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidKernel("energy anchor must be finite".into()));
                }
                Ok(())
            }
            Self::Sum(children) => {
                if children.is_empty() {
                    return Err(Error::InvalidKernel("sum kernel has no components".into()));
                }
                let mut seen = vec![false; dim];
                for child in children {
                    if matches!(child.kernel, Self::Sum(_)) {
                        return Err(Error::InvalidKernel(
                            "nested sum kernels are not supported".into(),
                        ));
                    }
                    if child.coords.is_empty() {
                        return Err(Error::InvalidKernel(
                            "sum component with no coordinates".into(),
                        ));
                    }
                    for &c in &child.coords {
                        if c >= dim {
                            return Err(Error::InvalidKernel(format!(
                                "coordinate {c} out of range for dimension {dim}"
                            )));
                        }
                        if std::mem::replace(&mut seen[c], true) {
                            return Err(Error::InvalidKernel(format!(
                                "coordinate {c} assigned to more than one sum component"
                            )));
                        }
                    }
                    child.kernel.validate(child.coords.len())?;
                }
                Ok(())
            }
        }
    }

    /// Evaluates `k(x, y)` after checking dimensions and finiteness.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        for (row, v) in [x, y].into_iter().enumerate() {
            if let Some(col) = v.iter().position(|e| !e.is_finite()) {
                return Err(Error::NonFinite { row, col });
            }
        }
        self.validate(x.len())?;
        Ok(self.eval_unchecked(x, y))
    }

    /// Evaluation without validation; callers guarantee a validated spec.
    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Self::Sum(children) => children
                .iter()
                .map(|c| c.kernel.eval_on(x, y, Coords::Subset(&c.coords)))
                .sum(),
            _ => self.eval_on(x, y, Coords::All),
        }
    }

    #[inline]
    fn eval_on(&self, x: &[f64], y: &[f64], view: Coords<'_>) -> f64 {
        match self {
            Self::Linear => dot(x, y, view),
            Self::Gaussian { bandwidth } => (-sq_dist(x, y, view) / bandwidth).exp(),
            Self::Laplace { bandwidth } => (-sq_dist(x, y, view).sqrt() / bandwidth).exp(),
            Self::Exponential { bandwidth } => (-dot(x, y, view) / bandwidth).exp(),
            Self::Energy { alpha, anchor } => {
                let rho = |s: f64| energy_power(s, *alpha);
                0.5 * (rho(sq_dist_anchor(x, anchor, view)) + rho(sq_dist_anchor(y, anchor, view))
                    - rho(sq_dist(x, y, view)))
            }
            Self::Sum(_) => unreachable!("nested sums are rejected by validate"),
        }
    }
}

#[derive(Clone, Copy)]
enum Coords<'a> {
    All,
    Subset(&'a [usize]),
}

#[inline]
fn dot(x: &[f64], y: &[f64], view: Coords<'_>) -> f64 {
    match view {
        Coords::All => x.iter().zip(y).map(|(a, b)| a * b).sum(),
        Coords::Subset(idx) => idx.iter().map(|&c| x[c] * y[c]).sum(),
    }
}

#[inline]
fn sq_dist(x: &[f64], y: &[f64], view: Coords<'_>) -> f64 {
    match view {
        Coords::All => x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum(),
        Coords::Subset(idx) => idx.iter().map(|&c| (x[c] - y[c]) * (x[c] - y[c])).sum(),
    }
}

/// Squared distance to an anchor expressed in the view's local coordinates.
#[inline]
fn sq_dist_anchor(x: &[f64], anchor: &[f64], view: Coords<'_>) -> f64 {
    match view {
        Coords::All => sq_dist(x, anchor, Coords::All),
        Coords::Subset(idx) => idx
            .iter()
            .zip(anchor)
            .map(|(&c, a)| (x[c] - a) * (x[c] - a))
            .sum(),
    }
}

/// `|v|^alpha` from `|v|^2`.
#[inline]
fn energy_power(sq: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        sq.sqrt()
    } else {
        sq.powf(0.5 * alpha)
    }
}

/// Index-based access to a (possibly implicit) Gram matrix.
pub trait Gram {
    /// Number of observations.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn entry(&self, i: usize, j: usize) -> f64;

    fn diag(&self, i: usize) -> f64 {
        self.entry(i, i)
    }

    /// `out[i] += scale * entry(i, j)` for `i < out.len()`.
    fn accumulate_column(&self, j: usize, scale: f64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o += scale * self.entry(i, j);
        }
    }
}

/// The Gram matrix of a kernel on a signal, evaluated on demand.
#[derive(Debug, Clone, Copy)]
pub struct KernelGram<'a> {
    kernel: &'a KernelSpec,
    signal: &'a Signal,
}

impl<'a> KernelGram<'a> {
    pub fn new(kernel: &'a KernelSpec, signal: &'a Signal) -> Result<Self> {
        kernel.validate(signal.dim())?;
        Ok(Self { kernel, signal })
    }

    pub fn kernel(&self) -> &KernelSpec {
        self.kernel
    }

    pub fn signal(&self) -> &Signal {
        self.signal
    }
}

impl Gram for KernelGram<'_> {
    #[inline]
    fn len(&self) -> usize {
        self.signal.len()
    }

    #[inline]
    fn entry(&self, i: usize, j: usize) -> f64 {
        self.kernel
            .eval_unchecked(self.signal.row(i), self.signal.row(j))
    }

    fn accumulate_column(&self, j: usize, scale: f64, out: &mut [f64]) {
        let rows = &self.signal.as_slice()[..out.len() * self.signal.dim()];
        if self.signal.dim() == 1 {
            // Univariate fast paths; the generic loop below handles the rest.
            let y = self.signal.row(j)[0];
            match *self.kernel {
                KernelSpec::Linear => {
                    for (o, &x) in out.iter_mut().zip(rows) {
                        *o += scale * (x * y);
                    }
                    return;
                }
                KernelSpec::Gaussian { bandwidth } => {
                    for (o, &x) in out.iter_mut().zip(rows) {
                        *o += scale * (-((x - y) * (x - y)) / bandwidth).exp();
                    }
                    return;
                }
                _ => {}
            }
        }
        let y = self.signal.row(j);
        for (o, x) in out.iter_mut().zip(rows.chunks_exact(self.signal.dim())) {
            *o += scale * self.kernel.eval_unchecked(x, y);
        }
    }
}

/// An explicitly stored symmetric `n x n` Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseGram {
    n: usize,
    data: Vec<f64>,
}

impl DenseGram {
    pub fn new(data: Vec<f64>, n: usize) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    /// Materializes any [`Gram`]; quadratic memory.
    pub fn from_gram(gram: &impl Gram) -> Self {
        let n = gram.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = gram.entry(i, j);
            }
        }
        Self { n, data }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

impl Gram for DenseGram {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

fn check_samples(a: &Signal, b: &Signal) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

fn mean_cross(kernel: &KernelSpec, a: &Signal, b: &Signal) -> f64 {
    let mut total = 0.0;
    for x in a.rows() {
        for y in b.rows() {
            total += kernel.eval_unchecked(x, y);
        }
    }
    total / (a.len() * b.len()) as f64
}

/// V-statistic estimate of the squared RKHS distance between the mean
/// embeddings of two samples: `mean(K_AA) + mean(K_BB) - 2 mean(K_AB)`.
pub fn empirical_mmd_sq(kernel: &KernelSpec, a: &Signal, b: &Signal) -> Result<f64> {
    check_samples(a, b)?;
    kernel.validate(a.dim())?;
    Ok(mean_cross(kernel, a, a) + mean_cross(kernel, b, b) - 2.0 * mean_cross(kernel, a, b))
}

/// V-statistic energy distance `2 E|X - Y|^a - E|X - X'|^a - E|Y - Y'|^a`.
pub fn empirical_energy_distance(alpha: f64, a: &Signal, b: &Signal) -> Result<f64> {
    check_samples(a, b)?;
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidKernel(format!(
            "energy exponent must lie in (0, 2); got {alpha}"
        )));
    }
    let mean_rho = |u: &Signal, v: &Signal| {
        let mut total = 0.0;
        for x in u.rows() {
            for y in v.rows() {
                total += energy_power(sq_dist(x, y, Coords::All), alpha);
            }
        }
        total / (u.len() * v.len()) as f64
    };
    Ok(2.0 * mean_rho(a, b) - mean_rho(a, a) - mean_rho(b, b))
}
