// SPDX-License-Identifier: MIT OR Apache-2.0

//! The `segment` subcommand.

use std::time::Instant;

use kernseg_core::lowrank::EmbeddingBlock;
use kernseg_core::model_selection::{self, SelectionRow, SlopeFit, SLOPE_MIN_SEGMENTS};
use kernseg_core::{
    binary_segmentation, kernseg, kernseg_constrained, mad_scale, nystrom_embed, KernelGram,
    KernelSpec, LandmarkRule, PenaltySpec, Segmentation, SelectionResult, Signal,
};
use serde::Serialize;

use crate::args::{Algorithm, LandmarkChoice, SegmentArgs};
use crate::error::{CliError, CliResult};

/// Everything `segment` prints. Field order is the JSON key order; timing
/// lives under `diagnostics.timing` and is the only nondeterministic part.
#[derive(Debug, Clone, Serialize)]
pub struct SegmentReport {
    pub n: usize,
    pub dim: usize,
    pub algorithm: &'static str,
    pub kernel: KernelSpec,
    pub max_segments: usize,
    pub min_segment_length: usize,
    pub landmarks: Option<LandmarkReport>,
    pub scaling: ScalingReport,
    pub segmentations: Vec<SegmentationEntry>,
    pub selection: Option<SelectionReport>,
    pub warnings: Vec<String>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Serialize)]
pub struct LandmarkReport {
    pub rule: &'static str,
    pub requested: usize,
    pub rank: usize,
    pub dropped_eigenvalues: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub enabled: bool,
    /// Noise scale each coordinate was divided by.
    pub scales: Vec<f64>,
    /// Coordinates with a zero scale estimate, left as they were.
    pub unscaled: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentationEntry {
    pub segments: usize,
    pub loss: f64,
    /// 1-based first index of every segment.
    pub starts: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionReport {
    pub segments: usize,
    pub starts: Vec<usize>,
    /// `"slope_heuristic"` or `"fixed"`.
    pub method: &'static str,
    pub c1: f64,
    pub c2: f64,
    /// Constants were calibrated on binary-segmentation losses, which are
    /// upper bounds of the exact ones.
    pub approximate_losses: bool,
    pub slope_fit: Option<SlopeFit>,
    pub table: Vec<SelectionRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    /// Bytes of the dynamic-programming tables or of the stored features.
    pub peak_table_bytes: usize,
    /// Bytes of per-column working buffers on the exact path.
    pub working_bytes: usize,
    /// First segment count binary segmentation could not reach.
    pub exhausted_at: Option<usize>,
    pub timing: Timing,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub scaling_seconds: f64,
    pub segmentation_seconds: f64,
    pub selection_seconds: f64,
    pub total_seconds: f64,
}

/// Resolves `auto` against the kernel's coordinate blocks.
pub fn landmark_rule(choice: LandmarkChoice, kernel: &KernelSpec, dim: usize) -> LandmarkRule {
    match choice {
        LandmarkChoice::Grid => LandmarkRule::Grid,
        LandmarkChoice::Stride => LandmarkRule::Stride,
        LandmarkChoice::Auto => {
            let single = match kernel {
                KernelSpec::Sum(parts) => parts.iter().all(|p| p.coords.len() == 1),
                _ => dim == 1,
            };
            if single {
                LandmarkRule::Grid
            } else {
                LandmarkRule::Stride
            }
        }
    }
}

fn rule_name(rule: &LandmarkRule) -> &'static str {
    match rule {
        LandmarkRule::Grid => "grid",
        LandmarkRule::Stride => "stride",
        LandmarkRule::Points(_) => "points",
    }
}

/// Bytes of the column state used by the exact path.
pub fn exact_working_bytes(n: usize) -> usize {
    3 * (n + 1) * std::mem::size_of::<f64>()
}

struct Path {
    losses: Vec<f64>,
    segmentations: Vec<Segmentation>,
    table_bytes: usize,
    working_bytes: usize,
    exhausted_at: Option<usize>,
    landmarks: Option<LandmarkReport>,
}

fn run_exact(gram: &KernelGram<'_>, dmax: usize, min_len: usize) -> CliResult<Path> {
    let n = gram.signal().len();
    let dp = if min_len == 1 {
        kernseg(gram, dmax)?
    } else {
        kernseg_constrained(gram, dmax, min_len)?
    };
    let segmentations = (1..=dmax)
        .map(|d| dp.backtrack(d))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Path {
        losses: dp.final_losses(),
        segmentations,
        table_bytes: dp.table_bytes(),
        working_bytes: exact_working_bytes(n),
        exhausted_at: None,
        landmarks: None,
    })
}

fn run_lowrank(signal: &Signal, kernel: &KernelSpec, args: &SegmentArgs) -> CliResult<Path> {
    let rule = landmark_rule(args.landmark_rule, kernel, signal.dim());
    let p = args.landmark_count();
    let embedding = nystrom_embed(signal, kernel, &rule, p)?;
    let result = binary_segmentation(&embedding, args.dmax, args.min_seg_len)?;
    let blocks: &[EmbeddingBlock] = embedding.blocks();
    Ok(Path {
        losses: result.losses,
        segmentations: result.segmentations,
        table_bytes: embedding.stored_numbers() * std::mem::size_of::<f64>(),
        working_bytes: 0,
        exhausted_at: result.exhausted_at,
        landmarks: Some(LandmarkReport {
            rule: rule_name(&rule),
            requested: p,
            rank: blocks.iter().map(|b| b.rank).sum(),
            dropped_eigenvalues: embedding.dropped(),
        }),
    })
}

/// Runs the whole pipeline on an already parsed signal.
pub fn run_segment(args: &SegmentArgs, raw: &Signal) -> CliResult<SegmentReport> {
    let start = Instant::now();
    let n = raw.len();
    let dim = raw.dim();
    let mut warnings = Vec::new();
    if args.algorithm == Algorithm::Exact && args.landmarks.is_some() {
        warnings.push("--landmarks is ignored by the exact algorithm".to_string());
    }
    if args.dmax == 0 || args.min_seg_len == 0 {
        return Err(CliError::Infeasible(
            "--dmax and --min-seg-len must be >= 1".into(),
        ));
    }
    if args.dmax.saturating_mul(args.min_seg_len) > n {
        return Err(CliError::Infeasible(format!(
            "{} segments of length >= {} do not fit in n={n}",
            args.dmax, args.min_seg_len
        )));
    }

    let (signal, scaling) = if args.no_scale {
        let report = ScalingReport {
            enabled: false,
            scales: vec![1.0; dim],
            unscaled: Vec::new(),
        };
        (raw.clone(), report)
    } else {
        let scaled = mad_scale(raw)?;
        let report = ScalingReport {
            enabled: true,
            scales: scaled.scales,
            unscaled: scaled.unscaled,
        };
        (scaled.signal, report)
    };
    if !scaling.unscaled.is_empty() {
        warnings.push(format!(
            "zero noise estimate on coordinates {:?}; left unscaled",
            scaling.unscaled
        ));
    }
    let scaling_seconds = start.elapsed().as_secs_f64();

    let kernel = args.kernel.build(dim);
    kernel.validate(dim)?;
    let seg_start = Instant::now();
    let path = match args.algorithm {
        Algorithm::Exact => run_exact(
            &KernelGram::new(&kernel, &signal)?,
            args.dmax,
            args.min_seg_len,
        )?,
        Algorithm::LowrankBinseg => run_lowrank(&signal, &kernel, args)?,
    };
    let segmentation_seconds = seg_start.elapsed().as_secs_f64();
    if let Some(d) = path.exhausted_at {
        warnings.push(format!(
            "binary segmentation could not reach {d} segments; larger counts repeat the last segmentation"
        ));
    }

    let sel_start = Instant::now();
    let approximate = args.algorithm == Algorithm::LowrankBinseg;
    let selection = select(args, &path, n, approximate, &mut warnings)?;
    let selection_seconds = sel_start.elapsed().as_secs_f64();

    let segmentations = path
        .segmentations
        .iter()
        .zip(&path.losses)
        .enumerate()
        .map(|(i, (seg, &loss))| SegmentationEntry {
            segments: i + 1,
            loss,
            starts: seg.starts().to_vec(),
        })
        .collect();

    Ok(SegmentReport {
        n,
        dim,
        algorithm: args.algorithm.name(),
        kernel,
        max_segments: args.dmax,
        min_segment_length: args.min_seg_len,
        landmarks: path.landmarks.clone(),
        scaling,
        segmentations,
        selection,
        warnings,
        diagnostics: Diagnostics {
            peak_table_bytes: path.table_bytes,
            working_bytes: path.working_bytes,
            exhausted_at: path.exhausted_at,
            timing: Timing {
                scaling_seconds,
                segmentation_seconds,
                selection_seconds,
                total_seconds: start.elapsed().as_secs_f64(),
            },
        },
    })
}

fn select(
    args: &SegmentArgs,
    path: &Path,
    n: usize,
    approximate: bool,
    warnings: &mut Vec<String>,
) -> CliResult<Option<SelectionReport>> {
    let (result, method): (SelectionResult, _) = match (args.c1, args.c2) {
        (Some(c1), Some(c2)) => {
            let spec = PenaltySpec::new(c1, c2, n, args.dmax, args.min_seg_len)?;
            (model_selection::select(&path.losses, &spec)?, "fixed")
        }
        (None, None) if args.dmax == 1 => {
            let spec = PenaltySpec::new(0.0, 0.0, n, 1, args.min_seg_len)?;
            (model_selection::select(&path.losses, &spec)?, "fixed")
        }
        (None, None) if args.dmax < SLOPE_MIN_SEGMENTS => {
            warnings.push(format!(
                "no segment count selected: the slope heuristic needs --dmax >= {SLOPE_MIN_SEGMENTS}; pass --c1 and --c2"
            ));
            return Ok(None);
        }
        (None, None) => {
            if approximate {
                warnings
                    .push("penalty constants were calibrated on approximate losses".to_string());
            }
            let result =
                model_selection::select_with_slope_heuristic(&path.losses, n, args.min_seg_len)?;
            (result, "slope_heuristic")
        }
        _ => {
            return Err(CliError::Input(
                "--c1 and --c2 must be given together".into(),
            ))
        }
    };
    let starts = path.segmentations[result.selected - 1].starts().to_vec();
    Ok(Some(SelectionReport {
        segments: result.selected,
        starts,
        method,
        c1: result.c1,
        c2: result.c2,
        approximate_losses: approximate && method == "slope_heuristic",
        slope_fit: result.slope_fit,
        table: result.table,
    }))
}
