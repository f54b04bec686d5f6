// SPDX-License-Identifier: MIT OR Apache-2.0

//! The `bench` subcommand: wall-clock scaling of the segmenters.

use std::time::Instant;

use kernseg_core::{
    binary_segmentation, kernseg, mad_scale, nystrom_embed, simulate, KernelGram, KernelSpec,
    Signal,
};
use serde::Serialize;

use crate::args::{Algorithm, BenchArgs};
use crate::error::CliResult;
use crate::segment::{exact_working_bytes, landmark_rule};

/// Change-points planted in every benchmark signal.
pub const BENCH_CHANGES: usize = 10;

/// One grid cell. `p` is empty on the exact path.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub algorithm: &'static str,
    pub n: usize,
    pub p: Option<usize>,
    pub seconds: f64,
    pub peak_table_bytes: usize,
}

/// Predicted table bytes of one cell, used against the memory budget.
pub fn predicted_bytes(
    algorithm: Algorithm,
    n: usize,
    dmax: usize,
    p: usize,
    blocks: usize,
) -> usize {
    let f = std::mem::size_of::<f64>();
    match algorithm {
        Algorithm::Exact => {
            let width = n + 1;
            dmax * width * f
                + dmax.saturating_sub(1) * width * std::mem::size_of::<u32>()
                + exact_working_bytes(n)
        }
        Algorithm::LowrankBinseg => {
            let rank = p * blocks;
            (n * rank + (n + 1) * rank + (n + 1)) * f
        }
    }
}

/// Times one run; signal generation and scaling are not timed.
pub fn time_cell(
    algorithm: Algorithm,
    signal: &Signal,
    kernel: &KernelSpec,
    args: &BenchArgs,
) -> CliResult<(f64, usize)> {
    let n = signal.len();
    let dmax = args.dmax.min(n);
    match algorithm {
        Algorithm::Exact => {
            let gram = KernelGram::new(kernel, signal)?;
            let start = Instant::now();
            let dp = kernseg(&gram, dmax)?;
            let seconds = start.elapsed().as_secs_f64();
            Ok((seconds, dp.table_bytes() + exact_working_bytes(n)))
        }
        Algorithm::LowrankBinseg => {
            let rule = landmark_rule(args.landmark_rule, kernel, signal.dim());
            let p = args.landmarks_for(n);
            let start = Instant::now();
            let embedding = nystrom_embed(signal, kernel, &rule, p)?;
            let result = binary_segmentation(&embedding, dmax, 1)?;
            let seconds = start.elapsed().as_secs_f64();
            std::hint::black_box(&result);
            Ok((
                seconds,
                embedding.stored_numbers() * std::mem::size_of::<f64>(),
            ))
        }
    }
}

/// Runs the grid sequentially. Skipped cells are reported through `notice`.
pub fn run_bench(args: &BenchArgs, mut notice: impl FnMut(&str)) -> CliResult<Vec<BenchRow>> {
    args.validate()?;
    let mut rows = Vec::new();
    for &n in &args.lengths {
        let synthetic =
            simulate::mean_shift(n, BENCH_CHANGES.min(n.saturating_sub(1)), 5.0, args.seed)?;
        let signal = mad_scale(&synthetic.signal)?.signal;
        let kernel = args.kernel.build(signal.dim());
        kernel.validate(signal.dim())?;
        let blocks = match &kernel {
            KernelSpec::Sum(parts) => parts.len(),
            _ => 1,
        };
        for &algorithm in &args.algorithms {
            let p = args.landmarks_for(n);
            let predicted = predicted_bytes(algorithm, n, args.dmax.min(n), p, blocks);
            if predicted as u64 > args.memory_budget {
                notice(&format!(
                    "skipping {} at n={n}: {predicted} bytes exceed the budget of {}",
                    algorithm.name(),
                    args.memory_budget
                ));
                continue;
            }
            let mut times = Vec::with_capacity(args.repeats);
            let mut bytes = 0;
            for _ in 0..args.repeats {
                let (seconds, b) = time_cell(algorithm, &signal, &kernel, args)?;
                times.push(seconds);
                bytes = b;
            }
            times.sort_by(f64::total_cmp);
            rows.push(BenchRow {
                algorithm: algorithm.name(),
                n,
                p: (algorithm == Algorithm::LowrankBinseg).then_some(p),
                seconds: times[times.len() / 2],
                peak_table_bytes: bytes,
            });
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with a header line.
pub fn write_rows(rows: &[BenchRow], writer: impl std::io::Write) -> CliResult<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for row in rows {
        csv.serialize(row)
            .map_err(|e| crate::error::CliError::Internal(e.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}
