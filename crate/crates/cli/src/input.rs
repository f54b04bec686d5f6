// SPDX-License-Identifier: MIT OR Apache-2.0

//! CSV ingestion.

use std::io::Read;

use kernseg_core::Signal;

use crate::error::{CliError, CliResult};

/// Reads one observation per line, comma separated.
///
/// The first line is taken as a header when none of its fields is a
/// number. Every later line must hold as many numeric fields as the first
/// data line. Errors quote 1-based line numbers.
pub fn read_signal(reader: impl Read) -> CliResult<Signal> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut data = Vec::new();
    let mut width: Option<usize> = None;
    let mut rows = 0usize;
    let mut record = csv::StringRecord::new();
    let mut first = true;
    loop {
        let more = csv
            .read_record(&mut record)
            .map_err(|e| CliError::Input(format!("unreadable CSV: {e}")))?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if std::mem::take(&mut first) && record.iter().all(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        let q = *width.get_or_insert(record.len());
        if record.len() != q {
            return Err(CliError::Input(format!(
                "line {line}: expected {q} fields, found {}",
                record.len()
            )));
        }
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                CliError::Input(format!(
                    "line {line}, column {}: not a number: {field:?}",
                    col + 1
                ))
            })?;
            if !value.is_finite() {
                return Err(CliError::Input(format!(
                    "line {line}, column {}: non-finite value {field:?}",
                    col + 1
                )));
            }
            data.push(value);
        }
        rows += 1;
    }
    let q = width.ok_or_else(|| CliError::Input("input holds no data rows".into()))?;
    Ok(Signal::new(data, rows, q)?)
}

/// Writes a signal as headerless CSV, shortest round-trip formatting.
pub fn write_signal(signal: &Signal, writer: impl std::io::Write) -> CliResult<()> {
    let mut csv = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    for row in signal.rows() {
        csv.write_record(row.iter().map(f64::to_string))
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}
