//! Per-run CSV traces: `k,E,grad_norm,fev,gev,elapsed_ms`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use lmoq_core::{RunRecord, TraceRow};

use crate::error::BenchError;

pub const TRACE_HEADER: &str = "k,E,grad_norm,fev,gev,elapsed_ms";

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_row<W: Write>(out: &mut W, row: &TraceRow) -> std::io::Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{:.3}",
        row.k,
        fmt_f64(row.loss),
        fmt_f64(row.grad_norm),
        row.fev,
        row.gev,
        row.elapsed_ms
    )
}

pub fn write_trace<W: Write>(record: &RunRecord, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for row in &record.trace {
        write_row(&mut out, row)?;
    }
    out.flush()
}

pub fn write_trace_file(record: &RunRecord, path: &Path) -> Result<(), BenchError> {
    let file = File::create(path).map_err(BenchError::io(path))?;
    write_trace(record, BufWriter::new(file)).map_err(BenchError::io(path))
}
