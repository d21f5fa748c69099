//! Mean training-error curves across trials.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use lmoq_core::{OptimizerKind, RunRecord};

use crate::error::BenchError;
use crate::trace::fmt_f64;

/// Mean `E` at each iteration over the trials of `kind` still running at
/// that iteration. The curve is as long as the longest trace.
pub fn mean_curve(records: &[RunRecord], kind: OptimizerKind) -> Result<Vec<(usize, f64)>, BenchError> {
    let runs: Vec<&RunRecord> = records.iter().filter(|r| r.kind == kind).collect();
    let len = runs.iter().map(|r| r.trace.len()).max().unwrap_or(0);
    if len == 0 {
        return Err(BenchError::EmptyRecords(kind.id().into()));
    }
    Ok((0..len)
        .map(|k| {
            let (sum, count) =
                runs.iter().filter_map(|r| r.trace.get(k)).fold((0.0, 0usize), |(s, c), row| (s + row.loss, c + 1));
            (k, sum / count as f64)
        })
        .collect())
}

/// Writes the two-column curve `iteration mean_E`.
pub fn export_curve<W: Write>(records: &[RunRecord], kind: OptimizerKind, mut out: W) -> Result<(), BenchError> {
    let curve = mean_curve(records, kind)?;
    let write = |out: &mut W| -> std::io::Result<()> {
        writeln!(out, "# iteration mean_E ({})", kind.label())?;
        for (k, e) in &curve {
            writeln!(out, "{k} {}", fmt_f64(*e))?;
        }
        out.flush()
    };
    write(&mut out).map_err(BenchError::io("<curve>"))
}

pub fn export_curve_file(records: &[RunRecord], kind: OptimizerKind, path: &Path) -> Result<(), BenchError> {
    let file = File::create(path).map_err(BenchError::io(path))?;
    export_curve(records, kind, BufWriter::new(file)).map_err(|e| match e {
        BenchError::Io { source, .. } => BenchError::Io { path: path.into(), source },
        other => other,
    })
}
