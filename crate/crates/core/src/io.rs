//! CSV and JSON output.

use crate::error::Result;
use crate::feedback::SweepResult;
use crate::trajectory::TrajectoryRecord;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// One row per step: `t, x, z, dV, dW, dWF, dQ, dU`.
pub fn write_trajectory_csv<W: Write>(rec: &TrajectoryRecord, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "z", "dV", "dW", "dWF", "dQ", "dU"])?;
    for i in 0..rec.len() {
        let (s, smp, l) = (rec.states[i], rec.samples[i], rec.ledgers[i]);
        w.write_record(
            [rec.times[i], s.x, s.z, smp.dv, l.dw, l.dwf, l.dq, l.du].map(|v| v.to_string()),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Columns named by `header`, rows zipped from `columns`.
pub fn write_columns_csv<W: Write>(header: &[&str], columns: &[&[f64]], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    let rows = columns.iter().map(|c| c.len()).min().unwrap_or(0);
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| c[i].to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Heat-map grid `A, B, contrast`.
pub fn write_sweep_csv<W: Write>(sweep: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["A", "B", "contrast"])?;
    for p in &sweep.points {
        w.write_record([p.gain, p.offset, p.contrast].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}
