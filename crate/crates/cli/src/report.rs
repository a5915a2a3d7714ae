//! Structured (JSON) and comma-separated report files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use hesimd_protocols::training::{EpochReport, TrainingReport};
use serde::Serialize;

use crate::error::Result;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// One flat CSV row per epoch; the initial evaluation is epoch 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRow {
    pub epoch: usize,
    pub fed_loss: f64,
    pub central_loss: f64,
    pub loss_gap: f64,
    pub fed_auc: Option<f64>,
    pub central_auc: Option<f64>,
    pub bytes: u64,
    pub comm_time: f64,
    pub add: u64,
    pub mult: u64,
    pub rot: u64,
    pub hst: u64,
}

impl From<&EpochReport> for EpochRow {
    fn from(e: &EpochReport) -> Self {
        Self {
            epoch: e.epoch,
            fed_loss: e.fed_loss,
            central_loss: e.central_loss,
            loss_gap: e.loss_gap,
            fed_auc: e.fed_auc,
            central_auc: e.central_auc,
            bytes: e.bytes,
            comm_time: e.comm_time,
            add: e.ops.add,
            mult: e.ops.mult,
            rot: e.ops.rot,
            hst: e.ops.hst_rot,
        }
    }
}

pub fn epoch_rows(r: &TrainingReport) -> Vec<EpochRow> {
    std::iter::once(&r.initial).chain(&r.epochs).map(EpochRow::from).collect()
}

/// Writes `value` as JSON, or `rows` as CSV when the extension is `.csv`.
pub fn write_report<T: Serialize, R: Serialize>(path: &Path, value: &T, rows: &[R]) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => write_csv(path, rows),
        _ => write_json(path, value),
    }
}
