//! Dataset generation and training runs.

use std::path::{Path, PathBuf};

use hesimd_protocols::dataset::{generate, Dataset, DatasetSpec, GroundTruth};
use hesimd_protocols::training::{train, ProtocolKind, TrainingReport};

use crate::config::TrainRun;
use crate::error::Result;
use crate::report::write_json;

/// Where the ground truth of `data` is stored: `x.csv` -> `x.truth.json`.
pub fn truth_path(data: &Path) -> PathBuf {
    data.with_extension("truth.json")
}

/// Writes the CSV to `path` and the generating weights next to it.
pub fn gen_dataset(spec: &DatasetSpec, path: &Path) -> Result<(Dataset, GroundTruth)> {
    let (data, truth) = generate(spec)?;
    data.save(path)?;
    write_json(&truth_path(path), &truth)?;
    Ok((data, truth))
}

/// Largest per-epoch loss gap to the centralized reference a run may show.
pub fn parity_tolerance(kind: ProtocolKind) -> f64 {
    match kind {
        ProtocolKind::Linr => 1e-3,
        ProtocolKind::Caesar | ProtocolKind::Nn => 1e-2,
    }
}

pub struct TrainOutcome {
    pub report: TrainingReport,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn run_train(run: &TrainRun) -> Result<TrainOutcome> {
    run.validate()?;
    let data = Dataset::load(&run.data)?;
    let report = train(&run.config, &data)?;
    let tolerance = parity_tolerance(run.config.protocol);
    let finite = report.epochs.iter().chain([&report.initial]).all(|e| e.fed_loss.is_finite() && e.central_loss.is_finite());
    let passed = finite && report.max_loss_gap <= tolerance;
    Ok(TrainOutcome { report, tolerance, passed })
}
