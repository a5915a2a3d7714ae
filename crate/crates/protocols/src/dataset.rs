//! Synthetic vertically partitioned datasets and their CSV form
//! (`id,a_0..a_{nA-1},b_0..b_{nB-1},label`).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use hesimd_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ProtocolError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Linear,
    Logistic,
}

impl FromStr for TaskKind {
    type Err = ProtocolError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(TaskKind::Linear),
            "logistic" => Ok(TaskKind::Logistic),
            _ => Err(ProtocolError::ConfigInvalid(format!("unknown task `{s}` (linear|logistic)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub rows: usize,
    pub features_a: usize,
    pub features_b: usize,
    pub task: TaskKind,
    /// Standard deviation of label noise (linear) or of the logit noise (logistic).
    pub noise: f64,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.features_a == 0 || self.features_b == 0 {
            return Err(ProtocolError::ConfigInvalid("rows and feature counts must be positive".into()));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(ProtocolError::ConfigInvalid(format!("noise must be a finite non-negative number, got {}", self.noise)));
        }
        Ok(())
    }
}

/// Weights the labels were generated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub task: TaskKind,
    pub weights_a: Vec<f64>,
    pub weights_b: Vec<f64>,
    pub noise: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub ids: Vec<u64>,
    /// Party A's features.
    pub xa: Matrix<f64>,
    /// Party B's features.
    pub xb: Matrix<f64>,
    /// Labels, held by B.
    pub y: Vec<f64>,
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

pub fn generate(spec: &DatasetSpec) -> Result<(Dataset, GroundTruth)> {
    spec.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let normal = |rng: &mut ChaCha20Rng| -> f64 { StandardNormal.sample(rng) };
    let weights_a: Vec<f64> = (0..spec.features_a).map(|_| normal(&mut rng)).collect();
    let weights_b: Vec<f64> = (0..spec.features_b).map(|_| normal(&mut rng)).collect();
    let xa = Matrix::from_fn(spec.rows, spec.features_a, |_, _| normal(&mut rng));
    let xb = Matrix::from_fn(spec.rows, spec.features_b, |_, _| normal(&mut rng));
    let mut y = Vec::with_capacity(spec.rows);
    for i in 0..spec.rows {
        let z: f64 = (0..spec.features_a).map(|j| xa.get(i, j) * weights_a[j]).sum::<f64>()
            + (0..spec.features_b).map(|j| xb.get(i, j) * weights_b[j]).sum::<f64>();
        let e = spec.noise * normal(&mut rng);
        y.push(match spec.task {
            TaskKind::Linear => z + e,
            TaskKind::Logistic => f64::from(u8::from(rng.random::<f64>() < sigmoid(z + e))),
        });
    }
    let ids = (0..spec.rows as u64).collect();
    let truth = GroundTruth { task: spec.task, weights_a, weights_b, noise: spec.noise, seed: spec.seed };
    Ok((Dataset { ids, xa, xb, y }, truth))
}

impl Dataset {
    pub fn rows(&self) -> usize {
        self.y.len()
    }

    pub fn features(&self) -> (usize, usize) {
        (self.xa.cols(), self.xb.cols())
    }

    /// Rows `idx` of both parties' features and the labels.
    pub fn batch(&self, idx: &[usize]) -> (Matrix<f64>, Matrix<f64>, Vec<f64>) {
        let xa = Matrix::from_fn(idx.len(), self.xa.cols(), |i, j| self.xa.get(idx[i], j));
        let xb = Matrix::from_fn(idx.len(), self.xb.cols(), |i, j| self.xb.get(idx[i], j));
        (xa, xb, idx.iter().map(|&i| self.y[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let (na, nb) = self.features();
        let mut header = vec!["id".to_string()];
        header.extend((0..na).map(|j| format!("a_{j}")));
        header.extend((0..nb).map(|j| format!("b_{j}")));
        header.push("label".into());
        wr.write_record(&header)?;
        for i in 0..self.rows() {
            let mut rec = vec![self.ids[i].to_string()];
            rec.extend(self.xa.row(i).iter().map(f64::to_string));
            rec.extend(self.xb.row(i).iter().map(f64::to_string));
            rec.push(self.y[i].to_string());
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header = rd.headers()?.clone();
        let cols: Vec<&str> = header.iter().collect();
        let na = cols.iter().filter(|c| c.starts_with("a_")).count();
        let nb = cols.iter().filter(|c| c.starts_with("b_")).count();
        if cols.first() != Some(&"id") || cols.last() != Some(&"label") || na + nb + 2 != cols.len() {
            return Err(ProtocolError::ShapeMismatch(format!("unexpected header {cols:?}")));
        }
        let (mut ids, mut a, mut b, mut y) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for rec in rd.records() {
            let rec = rec?;
            let num = |k: usize| -> Result<f64> {
                rec[k].trim().parse().map_err(|_| ProtocolError::ShapeMismatch(format!("bad number `{}`", &rec[k])))
            };
            ids.push(rec[0].trim().parse().map_err(|_| ProtocolError::ShapeMismatch(format!("bad id `{}`", &rec[0])))?);
            for k in 1..=na {
                a.push(num(k)?);
            }
            for k in na + 1..=na + nb {
                b.push(num(k)?);
            }
            y.push(num(na + nb + 1)?);
        }
        let n = y.len();
        Ok(Dataset { ids, xa: Matrix::from_vec(n, na, a)?, xb: Matrix::from_vec(n, nb, b)?, y })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| ProtocolError::DatasetMissing(format!("{}: {e}", path.display())))?;
        Self::read_csv(f)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(File::create(path)?)
    }
}
