//! Epoch driver: runs a federated protocol and its centralized cleartext
//! reference over the same batches and reports both losses per epoch.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use hesimd_core::simd::{OpCounter, SemanticBackend};
use serde::{Deserialize, Serialize};

use crate::caesar::CaesarSession;
use crate::common::ProtocolParams;
use crate::dataset::Dataset;
use crate::error::{ProtocolError, Result};
use crate::linr::LinrSession;
use crate::model::{auc, batches, linear_loss, linr_step, logistic_step, mse_loss, LinearModel, NnModel, SigmoidPoly};
use crate::nn::NnSession;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    Linr,
    Caesar,
    Nn,
}

impl FromStr for ProtocolKind {
    type Err = ProtocolError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linr" => Ok(Self::Linr),
            "caesar" => Ok(Self::Caesar),
            "nn" => Ok(Self::Nn),
            _ => Err(ProtocolError::ConfigInvalid(format!("unknown protocol {s:?} (linr, caesar, nn)"))),
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linr => "linr",
            Self::Caesar => "caesar",
            Self::Nn => "nn",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub protocol: ProtocolKind,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
    /// Slots per ciphertext of the semantic backend.
    pub slots: usize,
    /// Embedding width of the bottom models (NN only).
    pub embed: usize,
    /// Hidden units of the interactive layer (NN only).
    pub hidden: usize,
    pub sigmoid: SigmoidPoly,
}

impl TrainingConfig {
    pub fn new(protocol: ProtocolKind) -> Self {
        let lr = match protocol {
            ProtocolKind::Linr => 0.1,
            ProtocolKind::Caesar => 0.2,
            ProtocolKind::Nn => 0.1,
        };
        Self {
            protocol,
            epochs: 10,
            batch_size: 64,
            lr,
            seed: 7,
            slots: 64,
            embed: 4,
            hidden: 4,
            sigmoid: SigmoidPoly::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.embed == 0 || self.hidden == 0 {
            return Err(ProtocolError::ConfigInvalid("batch size and layer widths must be positive".into()));
        }
        if !self.slots.is_power_of_two() {
            return Err(ProtocolError::ConfigInvalid(format!("slot count {} is not a power of two", self.slots)));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(ProtocolError::ConfigInvalid(format!("learning rate {} must be positive", self.lr)));
        }
        if self.protocol == ProtocolKind::Nn && self.batch_size.next_power_of_two() > self.slots {
            return Err(ProtocolError::ConfigInvalid(format!(
                "encrypted embeddings need the padded batch ({}) to fit in {} slots",
                self.batch_size.next_power_of_two(),
                self.slots
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochReport {
    pub epoch: usize,
    pub fed_loss: f64,
    pub central_loss: f64,
    pub loss_gap: f64,
    /// Logistic tasks only.
    pub fed_auc: Option<f64>,
    pub central_auc: Option<f64>,
    /// Bytes sent by all parties during the epoch.
    pub bytes: u64,
    /// Modeled transfer time of those bytes in seconds.
    pub comm_time: f64,
    /// Homomorphic operations of all parties during the epoch.
    pub ops: OpCounter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub config: TrainingConfig,
    /// Evaluation before the first update (`epoch` is 0 and the counters are empty).
    pub initial: EpochReport,
    pub epochs: Vec<EpochReport>,
    pub max_loss_gap: f64,
    pub messages: usize,
}

/// Federated run behind one interface.
enum Fed {
    Linr(LinrSession<SemanticBackend>),
    Caesar(CaesarSession<SemanticBackend>),
    Nn(NnSession<SemanticBackend>),
}

enum Central {
    Linear(LinearModel),
    Nn(NnModel),
}

impl Fed {
    fn step(&mut self, idx: &[usize]) -> Result<()> {
        match self {
            Fed::Linr(s) => s.iteration(idx).map(drop),
            Fed::Caesar(s) => s.iteration(idx).map(drop),
            Fed::Nn(s) => s.iteration(idx).map(drop),
        }
    }

    fn totals(&self) -> (u64, f64, OpCounter, usize) {
        let (comm, ops, n) = match self {
            Fed::Linr(s) => {
                (s.net.comm_stats(), s.a.meter.total() + s.b.meter.total() + s.arbiter_meter.total(), s.net.transcript().len())
            }
            Fed::Caesar(s) => (s.net.comm_stats(), s.a.meter.total() + s.b.meter.total(), s.net.transcript().len()),
            Fed::Nn(s) => (s.net.comm_stats(), s.a.meter.total() + s.b.meter.total(), s.net.transcript().len()),
        };
        (comm.total_bytes(), comm.total_modeled_time(), ops, n)
    }
}

fn diff(a: OpCounter, b: OpCounter) -> OpCounter {
    OpCounter::new(a.add - b.add, a.mult - b.mult, a.rot - b.rot, a.hst_rot - b.hst_rot)
}

fn evaluate(kind: ProtocolKind, fed: &Fed, central: &Central, data: &Dataset) -> (f64, f64, Option<f64>, Option<f64>) {
    match (fed, central) {
        (Fed::Linr(s), Central::Linear(c)) => (linear_loss(&s.model(), data, false), linear_loss(c, data, false), None, None),
        (Fed::Caesar(s), Central::Linear(c)) => {
            let f = s.model();
            let auc_of = |m: &LinearModel| auc(&m.logits(&data.xa, &data.xb), &data.y);
            (linear_loss(&f, data, true), linear_loss(c, data, true), Some(auc_of(&f)), Some(auc_of(c)))
        }
        (Fed::Nn(s), Central::Nn(c)) => {
            let loss = |m: &NnModel| mse_loss(&m.predict(&data.xa, &data.xb), &data.y);
            (loss(&s.model()), loss(c), None, None)
        }
        _ => unreachable!("{kind} pairs a federated run with its own reference"),
    }
}

/// Trains with `cfg` on `data` on the semantic backend.
pub fn train(cfg: &TrainingConfig, data: &Dataset) -> Result<TrainingReport> {
    cfg.validate()?;
    let params = ProtocolParams::semantic(cfg.slots);
    let key = || -> Result<Arc<SemanticBackend>> { Ok(Arc::new(SemanticBackend::new(params.scheme)?)) };
    let (na, nb) = data.features();
    let (xa, xb, y) = (data.xa.clone(), data.xb.clone(), data.y.clone());
    let (mut fed, mut central) = match cfg.protocol {
        ProtocolKind::Linr => (
            Fed::Linr(LinrSession::new(params.clone(), key()?, xa, xb, y, cfg.lr, cfg.seed)?),
            Central::Linear(LinearModel::zeros(na, nb)),
        ),
        ProtocolKind::Caesar => {
            let mut s = CaesarSession::new(params.clone(), key()?, key()?, xa, xb, y, cfg.lr, cfg.seed)?;
            s.sigmoid = cfg.sigmoid;
            (Fed::Caesar(s), Central::Linear(LinearModel::zeros(na, nb)))
        }
        ProtocolKind::Nn => {
            let model = NnModel::init(na, nb, cfg.embed, cfg.hidden, cfg.seed);
            let s = NnSession::new(params.clone(), key()?, xa, xb, y, model.clone(), cfg.lr, cfg.seed)?;
            (Fed::Nn(s), Central::Nn(model))
        }
    };

    let report = |epoch, fed: &Fed, central: &Central, bytes, comm_time, ops| {
        let (fed_loss, central_loss, fed_auc, central_auc) = evaluate(cfg.protocol, fed, central, data);
        EpochReport {
            epoch,
            fed_loss,
            central_loss,
            loss_gap: (fed_loss - central_loss).abs(),
            fed_auc,
            central_auc,
            bytes,
            comm_time,
            ops,
        }
    };
    let initial = report(0, &fed, &central, 0, 0.0, OpCounter::default());
    let mut epochs = Vec::with_capacity(cfg.epochs);
    let (mut bytes0, mut time0, mut ops0, _) = fed.totals();
    for epoch in 0..cfg.epochs {
        for idx in batches(data.rows(), cfg.batch_size, cfg.seed, epoch) {
            fed.step(&idx)?;
            let (bxa, bxb, by) = data.batch(&idx);
            match &mut central {
                Central::Linear(m) if cfg.protocol == ProtocolKind::Linr => linr_step(m, &bxa, &bxb, &by, cfg.lr),
                Central::Linear(m) => logistic_step(m, &bxa, &bxb, &by, cfg.lr, cfg.sigmoid),
                Central::Nn(m) => {
                    let f = m.forward(&bxa, &bxb);
                    let g = m.backward(&bxa, &bxb, &f, &by);
                    m.apply(&g, cfg.lr);
                }
            }
        }
        let (bytes, time, ops, _) = fed.totals();
        epochs.push(report(epoch + 1, &fed, &central, bytes - bytes0, time - time0, diff(ops, ops0)));
        (bytes0, time0, ops0) = (bytes, time, ops);
    }
    let max_loss_gap = epochs.iter().map(|e| e.loss_gap).fold(0.0, f64::max);
    Ok(TrainingReport { config: cfg.clone(), initial, epochs, max_loss_gap, messages: fed.totals().3 })
}
