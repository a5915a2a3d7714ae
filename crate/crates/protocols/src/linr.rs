//! Vertical linear regression with an arbiter holding the decryption key.
//!
//! Per batch: A encrypts `u_A = X_A·θ_A`, B adds `u_B − y` to obtain `⟦d⟧`
//! and returns it to A, each party computes `⟦X_kᵀ·d⟧` with the packed
//! diagonal method (rotate-and-sum deferred), masks every slot and sends the
//! result to the arbiter, which decrypts. The parties strip the masks, apply
//! the reduction plan and take a gradient step.

use std::sync::Arc;

use hesimd_core::matmult::{
    encode_matrix, matmult, predict_complexity, vector_layout, vector_slots, ComplexityPrediction, Method,
    PendingResult, PreparedVector,
};
use hesimd_core::simd::{Evaluator, Meter, OpCounter, Party, Plaintext, SimdBackend};
use hesimd_core::Matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::common::{decode_vec, encode_vec, into_pending, mask_pending, matvec, unmask_finalize, ProtocolParams};
use crate::error::{ProtocolError, Result};
use crate::model::LinearModel;
use crate::netsim::{Network, Payload};

/// Scale exponent of features, weights and residuals.
const EXP: u32 = 1;

/// One data owner: its feature columns, its half of the model and its mask rng.
pub struct LinrParty<B: SimdBackend> {
    pub role: Party,
    pub features: Matrix<f64>,
    /// Only B holds labels.
    pub labels: Option<Vec<f64>>,
    pub weights: Vec<f64>,
    pub eval: Evaluator<B>,
    pub meter: Meter,
    rng: ChaCha20Rng,
}

impl<B: SimdBackend> LinrParty<B> {
    fn new(role: Party, features: Matrix<f64>, labels: Option<Vec<f64>>, backend: Arc<B>, seed: u64) -> Self {
        let meter = Meter::new();
        Self {
            role,
            weights: vec![0.0; features.cols()],
            features,
            labels,
            eval: Evaluator::with_meter(backend, meter.clone()),
            meter,
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    fn rows(&self, idx: &[usize]) -> Matrix<f64> {
        Matrix::from_fn(idx.len(), self.features.cols(), |i, j| self.features.get(idx[i], j))
    }

    /// `⟦X_batchᵀ·d⟧` with fresh slot masks; returns the masked pending result and the masks.
    fn masked_gradient(
        &mut self,
        x: &Matrix<f64>,
        d: &PreparedVector<B>,
    ) -> Result<(PendingResult<B::Payload>, Vec<Vec<u64>>, OpCounter)> {
        let xt = x.transpose();
        let enc = encode_matrix(Method::Packvfl, &xt, self.eval.params(), EXP)?;
        let scope = self.meter.open();
        let out = matmult(&self.eval, Method::Packvfl, &enc, d)?;
        let (ops, _) = self.meter.close(scope)?;
        let mut pending = into_pending(out, self.eval.slot_count())?;
        let masks = mask_pending(&self.eval, &mut pending, &mut self.rng)?;
        Ok((pending, masks, ops))
    }
}

/// What one iteration produced, for tests and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub grad_a: Vec<f64>,
    pub grad_b: Vec<f64>,
    /// Operations inside each party's product.
    pub matmult_ops_a: OpCounter,
    pub matmult_ops_b: OpCounter,
    pub prediction_a: ComplexityPrediction,
    pub prediction_b: ComplexityPrediction,
}

pub struct LinrSession<B: SimdBackend> {
    pub params: ProtocolParams,
    pub a: LinrParty<B>,
    pub b: LinrParty<B>,
    /// The arbiter's evaluator; the backend's secret key belongs to it.
    pub arbiter: Evaluator<B>,
    pub arbiter_meter: Meter,
    pub net: Network<B>,
    pub lr: f64,
}

impl<B: SimdBackend> LinrSession<B> {
    pub fn new(
        params: ProtocolParams,
        backend: Arc<B>,
        xa: Matrix<f64>,
        xb: Matrix<f64>,
        y: Vec<f64>,
        lr: f64,
        seed: u64,
    ) -> Result<Self> {
        if xa.rows() != xb.rows() || xb.rows() != y.len() {
            return Err(ProtocolError::ShapeMismatch(format!(
                "A has {} rows, B has {} rows and {} labels",
                xa.rows(),
                xb.rows(),
                y.len()
            )));
        }
        if backend.params() != &params.scheme {
            return Err(ProtocolError::ConfigInvalid("backend parameters differ from the protocol parameters".into()));
        }
        let a = LinrParty::new(Party::A, xa, None, backend.clone(), seed ^ 0xa);
        let b = LinrParty::new(Party::B, xb, Some(y), backend.clone(), seed ^ 0xb);
        let arbiter_meter = Meter::new();
        let arbiter = Evaluator::with_meter(backend, arbiter_meter.clone());
        let mut net = Network::new(params.channel, params.cost.clone());
        net.attach_meter(Party::A, a.meter.clone());
        net.attach_meter(Party::B, b.meter.clone());
        net.attach_meter(Party::Arbiter, arbiter_meter.clone());
        Ok(Self { params, a, b, arbiter, arbiter_meter, net, lr })
    }

    pub fn model(&self) -> LinearModel {
        LinearModel { wa: self.a.weights.clone(), wb: self.b.weights.clone() }
    }

    pub fn set_model(&mut self, model: &LinearModel) {
        self.a.weights = model.wa.clone();
        self.b.weights = model.wb.clone();
    }

    /// Arbiter: decrypt every ciphertext from `from` and send the slots back.
    fn arbiter_round(&mut self, from: Party) -> Result<()> {
        let cts = self.net.recv_rlwe(Party::Arbiter, from)?;
        let mut flat = Vec::new();
        for c in &cts {
            flat.extend(self.arbiter.decrypt(c)?.slots);
        }
        self.net.send_labeled(Party::Arbiter, from, Payload::Values(flat), "masked-gradient-plain")?;
        Ok(())
    }

    /// One gradient step on the aligned batch rows `idx`.
    pub fn iteration(&mut self, idx: &[usize]) -> Result<IterationStats> {
        let m = idx.len();
        let scheme = self.params.scheme;
        let (t, slots) = (scheme.plain_modulus, scheme.slot_count);
        let (na, nb) = (self.a.features.cols(), self.b.features.cols());
        let layout = vector_layout(Method::Packvfl, na, m, slots)?;
        if vector_layout(Method::Packvfl, nb, m, slots)? != layout {
            return Err(ProtocolError::ConfigInvalid(format!(
                "batch {m} needs different vector layouts for {na} and {nb} features"
            )));
        }

        // A: ⟦u_A⟧
        let xa = self.a.rows(idx);
        let ua = encode_vec(&matvec(&xa, &self.a.weights), &scheme, EXP)?;
        let ua = vector_slots(layout, &ua, slots, scheme.ring_degree)?
            .into_iter()
            .map(|v| self.a.eval.encrypt(&Plaintext::from_residues(v, EXP)))
            .collect::<hesimd_core::Result<Vec<_>>>()?;
        self.net.send_labeled(Party::A, Party::B, Payload::Rlwe(ua), "u_a")?;

        // B: ⟦d⟧ = ⟦u_A⟧ + u_B − y
        let xb = self.b.rows(idx);
        let labels = self.b.labels.as_ref().ok_or_else(|| ProtocolError::DatasetMissing("B holds no labels".into()))?;
        let resid: Vec<f64> =
            matvec(&xb, &self.b.weights).iter().zip(idx).map(|(u, &i)| u - labels[i]).collect();
        let resid = vector_slots(layout, &encode_vec(&resid, &scheme, EXP)?, slots, scheme.ring_degree)?;
        let ua = self.net.recv_rlwe(Party::B, Party::A)?;
        let d = ua
            .iter()
            .zip(resid)
            .map(|(c, r)| self.b.eval.add_plain(c, &Plaintext::from_residues(r, EXP)))
            .collect::<hesimd_core::Result<Vec<_>>>()?;
        self.net.send_labeled(Party::B, Party::A, Payload::Rlwe(d.clone()), "d")?;
        let d_b = PreparedVector { layout, ciphertexts: d };
        let d_a = PreparedVector { layout, ciphertexts: self.net.recv_rlwe(Party::A, Party::B)? };

        // both parties: masked ⟦X_kᵀ·d⟧ to the arbiter
        let (pa, masks_a, ops_a) = self.a.masked_gradient(&xa, &d_a)?;
        self.net.send_labeled(Party::A, Party::Arbiter, Payload::Rlwe(pa.ciphertexts.clone()), "masked-gradient")?;
        let (pb, masks_b, ops_b) = self.b.masked_gradient(&xb, &d_b)?;
        self.net.send_labeled(Party::B, Party::Arbiter, Payload::Rlwe(pb.ciphertexts.clone()), "masked-gradient")?;
        self.arbiter_round(Party::A)?;
        self.arbiter_round(Party::B)?;

        let finish = |flat: Vec<u64>, masks: &[Vec<u64>], p: &PendingResult<B::Payload>| -> Result<Vec<f64>> {
            let g = unmask_finalize(&flat, masks, p, t)?;
            Ok(decode_vec(&g, &scheme, 2 * EXP).into_iter().map(|v| v / m as f64).collect())
        };
        let grad_a = finish(self.net.recv_values(Party::A, Party::Arbiter)?, &masks_a, &pa)?;
        let grad_b = finish(self.net.recv_values(Party::B, Party::Arbiter)?, &masks_b, &pb)?;
        for (w, g) in self.a.weights.iter_mut().zip(&grad_a) {
            *w -= self.lr * g;
        }
        for (w, g) in self.b.weights.iter_mut().zip(&grad_b) {
            *w -= self.lr * g;
        }
        Ok(IterationStats {
            grad_a,
            grad_b,
            matmult_ops_a: ops_a,
            matmult_ops_b: ops_b,
            prediction_a: predict_complexity(Method::Packvfl, na, m, slots, scheme.ring_degree)?,
            prediction_b: predict_complexity(Method::Packvfl, nb, m, slots, scheme.ring_degree)?,
        })
    }
}
