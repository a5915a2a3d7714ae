//! Split neural network with an encrypted interactive layer.
//!
//! A owns a linear bottom model and the key pair. Per batch A uploads the
//! encrypted diagonals of its embedding `α_A` once. B multiplies them by the
//! columns of `W_A` for the forward pass and, after converting them to the
//! diagonals of `α_Aᵀ` while waiting, by the columns of `δ` for the backward
//! pass. Both results go back to A masked; A decrypts and returns them still
//! masked, and B strips its masks.

use std::sync::Arc;

use hesimd_core::matmult::{
    encrypt_diagonals, finalize_lazy_ras_mod, matmult_encrypted, transpose_diag_convert, EncryptedDiagonals,
    PendingResult, ReductionPlan,
};
use hesimd_core::simd::{Evaluator, Meter, OpCounter, Party, SimdBackend};
use hesimd_core::Matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::common::{decode_vec, encode_mat, encode_vec, mask_pending, unmask, ProtocolParams};
use crate::error::{ProtocolError, Result};
use crate::model::{mat_sub_scaled, step, top_backward, NnModel};
use crate::netsim::{Network, Payload};

/// Data owner A: features, bottom model and the key pair.
pub struct NnPartyA<B: SimdBackend> {
    pub features: Matrix<f64>,
    pub bottom: Matrix<f64>,
    pub eval: Evaluator<B>,
    pub meter: Meter,
}

/// Active party B: features, labels, its bottom model, the interactive
/// weights for both parties and the top model. Computes on A's ciphertexts.
pub struct NnPartyB<B: SimdBackend> {
    pub features: Matrix<f64>,
    pub labels: Vec<f64>,
    pub bottom: Matrix<f64>,
    pub wa: Matrix<f64>,
    pub wb: Matrix<f64>,
    pub top: Vec<f64>,
    pub eval: Evaluator<B>,
    pub meter: Meter,
    rng: ChaCha20Rng,
}

/// Per-batch accounting of B's encrypted work.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NnStats {
    /// The `n′` forward products `⟦α_A⟧·W_A[:, k]`.
    pub forward_ops: OpCounter,
    /// The `n′` backward products `⟦α_Aᵀ⟧·δ[:, k]`.
    pub backward_ops: OpCounter,
    /// Diagonal conversion to the transpose.
    pub conversion_ops: OpCounter,
    pub loss: f64,
}

pub struct NnSession<B: SimdBackend> {
    pub params: ProtocolParams,
    pub a: NnPartyA<B>,
    pub b: NnPartyB<B>,
    pub net: Network<B>,
    pub lr: f64,
}

fn rows(x: &Matrix<f64>, idx: &[usize]) -> Matrix<f64> {
    Matrix::from_fn(idx.len(), x.cols(), |i, j| x.get(idx[i], j))
}

fn column(x: &Matrix<f64>, k: usize) -> Vec<f64> {
    (0..x.rows()).map(|i| x.get(i, k)).collect()
}

impl<B: SimdBackend> NnSession<B> {
    /// `key_a` is A's key pair; B only ever uses it for homomorphic work.
    pub fn new(
        params: ProtocolParams,
        key_a: Arc<B>,
        xa: Matrix<f64>,
        xb: Matrix<f64>,
        y: Vec<f64>,
        model: NnModel,
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
        if model.va.rows() != xa.cols() || model.vb.rows() != xb.cols() {
            return Err(ProtocolError::ShapeMismatch("bottom models do not match the feature counts".into()));
        }
        if key_a.params() != &params.scheme {
            return Err(ProtocolError::ConfigInvalid("backend parameters differ from the protocol parameters".into()));
        }
        let (ma, mb) = (Meter::new(), Meter::new());
        let a = NnPartyA {
            features: xa,
            bottom: model.va,
            eval: Evaluator::with_meter(key_a.clone(), ma.clone()),
            meter: ma,
        };
        let b = NnPartyB {
            features: xb,
            labels: y,
            bottom: model.vb,
            wa: model.wa,
            wb: model.wb,
            top: model.top,
            eval: Evaluator::with_meter(key_a, mb.clone()),
            meter: mb,
            rng: ChaCha20Rng::seed_from_u64(seed),
        };
        let mut net = Network::new(params.channel, params.cost.clone());
        net.attach_meter(Party::A, a.meter.clone());
        net.attach_meter(Party::B, b.meter.clone());
        Ok(Self { params, a, b, net, lr })
    }

    /// Reveals the model (evaluation only).
    pub fn model(&self) -> NnModel {
        NnModel {
            va: self.a.bottom.clone(),
            vb: self.b.bottom.clone(),
            wa: self.b.wa.clone(),
            wb: self.b.wb.clone(),
            top: self.b.top.clone(),
        }
    }

    /// B: products of the encrypted matrix with each cleartext column (at
    /// exponent 1), masked, sent to A, returned decrypted and unmasked.
    /// Returns the columns at exponent 2 and B's operations.
    pub fn masked_products(
        &mut self,
        enc: &EncryptedDiagonals<B>,
        columns: &[Vec<f64>],
        label: &str,
    ) -> Result<(Vec<Vec<f64>>, OpCounter)> {
        let p = self.params.scheme;
        let t = p.plain_modulus;
        let scope = self.b.meter.open();
        let mut pending: Vec<PendingResult<B::Payload>> = Vec::with_capacity(columns.len());
        let mut masks = Vec::with_capacity(columns.len());
        for c in columns {
            let mut r = matmult_encrypted(&self.b.eval, enc, &encode_vec(c, &p, 1)?, 1)?;
            masks.push(mask_pending(&self.b.eval, &mut r, &mut self.b.rng)?);
            pending.push(r);
        }
        let (ops, _) = self.b.meter.close(scope)?;
        let plans: Vec<ReductionPlan> = pending.iter().map(|r| r.plan.clone()).collect();
        let cts = pending.into_iter().flat_map(|r| r.ciphertexts).collect();
        self.net.send_labeled(Party::B, Party::A, Payload::Rlwe(cts), label)?;

        // A: decrypt, reduce with the public plans, return (still masked)
        let got = self.net.recv_rlwe(Party::A, Party::B)?;
        let mut flat = Vec::new();
        let mut at = 0;
        for plan in &plans {
            let dec = got[at..at + plan.ciphertexts]
                .iter()
                .map(|c| self.a.eval.decrypt(c).map(|p| p.slots))
                .collect::<hesimd_core::Result<Vec<_>>>()?;
            at += plan.ciphertexts;
            flat.extend(finalize_lazy_ras_mod(&dec, plan, t)?);
        }
        self.net.send_labeled(Party::A, Party::B, Payload::Values(flat), &format!("{label}-plain"))?;

        // B: strip the reduced masks
        let flat = self.net.recv_values(Party::B, Party::A)?;
        let mut out = Vec::with_capacity(plans.len());
        let mut at = 0;
        for (plan, m) in plans.iter().zip(&masks) {
            let len = plan.len();
            let reduced_mask = finalize_lazy_ras_mod(m, plan, t)?;
            let v = unmask(&[flat[at..at + len].to_vec()], &[reduced_mask], t).remove(0);
            at += len;
            out.push(decode_vec(&v, &p, 2));
        }
        Ok((out, ops))
    }

    /// A encrypts the diagonals of `α_A` and sends them; B receives them.
    pub fn upload_alpha(&mut self, alpha_a: &Matrix<f64>) -> Result<EncryptedDiagonals<B>> {
        let p = self.params.scheme;
        let enc = encrypt_diagonals(&self.a.eval, &encode_mat(alpha_a, &p, 1)?, 1)?;
        let (m, n) = (enc.m, enc.n);
        self.net.send_labeled(Party::A, Party::B, Payload::Rlwe(enc.diagonals), "alpha")?;
        let diagonals = self.net.recv_rlwe(Party::B, Party::A)?;
        Ok(EncryptedDiagonals { m, n, slots: p.slot_count, packed_rows: None, diagonals, converted_from: None })
    }

    /// One forward and backward pass on the aligned batch rows `idx`.
    pub fn iteration(&mut self, idx: &[usize]) -> Result<NnStats> {
        let p = self.params.scheme;
        let m = idx.len();
        let (xa, xb) = (rows(&self.a.features, idx), rows(&self.b.features, idx));
        let y: Vec<f64> = idx.iter().map(|&i| self.b.labels[i]).collect();

        let alpha_a = xa.matmul(&self.a.bottom)?;
        let (embed, hidden) = (alpha_a.cols(), self.b.wa.cols());
        let enc = self.upload_alpha(&alpha_a)?;

        // B: forward
        let cols: Vec<Vec<f64>> = (0..hidden).map(|k| column(&self.b.wa, k)).collect();
        let (za, forward_ops) = self.masked_products(&enc, &cols, "z_a-masked")?;
        let scope = self.b.meter.open();
        let enc_t = transpose_diag_convert(&self.b.eval, &enc)?;
        let (conversion_ops, _) = self.b.meter.close(scope)?;

        let alpha_b = xb.matmul(&self.b.bottom)?;
        let zb = alpha_b.matmul(&self.b.wb)?;
        let act = Matrix::from_fn(m, hidden, |i, k| (za[k][i] + zb.get(i, k)).tanh());
        let out: Vec<f64> = (0..m).map(|i| (0..hidden).map(|k| act.get(i, k) * self.b.top[k]).sum()).collect();
        let loss = crate::model::mse_loss(&out, &y);
        let (delta, grad_top) = top_backward(&self.b.top, &act, &out, &y);

        // B: backward through the converted diagonals; δ is sent scaled by m
        let cols: Vec<Vec<f64>> = (0..hidden).map(|k| column(&delta, k).iter().map(|v| v * m as f64).collect()).collect();
        let (gwa, backward_ops) = self.masked_products(&enc_t, &cols, "grad_w_a-masked")?;
        let grad_wa = Matrix::from_fn(embed, hidden, |j, k| gwa[k][j] / m as f64);
        let grad_wb = alpha_b.transpose().matmul(&delta)?;
        let d_alpha_a = delta.matmul(&self.b.wa.transpose())?;
        let d_alpha_b = delta.matmul(&self.b.wb.transpose())?;
        let grad_vb = xb.transpose().matmul(&d_alpha_b)?;
        let lr = self.lr;
        self.net.send_labeled(
            Party::B,
            Party::A,
            Payload::Values(encode_vec(d_alpha_a.as_slice(), &p, 2)?),
            "d_alpha_a",
        )?;
        step(&mut self.b.top, &grad_top, lr);
        mat_sub_scaled(&mut self.b.wa, &grad_wa, lr);
        mat_sub_scaled(&mut self.b.wb, &grad_wb, lr);
        mat_sub_scaled(&mut self.b.bottom, &grad_vb, lr);

        // A: bottom update
        let d = decode_vec(&self.net.recv_values(Party::A, Party::B)?, &p, 2);
        let d_alpha_a = Matrix::from_vec(m, embed, d)?;
        let grad_va = xa.transpose().matmul(&d_alpha_a)?;
        mat_sub_scaled(&mut self.a.bottom, &grad_va, lr);
        Ok(NnStats { forward_ops, backward_ops, conversion_ops, loss })
    }
}
