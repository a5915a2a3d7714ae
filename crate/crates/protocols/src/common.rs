//! Fixed-point conversion and masking shared by the protocols.

use hesimd_core::matmult::{finalize_lazy_ras_mod, MatMultOutput, PendingResult, ReductionPlan};
use hesimd_core::modarith::{add_mod, mul_mod, sub_mod};
use hesimd_core::simd::plaintext::{residue_to_f64, to_residue};
use hesimd_core::simd::{CostModel, Evaluator, Plaintext, SchemeParams, SimdBackend, WIDE_PLAIN_MODULUS};
use hesimd_core::Matrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ProtocolError, Result};
use crate::netsim::ChannelSpec;
use crate::ss::random_residues;

/// Everything the parties agree on before training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub scheme: SchemeParams,
    /// Sizes used for byte accounting (paper presets by default).
    pub cost: CostModel,
    pub channel: ChannelSpec,
}

impl ProtocolParams {
    /// Semantic-backend parameters for fixed-point training: `t = 2^61 − 1`, `Δ = 2^16`.
    ///
    /// Exponent-2 values up to `2^17` in magnitude stay inside the
    /// share-truncation bound.
    pub fn semantic(slots: usize) -> Self {
        Self {
            scheme: SchemeParams::semantic(slots).with_plain_modulus(WIDE_PLAIN_MODULUS).with_delta(1 << 16),
            cost: CostModel::default(),
            channel: ChannelSpec::default(),
        }
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.scheme = self.scheme.with_level(level);
        self
    }

    pub fn t(&self) -> u64 {
        self.scheme.plain_modulus
    }

    pub fn delta(&self) -> u64 {
        self.scheme.delta
    }

    pub fn slots(&self) -> usize {
        self.scheme.slot_count
    }
}

pub fn encode_vec(v: &[f64], p: &SchemeParams, exp: u32) -> Result<Vec<u64>> {
    Ok(v.iter().map(|&x| to_residue(x, p, exp)).collect::<hesimd_core::Result<Vec<_>>>()?)
}

pub fn decode_vec(r: &[u64], p: &SchemeParams, exp: u32) -> Vec<f64> {
    r.iter().map(|&x| residue_to_f64(x, p, exp)).collect()
}

pub fn encode_mat(x: &Matrix<f64>, p: &SchemeParams, exp: u32) -> Result<Matrix<u64>> {
    Ok(Matrix::from_vec(x.rows(), x.cols(), encode_vec(x.as_slice(), p, exp)?)?)
}

/// Adds a fresh uniform mask to every slot of every pending ciphertext and
/// returns the masks.
pub fn mask_pending<B: SimdBackend, R: Rng + ?Sized>(
    eval: &Evaluator<B>,
    p: &mut PendingResult<B::Payload>,
    rng: &mut R,
) -> Result<Vec<Vec<u64>>> {
    let t = eval.params().plain_modulus;
    let slots = eval.slot_count();
    let mut masks = Vec::with_capacity(p.ciphertexts.len());
    for c in &mut p.ciphertexts {
        let r = random_residues(slots, t, rng);
        *c = eval.add_plain(c, &Plaintext::from_residues(r.clone(), c.scale_exponent))?;
        masks.push(r);
    }
    Ok(masks)
}

/// Removes slot masks from decrypted vectors.
pub fn unmask(decrypted: &[Vec<u64>], masks: &[Vec<u64>], t: u64) -> Vec<Vec<u64>> {
    decrypted.iter().zip(masks).map(|(d, m)| d.iter().zip(m).map(|(&a, &b)| sub_mod(a, b, t)).collect()).collect()
}

/// Splits a flat slot list back into per-ciphertext vectors.
pub fn chunk_slots(flat: &[u64], slots: usize) -> Vec<Vec<u64>> {
    flat.chunks(slots).map(<[u64]>::to_vec).collect()
}

/// Unmasks decrypted slots and applies the plan.
pub fn unmask_finalize<P>(flat: &[u64], masks: &[Vec<u64>], pending: &PendingResult<P>, t: u64) -> Result<Vec<u64>> {
    let dec = unmask(&chunk_slots(flat, pending.plan.slots), masks, t);
    Ok(finalize_lazy_ras_mod(&dec, &pending.plan, t)?)
}

pub fn matvec(x: &Matrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..x.rows()).map(|i| x.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Views any slot-domain product as pending ciphertexts plus a plan, so the
/// masking path is the same whether rotate-and-sum ran or was deferred.
pub fn into_pending<B: SimdBackend>(out: MatMultOutput<B>, slots: usize) -> Result<PendingResult<B::Payload>> {
    match out {
        MatMultOutput::Pending(p) => Ok(p),
        MatMultOutput::Finished { ciphertexts, positions } => {
            let plan = ReductionPlan {
                slots,
                ciphertexts: ciphertexts.len(),
                outputs: positions.into_iter().map(|p| vec![p]).collect(),
            };
            Ok(PendingResult { ciphertexts, plan })
        }
        MatMultOutput::Lwe(_) => Err(ProtocolError::ConfigInvalid("LWE outputs cannot be slot-masked".into())),
    }
}

/// `x·v mod t` on residues.
pub fn matvec_mod(x: &Matrix<u64>, v: &[u64], t: u64) -> Vec<u64> {
    (0..x.rows()).map(|i| x.row(i).iter().zip(v).fold(0, |acc, (&a, &b)| add_mod(acc, mul_mod(a, b, t), t))).collect()
}
