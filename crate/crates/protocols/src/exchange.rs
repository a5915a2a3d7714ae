//! The bare two-party product: B encrypts `y` and sends it, A multiplies by
//! its plaintext matrix and returns the result. Used to audit operation and
//! ciphertext counts against the complexity tables.

use std::sync::Arc;

use hesimd_core::matmult::{
    decrypt_output, encode_residues, matmult, predict_complexity, prepare_vector_residues, ComplexityPrediction,
    MatMultOutput, Method, PendingResult,
};
use hesimd_core::simd::{CommStats, CostModel, Evaluator, Meter, OpCounter, Party, SimdBackend};
use hesimd_core::Matrix;

use crate::error::Result;
use crate::netsim::{AuditReport, ChannelSpec, Network, Payload, TranscriptRecord};

#[derive(Debug, Clone)]
pub struct ExchangeOutcome {
    /// `X·y mod t` as decrypted by B.
    pub result: Vec<u64>,
    /// Operations A performed inside the product.
    pub ops: OpCounter,
    pub prediction: ComplexityPrediction,
    pub audit: AuditReport,
    pub comm: CommStats,
    pub transcript: Vec<TranscriptRecord>,
}

/// Runs one product between A (matrix `x`) and B (vector `y`, key owner).
pub fn matmult_exchange<B: SimdBackend>(
    backend: Arc<B>,
    method: Method,
    x: &Matrix<u64>,
    y: &[u64],
    cost: CostModel,
    spec: ChannelSpec,
) -> Result<ExchangeOutcome> {
    let (meter_a, meter_b) = (Meter::new(), Meter::new());
    let eval_a = Evaluator::with_meter(backend.clone(), meter_a.clone());
    let eval_b = Evaluator::with_meter(backend, meter_b.clone());
    let mut net = Network::<B>::new(spec, cost);
    net.attach_meter(Party::A, meter_a.clone());
    net.attach_meter(Party::B, meter_b);

    let params = *eval_a.params();
    let enc = encode_residues(method, x, &params, 0)?;
    let layout = enc.vector_layout()?;

    let v = prepare_vector_residues(&eval_b, layout, y, 0)?;
    net.send_labeled(Party::B, Party::A, Payload::Rlwe(v.ciphertexts), "operand")?;

    let received = net.recv_rlwe(Party::A, Party::B)?;
    let v = hesimd_core::matmult::PreparedVector { layout, ciphertexts: received };
    let scope = meter_a.open();
    let out = matmult(&eval_a, method, &enc, &v)?;
    let (ops, _) = meter_a.close(scope)?;
    // the reply carries ciphertexts only; positions and plans are public metadata
    let (reply, shell) = match out {
        MatMultOutput::Finished { ciphertexts, positions } => (Payload::Rlwe(ciphertexts), Shell::Finished(positions)),
        MatMultOutput::Pending(p) => (Payload::Rlwe(p.ciphertexts), Shell::Pending(p.plan)),
        MatMultOutput::Lwe(v) => (Payload::Lwe(v), Shell::Lwe),
    };
    net.send_labeled(Party::A, Party::B, reply, "result")?;

    let out = match shell {
        Shell::Finished(positions) => MatMultOutput::Finished { ciphertexts: net.recv_rlwe(Party::B, Party::A)?, positions },
        Shell::Pending(plan) => {
            MatMultOutput::Pending(PendingResult { ciphertexts: net.recv_rlwe(Party::B, Party::A)?, plan })
        }
        Shell::Lwe => MatMultOutput::Lwe(net.recv_lwe(Party::B, Party::A)?),
    };
    let result = decrypt_output(&eval_b, &out)?;
    let prediction = predict_complexity(method, x.rows(), x.cols(), params.slot_count, params.ring_degree)?;
    let audit = net.audit(&prediction, Party::A, Party::B)?;
    Ok(ExchangeOutcome { result, ops, prediction, audit, comm: net.comm_stats(), transcript: net.transcript().to_vec() })
}

enum Shell {
    Finished(Vec<(usize, usize)>),
    Pending(hesimd_core::matmult::ReductionPlan),
    Lwe,
}
