//! Secret-shared logistic regression with two key pairs, using the packed
//! diagonal product for the HE/SS conversions and the multiplication-level
//! reduced gradient for B.
//!
//! Weights live as additive shares: share 1 at A, share 2 at B. Each party
//! encrypts under its own key and computes on the peer's ciphertexts.

use std::sync::Arc;

use hesimd_core::matmult::{
    encode_matrix, encode_residues, finalize_lazy_ras_mod, matmult, split_for_plan, vector_layout, vector_slots,
    Method, PendingResult, PreparedVector, VectorLayout,
};
use hesimd_core::modarith::neg_mod;
use hesimd_core::simd::plaintext::{residue_to_f64, to_residue};
use hesimd_core::simd::{Ciphertext, Evaluator, Meter, OpCounter, Party, Plaintext, SchemeParams, SimdBackend};
use hesimd_core::Matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::common::{encode_mat, encode_vec, into_pending, mask_pending, matvec_mod, ProtocolParams};
use crate::error::{ProtocolError, Result};
use crate::model::{LinearModel, SigmoidPoly};
use crate::netsim::{Network, Payload};
use crate::ss::{mul_shares, reconstruct, secret_share, truncate, Dealer, Shares};

pub struct CaesarParty<B: SimdBackend> {
    pub role: Party,
    pub features: Matrix<f64>,
    /// Only B holds labels.
    pub labels: Option<Vec<f64>>,
    /// Evaluator under the party's own key: encryption and decryption.
    pub own: Evaluator<B>,
    /// Evaluator under the peer's key: homomorphic work only.
    pub peer: Evaluator<B>,
    pub meter: Meter,
    rng: ChaCha20Rng,
}

impl<B: SimdBackend> CaesarParty<B> {
    fn new(role: Party, features: Matrix<f64>, labels: Option<Vec<f64>>, own: Arc<B>, peer: Arc<B>, seed: u64) -> Self {
        let meter = Meter::new();
        Self {
            role,
            features,
            labels,
            own: Evaluator::with_meter(own, meter.clone()),
            peer: Evaluator::with_meter(peer, meter.clone()),
            meter,
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    fn rows(&self, idx: &[usize]) -> Matrix<f64> {
        Matrix::from_fn(idx.len(), self.features.cols(), |i, j| self.features.get(idx[i], j))
    }

    fn encrypt_layout(&self, layout: VectorLayout, v: &[u64], exp: u32) -> Result<Vec<Ct<B>>> {
        let p = self.own.params();
        Ok(vector_slots(layout, v, p.slot_count, p.ring_degree)?
            .into_iter()
            .map(|s| self.own.encrypt(&Plaintext::from_residues(s, exp)))
            .collect::<hesimd_core::Result<Vec<_>>>()?)
    }

    fn decrypt_all(&self, cts: &[Ct<B>]) -> Result<Vec<Vec<u64>>> {
        Ok(cts.iter().map(|c| self.own.decrypt(c).map(|p| p.slots)).collect::<hesimd_core::Result<Vec<_>>>()?)
    }
}

type Ct<B> = Ciphertext<<B as SimdBackend>::Payload>;

/// Shares of `x·s` produced by the secure product.
#[derive(Debug, Clone)]
pub struct ProductShares {
    /// Share of the matrix holder.
    pub holder: Vec<u64>,
    /// Share of the key owner.
    pub owner: Vec<u64>,
    /// Holder's operations inside the product.
    pub ops: OpCounter,
    /// Ciphertexts the holder sent back.
    pub returned_cts: usize,
}

/// Masked product of the holder's plaintext matrix `x` (residues at
/// exponent 1) with the owner's share vector `s` (exponent 1), encrypted
/// under the owner's key. The holder keeps the negated reduced mask as its share; the
/// owner decrypts and reduces. Outputs are at exponent 2.
pub fn protocol1<B: SimdBackend>(
    net: &mut Network<B>,
    holder: &mut CaesarParty<B>,
    owner: &CaesarParty<B>,
    x: &Matrix<u64>,
    s: &[u64],
) -> Result<ProductShares> {
    let params = *owner.own.params();
    let t = params.plain_modulus;
    let layout = vector_layout(Method::Packvfl, x.rows(), x.cols(), params.slot_count)?;
    let cts = owner.encrypt_layout(layout, s, 1)?;
    net.send_labeled(owner.role, holder.role, Payload::Rlwe(cts), "p1-operand")?;

    let y = PreparedVector { layout, ciphertexts: net.recv_rlwe(holder.role, owner.role)? };
    let enc = encode_residues(Method::Packvfl, x, &params, 1)?;
    let scope = holder.meter.open();
    let out = matmult(&holder.peer, Method::Packvfl, &enc, &y)?;
    let mut pending = into_pending(out, params.slot_count)?;
    let masks = mask_pending(&holder.peer, &mut pending, &mut holder.rng)?;
    let (ops, _) = holder.meter.close(scope)?;
    let returned_cts = pending.ciphertexts.len();
    let share = finalize_lazy_ras_mod(&masks, &pending.plan, t)?.into_iter().map(|v| neg_mod(v, t)).collect();
    net.send_labeled(holder.role, owner.role, Payload::Rlwe(pending.ciphertexts), "p1-masked")?;

    let dec = owner.decrypt_all(&net.recv_rlwe(owner.role, holder.role)?)?;
    let owner_share = finalize_lazy_ras_mod(&dec, &pending.plan, t)?;
    Ok(ProductShares { holder: share, owner: owner_share, ops, returned_cts })
}

/// How B's gradient is formed under encryption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientForm {
    /// Sigmoid coefficients folded into the plaintext matrices; one level.
    #[default]
    Reduced,
    /// `⟦e⟧` formed first, then multiplied by `X_Bᵀ`; two levels.
    Unreduced,
}

/// Level and operation accounting of B's encrypted gradient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientTrace {
    pub form: GradientForm,
    /// `max level − lowest level` over the ciphertexts sent back.
    pub levels_consumed: u32,
    pub ops: OpCounter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaesarStats {
    /// Ciphertexts A returned in the forward product.
    pub forward_cts_a: usize,
    /// Ciphertexts A returned in the product for its own gradient.
    pub gradient_cts_a: usize,
    pub gradient_b: GradientTrace,
}

pub struct CaesarSession<B: SimdBackend> {
    pub params: ProtocolParams,
    pub sigmoid: SigmoidPoly,
    pub form: GradientForm,
    pub a: CaesarParty<B>,
    pub b: CaesarParty<B>,
    pub net: Network<B>,
    pub dealer: Dealer,
    /// Shares of A's weights (share 1 at A, share 2 at B), exponent 1.
    pub wa: Shares,
    /// Shares of B's weights, exponent 1.
    pub wb: Shares,
    pub lr: f64,
}

impl<B: SimdBackend> CaesarSession<B> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        params: ProtocolParams,
        key_a: Arc<B>,
        key_b: Arc<B>,
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
        if key_a.key_id() == key_b.key_id() {
            return Err(ProtocolError::ConfigInvalid("A and B need separate key pairs".into()));
        }
        if key_a.params() != &params.scheme || key_b.params() != &params.scheme {
            return Err(ProtocolError::ConfigInvalid("backend parameters differ from the protocol parameters".into()));
        }
        let t = params.t();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let wa = secret_share(&vec![0; xa.cols()], t, &mut rng);
        let wb = secret_share(&vec![0; xb.cols()], t, &mut rng);
        let a = CaesarParty::new(Party::A, xa, None, key_a.clone(), key_b.clone(), seed ^ 0xa);
        let b = CaesarParty::new(Party::B, xb, Some(y), key_b, key_a, seed ^ 0xb);
        let mut net = Network::new(params.channel, params.cost.clone());
        net.attach_meter(Party::A, a.meter.clone());
        net.attach_meter(Party::B, b.meter.clone());
        Ok(Self {
            params,
            sigmoid: SigmoidPoly::default(),
            form: GradientForm::Reduced,
            a,
            b,
            net,
            dealer: Dealer::new(ChaCha20Rng::seed_from_u64(seed ^ 0xd), t),
            wa,
            wb,
            lr,
        })
    }

    fn scheme(&self) -> SchemeParams {
        self.params.scheme
    }

    fn res(&self, v: f64, exp: u32) -> Result<u64> {
        Ok(to_residue(v, &self.params.scheme, exp)?)
    }

    /// Reveals the model (evaluation only).
    pub fn model(&self) -> LinearModel {
        let p = self.scheme();
        let dec = |s: &Shares| reconstruct(s).into_iter().map(|v| residue_to_f64(v, &p, 1)).collect();
        LinearModel { wa: dec(&self.wa), wb: dec(&self.wb) }
    }

    /// Re-shares a cleartext model (tests and warm starts).
    pub fn set_model(&mut self, m: &LinearModel) -> Result<()> {
        let p = self.scheme();
        let mut rng = ChaCha20Rng::seed_from_u64(self.wa.s1.first().copied().unwrap_or(1));
        self.wa = secret_share(&encode_vec(&m.wa, &p, 1)?, p.plain_modulus, &mut rng);
        self.wb = secret_share(&encode_vec(&m.wb, &p, 1)?, p.plain_modulus, &mut rng);
        Ok(())
    }

    /// Shares of `z = X_A·w_A + X_B·w_B` at exponent 1.
    pub fn forward(&mut self, xa: &Matrix<f64>, xb: &Matrix<f64>) -> Result<(Shares, usize)> {
        let p = self.scheme();
        let t = p.plain_modulus;
        let (xa_r, xb_r) = (encode_mat(xa, &p, 1)?, encode_mat(xb, &p, 1)?);
        let za_local = matvec_mod(&xa_r, &self.wa.s1, t);
        let zb_local = matvec_mod(&xb_r, &self.wb.s2, t);
        let pa = protocol1(&mut self.net, &mut self.a, &self.b, &xa_r, &self.wa.s2)?;
        let pb = protocol1(&mut self.net, &mut self.b, &self.a, &xb_r, &self.wb.s1)?;
        let z2 = Shares::from_a(za_local, t)
            .add(&Shares::from_b(zb_local, t))?
            .add(&Shares { s1: pa.holder, s2: pa.owner, t })?
            .add(&Shares { s1: pb.owner, s2: pb.holder, t })?;
        Ok((truncate(&mut self.net, &mut self.dealer, &z2, p.delta)?, pa.returned_cts))
    }

    /// `(q0 − y)ᵀ·X_B` at exponent 2, known to B.
    fn cleartext_term(&self, xb: &Matrix<f64>, y: &[f64]) -> Result<Vec<u64>> {
        let q0 = self.sigmoid.q0;
        let c: Vec<f64> =
            (0..xb.cols()).map(|j| (0..xb.rows()).map(|i| (q0 - y[i]) * xb.get(i, j)).sum()).collect();
        encode_vec(&c, &self.params.scheme, 2)
    }

    /// A encrypts its shares of each operand; B completes them with its own.
    fn send_operands(&mut self, layout: VectorLayout, ops: &[&Shares]) -> Result<Vec<Vec<Ct<B>>>> {
        let mut all = Vec::new();
        for s in ops {
            all.extend(self.a.encrypt_layout(layout, &s.s1, 1)?);
        }
        self.net.send_labeled(Party::A, Party::B, Payload::Rlwe(all), "z-shares")?;
        let got = self.net.recv_rlwe(Party::B, Party::A)?;
        let per = layout.ciphertext_count();
        let p = self.scheme();
        ops.iter()
            .zip(got.chunks(per))
            .map(|(s, cts)| {
                let mine = vector_slots(layout, &s.s2, p.slot_count, p.ring_degree)?;
                cts.iter()
                    .zip(mine)
                    .map(|(c, v)| Ok(self.b.peer.add_plain(c, &Plaintext::from_residues(v, 1))?))
                    .collect()
            })
            .collect()
    }

    /// B masks its pending gradient; A decrypts. Returns shares at the pending exponent.
    fn return_masked(&mut self, mut pending: PendingResult<B::Payload>) -> Result<Shares> {
        let t = self.params.t();
        let masks = mask_pending(&self.b.peer, &mut pending, &mut self.b.rng)?;
        let s2 = finalize_lazy_ras_mod(&masks, &pending.plan, t)?.into_iter().map(|v| neg_mod(v, t)).collect();
        self.net.send_labeled(Party::B, Party::A, Payload::Rlwe(pending.ciphertexts), "g_b-masked")?;
        let dec = self.a.decrypt_all(&self.net.recv_rlwe(Party::A, Party::B)?)?;
        let s1 = finalize_lazy_ras_mod(&dec, &pending.plan, t)?;
        Ok(Shares { s1, s2, t })
    }

    fn levels_consumed(&self, cts: &[Ct<B>]) -> u32 {
        let max = self.params.scheme.max_mult_level;
        cts.iter().map(|c| max - c.level).max().unwrap_or(0)
    }

    /// Shares of `X_Bᵀ·(q0 + q1·z + q2·z³ − y)` at exponent 2.
    pub fn gradient_b(
        &mut self,
        xb: &Matrix<f64>,
        y: &[f64],
        z: &Shares,
        z3: &Shares,
        form: GradientForm,
    ) -> Result<(Shares, GradientTrace)> {
        let p = self.scheme();
        let t = p.plain_modulus;
        let (m, nb) = (xb.rows(), xb.cols());
        let q = self.sigmoid;
        let terms: Vec<(f64, &Shares)> = [(q.q1, z), (q.q2, z3)].into_iter().filter(|(c, _)| *c != 0.0).collect();
        let clear = self.cleartext_term(xb, y)?;
        if terms.is_empty() {
            let trace = GradientTrace { form, levels_consumed: 0, ops: OpCounter::default() };
            return Ok((Shares::from_b(clear, t), trace));
        }
        let layout = vector_layout(Method::Packvfl, nb, m, p.slot_count)?;
        let operands = self.send_operands(layout, &terms.iter().map(|(_, s)| *s).collect::<Vec<_>>())?;
        let scope = self.b.meter.open();
        let (pending, exp) = match form {
            GradientForm::Reduced => {
                // (q_k·X_B)ᵀ·⟦z_k⟧ summed, then the cleartext term split to the plan
                let mut acc: Option<PendingResult<B::Payload>> = None;
                for ((c, _), cts) in terms.iter().zip(operands) {
                    let scaled = Matrix::from_fn(nb, m, |j, i| c * xb.get(i, j));
                    let enc = encode_matrix(Method::Packvfl, &scaled, &p, 1)?;
                    let out = matmult(&self.b.peer, Method::Packvfl, &enc, &PreparedVector { layout, ciphertexts: cts })?;
                    let out = into_pending(out, p.slot_count)?;
                    acc = Some(match acc {
                        None => out,
                        Some(mut a) => {
                            for (x, y) in a.ciphertexts.iter_mut().zip(&out.ciphertexts) {
                                *x = self.b.peer.add(x, y)?;
                            }
                            a
                        }
                    });
                }
                let mut acc = acc.expect("at least one term");
                let parts = split_for_plan(&clear, &acc.plan, t, &mut self.b.rng)?;
                for (c, v) in acc.ciphertexts.iter_mut().zip(parts) {
                    *c = self.b.peer.add_plain(c, &Plaintext::from_residues(v, 2))?;
                }
                (acc, 2)
            }
            GradientForm::Unreduced => {
                // ⟦e⟧ = Σ q_k·⟦z_k⟧ + (q0 − y), then X_Bᵀ·⟦e⟧
                let offset = encode_vec(&y.iter().map(|y| q.q0 - y).collect::<Vec<_>>(), &p, 2)?;
                let offset = vector_slots(layout, &offset, p.slot_count, p.ring_degree)?;
                let mut e: Vec<Ct<B>> = Vec::new();
                for ((c, _), cts) in terms.iter().zip(operands) {
                    let k = Plaintext::from_residues(vec![self.res(*c, 1)?; p.slot_count], 1);
                    let prods = cts.iter().map(|x| self.b.peer.mult_plain(x, &k)).collect::<hesimd_core::Result<Vec<_>>>()?;
                    e = if e.is_empty() {
                        prods
                    } else {
                        e.iter().zip(&prods).map(|(a, b)| self.b.peer.add(a, b)).collect::<hesimd_core::Result<_>>()?
                    };
                }
                let e = e
                    .iter()
                    .zip(offset)
                    .map(|(c, v)| self.b.peer.add_plain(c, &Plaintext::from_residues(v, 2)))
                    .collect::<hesimd_core::Result<Vec<_>>>()?;
                let enc = encode_matrix(Method::Packvfl, &xb.transpose(), &p, 1)?;
                let out = matmult(&self.b.peer, Method::Packvfl, &enc, &PreparedVector { layout, ciphertexts: e })?;
                (into_pending(out, p.slot_count)?, 3)
            }
        };
        let (ops, _) = self.b.meter.close(scope)?;
        let trace = GradientTrace { form, levels_consumed: self.levels_consumed(&pending.ciphertexts), ops };
        let mut g = self.return_masked(pending)?;
        if exp == 3 {
            g = truncate(&mut self.net, &mut self.dealer, &g, p.delta)?;
        }
        Ok((g, trace))
    }

    /// Shares of `X_Aᵀ·e` at exponent 2 from shares of `e` at exponent 1.
    fn gradient_a(&mut self, xa: &Matrix<f64>, e: &Shares) -> Result<(Shares, usize)> {
        let p = self.scheme();
        let t = p.plain_modulus;
        let xt = encode_mat(&xa.transpose(), &p, 1)?;
        let local = matvec_mod(&xt, &e.s1, t);
        let pr = protocol1(&mut self.net, &mut self.a, &self.b, &xt, &e.s2)?;
        Ok((Shares::from_a(local, t).add(&Shares { s1: pr.holder, s2: pr.owner, t })?, pr.returned_cts))
    }

    /// `w ← w − lr·g/m` on shares; `g` at exponent 2.
    fn update(&mut self, w: &Shares, g: &Shares, m: usize) -> Result<Shares> {
        let delta = self.params.delta();
        let mean = truncate(&mut self.net, &mut self.dealer, g, delta * m as u64)?;
        let scaled = mean.scale(self.res(self.lr, 1)?);
        let step = truncate(&mut self.net, &mut self.dealer, &scaled, delta)?;
        w.sub(&step)
    }

    /// One gradient step on the aligned batch rows `idx`.
    pub fn iteration(&mut self, idx: &[usize]) -> Result<CaesarStats> {
        let p = self.scheme();
        let t = p.plain_modulus;
        let (xa, xb) = (self.a.rows(idx), self.b.rows(idx));
        let labels = self.b.labels.as_ref().ok_or_else(|| ProtocolError::DatasetMissing("B holds no labels".into()))?;
        let y: Vec<f64> = idx.iter().map(|&i| labels[i]).collect();

        let (z, forward_cts_a) = self.forward(&xa, &xb)?;
        let zz = mul_shares(&mut self.net, &mut self.dealer, &z, &z)?;
        let zz = truncate(&mut self.net, &mut self.dealer, &zz, p.delta)?;
        let z3 = mul_shares(&mut self.net, &mut self.dealer, &zz, &z)?;
        let z3 = truncate(&mut self.net, &mut self.dealer, &z3, p.delta)?;

        let q = self.sigmoid;
        let lin = z.scale(self.res(q.q1, 1)?).add(&z3.scale(self.res(q.q2, 1)?))?;
        let lin = truncate(&mut self.net, &mut self.dealer, &lin, p.delta)?;
        let offset = encode_vec(&y.iter().map(|y| q.q0 - y).collect::<Vec<_>>(), &p, 1)?;
        let e = lin.add(&Shares::from_b(offset, t))?;

        let (ga, gradient_cts_a) = self.gradient_a(&xa, &e)?;
        let (gb, trace) = self.gradient_b(&xb, &y, &z, &z3, self.form)?;
        let m = idx.len();
        self.wa = self.update(&self.wa.clone(), &ga, m)?;
        self.wb = self.update(&self.wb.clone(), &gb, m)?;
        Ok(CaesarStats { forward_cts_a, gradient_cts_a, gradient_b: trace })
    }
}
