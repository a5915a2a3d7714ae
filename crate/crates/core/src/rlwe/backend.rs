//! The RLWE scheme wired into the SIMD backend interface.

use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::modarith::{add_mod, centered, inv_mod, mul_mod, reduce_i128, sub_mod};
use crate::rlwe::encoder::SlotEncoder;
use crate::rlwe::keys::{keygen, sample_error, sample_ternary, KeyMaterial};
use crate::rlwe::ntt::NttTable;
use crate::rlwe::params::RlweParams;
use crate::rlwe::poly::{PolyDomain, PolyRingElement};
use crate::simd::backend::SimdBackend;
use crate::simd::params::SchemeParams;
use crate::simd::semantic::fresh_key_id;

/// `(c0, c1)` in NTT form, decrypting as `c0 + c1·s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RlweCiphertext {
    pub c0: PolyRingElement,
    pub c1: PolyRingElement,
}

/// Decrypts as `b + <a, s>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LweCiphertext {
    pub a: Vec<u64>,
    pub b: u64,
}

pub struct RlweBackend {
    params: RlweParams,
    table: NttTable,
    table_p: NttTable,
    /// `P^{-1} mod q`.
    p_inv: u64,
    encoder: SlotEncoder,
    keys: KeyMaterial,
    key_id: u64,
    rng: Mutex<ChaCha20Rng>,
}

impl std::fmt::Debug for RlweBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RlweBackend")
            .field("params", &self.params)
            .field("key_id", &self.key_id)
            .field("rotations", &self.keys.galois_keys.keys().collect::<Vec<_>>())
            .finish()
    }
}

/// Digit decomposition of the ciphertext `c1` in transform form mod `q` and
/// mod `P`, reusable across any number of automorphisms.
struct Decomposed {
    digits_q: Vec<PolyRingElement>,
    digits_p: Vec<PolyRingElement>,
}

impl RlweBackend {
    /// Generates fresh keys supporting left rotations by `rot_offsets`.
    pub fn new(params: RlweParams, rot_offsets: &[usize], seed: u64) -> Result<Self> {
        params.scheme.validate()?;
        let n = params.degree();
        let table = NttTable::new(n, params.q)?;
        let table_p = NttTable::new(n, params.special_prime)?;
        let p_inv = inv_mod(params.special_prime % params.q, params.q);
        let encoder = SlotEncoder::new(n, params.plain_modulus())?;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let keys = keygen(&params, &table, &table_p, rot_offsets, &mut rng)?;
        Ok(Self { params, table, table_p, p_inv, encoder, keys, key_id: fresh_key_id(), rng: Mutex::new(rng) })
    }

    pub fn rlwe_params(&self) -> &RlweParams {
        &self.params
    }

    pub fn keys(&self) -> &KeyMaterial {
        &self.keys
    }

    pub fn table(&self) -> &NttTable {
        &self.table
    }

    pub fn rotation_offsets(&self) -> Vec<usize> {
        self.keys.galois_keys.keys().copied().collect()
    }

    fn q(&self) -> u64 {
        self.params.q
    }

    fn t(&self) -> u64 {
        self.params.plain_modulus()
    }

    fn n(&self) -> usize {
        self.params.degree()
    }

    /// Lifts residues mod `t` to centered residues mod `q`, times `scale`.
    fn lift(&self, m: &[u64], scale: u64) -> PolyRingElement {
        let (q, t) = (self.q(), self.t());
        let coeffs = m.iter().map(|&x| mul_mod(reduce_i128(centered(x % t, t), q), scale, q)).collect();
        PolyRingElement { coeffs, modulus: q, domain: PolyDomain::Coeff }.to_ntt(&self.table)
    }

    fn encrypt_poly(&self, m: &[u64]) -> Result<RlweCiphertext> {
        let (n, q, sigma) = (self.n(), self.q(), self.params.sigma);
        let (u, e1, e2) = {
            let mut rng = self.rng.lock().unwrap_or_else(|e| e.into_inner());
            let u = sample_ternary(n, q, &mut *rng);
            let e1 = sample_error(n, q, sigma, &mut *rng);
            let e2 = sample_error(n, q, sigma, &mut *rng);
            (u, e1, e2)
        };
        let dq = self.params.delta_q();
        let mut base = e1;
        for (c, &x) in base.coeffs.iter_mut().zip(m) {
            *c = add_mod(*c, mul_mod(x % self.t(), dq, q), q);
        }
        let base = base.to_ntt(&self.table);
        let u = u.to_ntt(&self.table);
        let (pb, pa) = &self.keys.public;
        let c0 = pb.mul_pointwise(&u)?.add(&base)?;
        let c1 = pa.mul_pointwise(&u)?.add(&e2.to_ntt(&self.table))?;
        Ok(RlweCiphertext { c0, c1 })
    }

    /// `round(t · x / q) mod t` for `x` in `[0, q)`.
    fn scale_down(&self, x: u64) -> u64 {
        let (q, t) = (self.q() as u128, self.t() as u128);
        (((x as u128 * t + q / 2) / q) % t) as u64
    }

    fn decrypt_poly(&self, c: &RlweCiphertext) -> Result<Vec<u64>> {
        let x = c.c1.mul_pointwise(&self.keys.secret)?.add(&c.c0)?.to_coeff(&self.table);
        Ok(x.coeffs.iter().map(|&v| self.scale_down(v)).collect())
    }

    /// Distance of the decryption's noise from the nearest multiple of `q/t`, in bits.
    pub fn noise_bits(&self, c: &RlweCiphertext) -> Result<f64> {
        let x = c.c1.mul_pointwise(&self.keys.secret)?.add(&c.c0)?.to_coeff(&self.table);
        let (q, t) = (self.q() as u128, self.t() as u128);
        let worst = x
            .coeffs
            .iter()
            .map(|&v| {
                let m = (v as u128 * t + q / 2) / q;
                let r = (v as i128) - (m * q / t) as i128;
                r.unsigned_abs()
            })
            .max()
            .unwrap_or(0);
        Ok((worst.max(1) as f64).log2())
    }

    fn decompose(&self, c1: &PolyRingElement) -> Decomposed {
        let coeff = c1.clone().to_coeff(&self.table);
        let bits = self.params.digit_bits;
        let mask = if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 };
        let sp = self.params.special_prime;
        let mut digits_q = Vec::new();
        let mut digits_p = Vec::new();
        for j in 0..self.params.digits() {
            let shift = bits * j as u32;
            let d: Vec<u64> = coeff.coeffs.iter().map(|&x| (x >> shift) & mask).collect();
            let dp = d.iter().map(|&x| x % sp).collect();
            digits_q.push(PolyRingElement { coeffs: d, modulus: self.q(), domain: PolyDomain::Coeff }.to_ntt(&self.table));
            digits_p.push(PolyRingElement { coeffs: dp, modulus: sp, domain: PolyDomain::Coeff }.to_ntt(&self.table_p));
        }
        Decomposed { digits_q, digits_p }
    }

    /// Divides a value given mod `q·P` (as two transform-domain residues) by `P`
    /// with rounding, returning it mod `q` in transform form.
    fn mod_down(&self, xq: PolyRingElement, xp: PolyRingElement) -> PolyRingElement {
        let q = self.q();
        let sp = self.params.special_prime;
        let mut xq = xq.to_coeff(&self.table);
        let xp = xp.to_coeff(&self.table_p);
        for (a, &b) in xq.coeffs.iter_mut().zip(&xp.coeffs) {
            let r = reduce_i128(centered(b, sp), q);
            *a = mul_mod(sub_mod(*a, r, q), self.p_inv, q);
        }
        xq.to_ntt(&self.table)
    }

    fn apply_rotation(&self, c: &RlweCiphertext, dec: &Decomposed, k: usize) -> Result<RlweCiphertext> {
        if k == 0 {
            return Ok(c.clone());
        }
        let key = self.keys.galois_keys.get(&k).ok_or(Error::MissingGaloisKey(k))?;
        let (n, q, sp) = (self.n(), self.q(), self.params.special_prime);
        let mut acc0_q = PolyRingElement::zero(n, q, PolyDomain::Ntt);
        let mut acc1_q = PolyRingElement::zero(n, q, PolyDomain::Ntt);
        let mut acc0_p = PolyRingElement::zero(n, sp, PolyDomain::Ntt);
        let mut acc1_p = PolyRingElement::zero(n, sp, PolyDomain::Ntt);
        for j in 0..dec.digits_q.len() {
            let dq = dec.digits_q[j].permuted(&key.perm_q);
            let dp = dec.digits_p[j].permuted(&key.perm_p);
            acc0_q.add_assign_product(&dq, &key.b_q[j]);
            acc1_q.add_assign_product(&dq, &key.a_q[j]);
            acc0_p.add_assign_product(&dp, &key.b_p[j]);
            acc1_p.add_assign_product(&dp, &key.a_p[j]);
        }
        let c0 = c.c0.permuted(&key.perm_q).add(&self.mod_down(acc0_q, acc0_p))?;
        let c1 = self.mod_down(acc1_q, acc1_p);
        Ok(RlweCiphertext { c0, c1 })
    }

    fn check_offsets(&self, ks: &[usize]) -> Result<()> {
        let slots = self.params.scheme.slot_count;
        for &k in ks {
            if k >= slots {
                return Err(Error::OffsetOutOfRange { offset: k, slots });
            }
            if k != 0 && !self.keys.galois_keys.contains_key(&k) {
                return Err(Error::MissingGaloisKey(k));
            }
        }
        Ok(())
    }

    fn map_pair(
        &self,
        a: &RlweCiphertext,
        f: impl Fn(&PolyRingElement) -> Result<PolyRingElement>,
    ) -> Result<RlweCiphertext> {
        Ok(RlweCiphertext { c0: f(&a.c0)?, c1: f(&a.c1)? })
    }

    fn check_len(&self, v: &[u64], len: usize) -> Result<()> {
        if v.len() != len {
            return Err(Error::SlotCountMismatch { left: v.len(), right: len });
        }
        Ok(())
    }

    fn add_plain_poly(&self, a: &RlweCiphertext, m: &[u64]) -> Result<RlweCiphertext> {
        let p = self.lift(m, self.params.delta_q());
        Ok(RlweCiphertext { c0: a.c0.add(&p)?, c1: a.c1.clone() })
    }

    fn mult_plain_poly(&self, a: &RlweCiphertext, m: &[u64]) -> Result<RlweCiphertext> {
        let p = self.lift(m, 1);
        self.map_pair(a, |x| x.mul_pointwise(&p))
    }
}

impl SimdBackend for RlweBackend {
    type Payload = RlweCiphertext;
    type LwePayload = LweCiphertext;

    fn name(&self) -> &'static str {
        "rlwe"
    }

    fn key_id(&self) -> u64 {
        self.key_id
    }

    fn params(&self) -> &SchemeParams {
        &self.params.scheme
    }

    fn encrypt_slots(&self, slots: &[u64]) -> Result<RlweCiphertext> {
        self.encrypt_poly(&self.encoder.encode(slots)?)
    }

    fn decrypt_slots(&self, c: &RlweCiphertext) -> Result<Vec<u64>> {
        Ok(self.encoder.decode(&self.decrypt_poly(c)?))
    }

    fn encrypt_coeffs(&self, coeffs: &[u64]) -> Result<RlweCiphertext> {
        self.check_len(coeffs, self.n())?;
        self.encrypt_poly(coeffs)
    }

    fn decrypt_coeffs(&self, c: &RlweCiphertext) -> Result<Vec<u64>> {
        self.decrypt_poly(c)
    }

    fn add(&self, a: &RlweCiphertext, b: &RlweCiphertext) -> Result<RlweCiphertext> {
        Ok(RlweCiphertext { c0: a.c0.add(&b.c0)?, c1: a.c1.add(&b.c1)? })
    }

    fn sub(&self, a: &RlweCiphertext, b: &RlweCiphertext) -> Result<RlweCiphertext> {
        Ok(RlweCiphertext { c0: a.c0.sub(&b.c0)?, c1: a.c1.sub(&b.c1)? })
    }

    fn add_plain_slots(&self, a: &RlweCiphertext, slots: &[u64]) -> Result<RlweCiphertext> {
        self.add_plain_poly(a, &self.encoder.encode(slots)?)
    }

    fn add_plain_coeffs(&self, a: &RlweCiphertext, coeffs: &[u64]) -> Result<RlweCiphertext> {
        self.check_len(coeffs, self.n())?;
        self.add_plain_poly(a, coeffs)
    }

    fn mult_plain_slots(&self, a: &RlweCiphertext, slots: &[u64]) -> Result<RlweCiphertext> {
        self.mult_plain_poly(a, &self.encoder.encode(slots)?)
    }

    fn mult_plain_coeffs(&self, a: &RlweCiphertext, coeffs: &[u64]) -> Result<RlweCiphertext> {
        self.check_len(coeffs, self.n())?;
        self.mult_plain_poly(a, coeffs)
    }

    fn rotate_left(&self, a: &RlweCiphertext, k: usize) -> Result<RlweCiphertext> {
        self.check_offsets(&[k])?;
        if k == 0 {
            return Ok(a.clone());
        }
        let dec = self.decompose(&a.c1);
        self.apply_rotation(a, &dec, k)
    }

    fn hoisted_rotate_left(&self, a: &RlweCiphertext, ks: &[usize]) -> Result<Vec<RlweCiphertext>> {
        self.check_offsets(ks)?;
        if ks.iter().all(|&k| k == 0) {
            return Ok(vec![a.clone(); ks.len()]);
        }
        let dec = self.decompose(&a.c1);
        ks.iter().map(|&k| self.apply_rotation(a, &dec, k)).collect()
    }

    fn extract_lwe(&self, a: &RlweCiphertext, index: usize) -> Result<LweCiphertext> {
        let n = self.n();
        if index >= n {
            return Err(Error::IndexOutOfRange { index, degree: n });
        }
        let q = self.q();
        let c0 = a.c0.clone().to_coeff(&self.table);
        let c1 = a.c1.clone().to_coeff(&self.table);
        let lwe_a = (0..n)
            .map(|i| if i <= index { c1.coeffs[index - i] } else { crate::modarith::neg_mod(c1.coeffs[n + index - i], q) })
            .collect();
        Ok(LweCiphertext { a: lwe_a, b: c0.coeffs[index] })
    }

    fn decrypt_lwe(&self, c: &LweCiphertext) -> Result<u64> {
        let q = self.q();
        let x = c.a.iter().zip(&self.keys.secret_coeffs).fold(c.b, |acc, (&a, &s)| add_mod(acc, mul_mod(a, s, q), q));
        Ok(self.scale_down(x))
    }
}
