//! Bookkeeping layer over a backend: checks metadata and counts O1-O4.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::modarith::neg_mod;
use crate::scalar::Scalar;
use crate::simd::backend::SimdBackend;
use crate::simd::ciphertext::{Ciphertext, Domain, LweCiphertext};
use crate::simd::meter::{Meter, OpKind};
use crate::simd::params::SchemeParams;
use crate::simd::plaintext::{self, CoeffPlaintext, Plaintext};

pub type Ct<B> = Ciphertext<<B as SimdBackend>::Payload>;
pub type LweCt<B> = LweCiphertext<<B as SimdBackend>::LwePayload>;

/// Wraps a backend with level/scale/key checks and operation counting.
///
/// Additions and plaintext additions/subtractions count as O1, plaintext
/// multiplications as O2, single rotations as O3 and each output of a
/// hoisted batch as O4. Encryption, decryption and LWE extraction are free.
pub struct Evaluator<B: SimdBackend> {
    backend: Arc<B>,
    meter: Meter,
}

impl<B: SimdBackend> Clone for Evaluator<B> {
    fn clone(&self) -> Self {
        Self { backend: Arc::clone(&self.backend), meter: self.meter.clone() }
    }
}

impl<B: SimdBackend> Evaluator<B> {
    pub fn new(backend: Arc<B>) -> Self {
        Self::with_meter(backend, Meter::new())
    }

    /// Shares `meter` so that work under several keys lands in one account.
    pub fn with_meter(backend: Arc<B>, meter: Meter) -> Self {
        Self { backend, meter }
    }

    pub fn backend(&self) -> &Arc<B> {
        &self.backend
    }

    pub fn params(&self) -> &SchemeParams {
        self.backend.params()
    }

    pub fn meter(&self) -> &Meter {
        &self.meter
    }

    pub fn slot_count(&self) -> usize {
        self.params().slot_count
    }

    pub fn key_id(&self) -> u64 {
        self.backend.key_id()
    }

    fn check_key(&self, id: u64) -> Result<()> {
        let expected = self.backend.key_id();
        if id != expected {
            return Err(Error::KeyMismatch { expected, found: id });
        }
        Ok(())
    }

    fn check_ct(&self, c: &Ct<B>, domain: Domain) -> Result<()> {
        self.check_key(c.key_id)?;
        if c.domain != domain {
            return Err(Error::DomainMismatch);
        }
        if c.slot_count != self.slot_count() {
            return Err(Error::SlotCountMismatch { left: c.slot_count, right: self.slot_count() });
        }
        Ok(())
    }

    fn check_len(&self, len: usize, domain: Domain) -> Result<()> {
        let want = match domain {
            Domain::Slots => self.slot_count(),
            Domain::Coeffs => self.params().ring_degree,
        };
        if len != want {
            return Err(Error::SlotCountMismatch { left: len, right: want });
        }
        Ok(())
    }

    fn wrap(&self, payload: B::Payload, level: u32, scale_exponent: u32, domain: Domain) -> Ct<B> {
        Ciphertext {
            key_id: self.backend.key_id(),
            payload,
            level,
            scale_exponent,
            slot_count: self.slot_count(),
            domain,
        }
    }

    // ---- encryption -------------------------------------------------------

    pub fn encrypt(&self, pt: &Plaintext) -> Result<Ct<B>> {
        self.check_len(pt.slots.len(), Domain::Slots)?;
        let p = self.backend.encrypt_slots(&pt.slots)?;
        Ok(self.wrap(p, self.params().max_mult_level, pt.scale_exponent, Domain::Slots))
    }

    pub fn encrypt_values<T: Scalar>(&self, v: &[T], exp: u32) -> Result<Ct<B>> {
        self.encrypt(&plaintext::encode_at(v, self.params(), exp)?)
    }

    pub fn encrypt_coeffs(&self, pt: &CoeffPlaintext) -> Result<Ct<B>> {
        self.check_len(pt.coeffs.len(), Domain::Coeffs)?;
        let p = self.backend.encrypt_coeffs(&pt.coeffs)?;
        Ok(self.wrap(p, self.params().max_mult_level, pt.scale_exponent, Domain::Coeffs))
    }

    pub fn decrypt(&self, c: &Ct<B>) -> Result<Plaintext> {
        self.check_ct(c, Domain::Slots)?;
        let slots = self.backend.decrypt_slots(&c.payload)?;
        Ok(Plaintext::from_residues(slots, c.scale_exponent))
    }

    pub fn decrypt_f64(&self, c: &Ct<B>) -> Result<Vec<f64>> {
        Ok(plaintext::decode(&self.decrypt(c)?, self.params()))
    }

    pub fn decrypt_coeffs(&self, c: &Ct<B>) -> Result<CoeffPlaintext> {
        self.check_ct(c, Domain::Coeffs)?;
        let coeffs = self.backend.decrypt_coeffs(&c.payload)?;
        Ok(CoeffPlaintext { coeffs, scale_exponent: c.scale_exponent })
    }

    // ---- O1 -----------------------------------------------------------------

    pub fn add(&self, a: &Ct<B>, b: &Ct<B>) -> Result<Ct<B>> {
        self.binary(a, b, |x, y| self.backend.add(x, y))
    }

    pub fn sub(&self, a: &Ct<B>, b: &Ct<B>) -> Result<Ct<B>> {
        self.binary(a, b, |x, y| self.backend.sub(x, y))
    }

    fn binary(
        &self,
        a: &Ct<B>,
        b: &Ct<B>,
        f: impl FnOnce(&B::Payload, &B::Payload) -> Result<B::Payload>,
    ) -> Result<Ct<B>> {
        self.check_key(a.key_id)?;
        self.check_key(b.key_id)?;
        if a.slot_count != b.slot_count {
            return Err(Error::SlotCountMismatch { left: a.slot_count, right: b.slot_count });
        }
        if a.domain != b.domain {
            return Err(Error::DomainMismatch);
        }
        if a.scale_exponent != b.scale_exponent {
            return Err(Error::ScaleMismatch { left: a.scale_exponent, right: b.scale_exponent });
        }
        let p = f(&a.payload, &b.payload)?;
        self.meter.record_ops(OpKind::Add, 1);
        Ok(self.wrap(p, a.level.min(b.level), a.scale_exponent, a.domain))
    }

    /// Adds a slice of ciphertexts left to right; `len - 1` O1 calls.
    pub fn add_many(&self, cts: &[Ct<B>]) -> Result<Ct<B>> {
        let (first, rest) = cts
            .split_first()
            .ok_or_else(|| Error::ShapeMismatch("cannot sum an empty ciphertext list".into()))?;
        rest.iter().try_fold(first.clone(), |acc, c| self.add(&acc, c))
    }

    pub fn add_plain(&self, a: &Ct<B>, pt: &Plaintext) -> Result<Ct<B>> {
        self.check_ct(a, Domain::Slots)?;
        self.check_len(pt.slots.len(), Domain::Slots)?;
        if a.scale_exponent != pt.scale_exponent {
            return Err(Error::ScaleMismatch { left: a.scale_exponent, right: pt.scale_exponent });
        }
        let p = self.backend.add_plain_slots(&a.payload, &pt.slots)?;
        self.meter.record_ops(OpKind::Add, 1);
        Ok(self.wrap(p, a.level, a.scale_exponent, Domain::Slots))
    }

    pub fn sub_plain(&self, a: &Ct<B>, pt: &Plaintext) -> Result<Ct<B>> {
        let t = self.params().plain_modulus;
        let neg = Plaintext::from_residues(pt.slots.iter().map(|&s| neg_mod(s, t)).collect(), pt.scale_exponent);
        self.add_plain(a, &neg)
    }

    pub fn add_plain_coeffs(&self, a: &Ct<B>, pt: &CoeffPlaintext) -> Result<Ct<B>> {
        self.check_ct(a, Domain::Coeffs)?;
        self.check_len(pt.coeffs.len(), Domain::Coeffs)?;
        if a.scale_exponent != pt.scale_exponent {
            return Err(Error::ScaleMismatch { left: a.scale_exponent, right: pt.scale_exponent });
        }
        let p = self.backend.add_plain_coeffs(&a.payload, &pt.coeffs)?;
        self.meter.record_ops(OpKind::Add, 1);
        Ok(self.wrap(p, a.level, a.scale_exponent, Domain::Coeffs))
    }

    // ---- O2 -----------------------------------------------------------------

    pub fn mult_plain(&self, a: &Ct<B>, pt: &Plaintext) -> Result<Ct<B>> {
        self.check_ct(a, Domain::Slots)?;
        self.check_len(pt.slots.len(), Domain::Slots)?;
        if a.level == 0 {
            return Err(Error::LevelExhausted);
        }
        let p = self.backend.mult_plain_slots(&a.payload, &pt.slots)?;
        self.meter.record_ops(OpKind::Mult, 1);
        Ok(self.wrap(p, a.level - 1, a.scale_exponent + pt.scale_exponent, Domain::Slots))
    }

    pub fn mult_plain_coeffs(&self, a: &Ct<B>, pt: &CoeffPlaintext) -> Result<Ct<B>> {
        self.check_ct(a, Domain::Coeffs)?;
        self.check_len(pt.coeffs.len(), Domain::Coeffs)?;
        if a.level == 0 {
            return Err(Error::LevelExhausted);
        }
        let p = self.backend.mult_plain_coeffs(&a.payload, &pt.coeffs)?;
        self.meter.record_ops(OpKind::Mult, 1);
        Ok(self.wrap(p, a.level - 1, a.scale_exponent + pt.scale_exponent, Domain::Coeffs))
    }

    // ---- O3 / O4 ------------------------------------------------------------

    fn check_offset(&self, k: usize) -> Result<()> {
        let n = self.slot_count();
        if k >= n {
            return Err(Error::OffsetOutOfRange { offset: k, slots: n });
        }
        Ok(())
    }

    fn left_of_right(&self, k: usize) -> usize {
        (self.slot_count() - k) % self.slot_count()
    }

    pub fn rotate_left(&self, a: &Ct<B>, k: usize) -> Result<Ct<B>> {
        self.check_ct(a, Domain::Slots)?;
        self.check_offset(k)?;
        let p = self.backend.rotate_left(&a.payload, k)?;
        self.meter.record_ops(OpKind::Rot, 1);
        Ok(self.wrap(p, a.level, a.scale_exponent, Domain::Slots))
    }

    /// `RotR(x, k)[j] = x[(j - k) mod N′]`.
    pub fn rotate_right(&self, a: &Ct<B>, k: usize) -> Result<Ct<B>> {
        self.check_offset(k)?;
        self.rotate_left(a, self.left_of_right(k))
    }

    /// Hoisted left rotations; one O4 per offset, none for an empty list.
    pub fn hst_rot_many(&self, a: &Ct<B>, offsets: &[usize]) -> Result<Vec<Ct<B>>> {
        self.check_ct(a, Domain::Slots)?;
        let mut seen = HashSet::new();
        for &k in offsets {
            self.check_offset(k)?;
            if !seen.insert(k) {
                return Err(Error::DuplicateOffset(k));
            }
        }
        if offsets.is_empty() {
            return Ok(Vec::new());
        }
        let ps = self.backend.hoisted_rotate_left(&a.payload, offsets)?;
        self.meter.record_ops(OpKind::HstRot, offsets.len() as u64);
        Ok(ps.into_iter().map(|p| self.wrap(p, a.level, a.scale_exponent, Domain::Slots)).collect())
    }

    pub fn hst_rot_many_right(&self, a: &Ct<B>, offsets: &[usize]) -> Result<Vec<Ct<B>>> {
        for &k in offsets {
            self.check_offset(k)?;
        }
        let left: Vec<usize> = offsets.iter().map(|&k| self.left_of_right(k)).collect();
        self.hst_rot_many(a, &left)
    }

    // ---- LWE ------------------------------------------------------------------

    pub fn extract_lwe(&self, a: &Ct<B>, index: usize) -> Result<LweCt<B>> {
        self.check_ct(a, Domain::Coeffs)?;
        let degree = self.params().ring_degree;
        if index >= degree {
            return Err(Error::IndexOutOfRange { index, degree });
        }
        let payload = self.backend.extract_lwe(&a.payload, index)?;
        Ok(LweCiphertext { key_id: a.key_id, payload, scale_exponent: a.scale_exponent })
    }

    pub fn decrypt_lwe(&self, c: &LweCt<B>) -> Result<u64> {
        self.check_key(c.key_id)?;
        self.backend.decrypt_lwe(&c.payload)
    }
}
