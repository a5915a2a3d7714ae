//! Cleartext simulation backend: payloads are the slot residues themselves.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::modarith::{add_mod, mul_mod, sub_mod};
use crate::simd::backend::SimdBackend;
use crate::simd::params::SchemeParams;

static NEXT_KEY_ID: AtomicU64 = AtomicU64::new(1);

/// Fresh process-unique key identifier.
pub fn fresh_key_id() -> u64 {
    NEXT_KEY_ID.fetch_add(1, Ordering::Relaxed)
}

/// Exact simulation of the SIMD interface with integer arithmetic mod `t`.
///
/// Offers `N′ = N` slots for any power-of-two `N`. In the coefficient domain
/// the payload is the coefficient vector and products are negacyclic.
#[derive(Debug)]
pub struct SemanticBackend {
    params: SchemeParams,
    key_id: u64,
}

impl SemanticBackend {
    pub fn new(params: SchemeParams) -> Result<Self> {
        params.validate()?;
        if params.slot_count != params.ring_degree {
            return Err(Error::InvalidParams("the semantic backend uses N' = N".into()));
        }
        Ok(Self { params, key_id: fresh_key_id() })
    }

    pub fn with_slots(slots: usize) -> Result<Self> {
        Self::new(SchemeParams::semantic(slots))
    }

    fn t(&self) -> u64 {
        self.params.plain_modulus
    }

    fn check(&self, v: &[u64], len: usize) -> Result<()> {
        if v.len() != len {
            return Err(Error::SlotCountMismatch { left: v.len(), right: len });
        }
        Ok(())
    }

    fn zip(&self, a: &[u64], b: &[u64], f: impl Fn(u64, u64, u64) -> u64) -> Result<Vec<u64>> {
        self.check(b, a.len())?;
        let t = self.t();
        Ok(a.iter().zip(b).map(|(&x, &y)| f(x, y, t)).collect())
    }
}

/// Negacyclic product in `Z_t[X]/(X^N + 1)`, skipping zero coefficients of `b`.
pub fn negacyclic_mul(a: &[u64], b: &[u64], t: u64) -> Vec<u64> {
    let n = a.len();
    let mut out = vec![0u64; n];
    for (j, &bj) in b.iter().enumerate() {
        if bj == 0 {
            continue;
        }
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let p = mul_mod(ai, bj, t);
            let k = i + j;
            if k < n {
                out[k] = add_mod(out[k], p, t);
            } else {
                out[k - n] = sub_mod(out[k - n], p, t);
            }
        }
    }
    out
}

impl SimdBackend for SemanticBackend {
    type Payload = Vec<u64>;
    type LwePayload = u64;

    fn name(&self) -> &'static str {
        "semantic"
    }

    fn key_id(&self) -> u64 {
        self.key_id
    }

    fn params(&self) -> &SchemeParams {
        &self.params
    }

    fn encrypt_slots(&self, slots: &[u64]) -> Result<Vec<u64>> {
        self.check(slots, self.params.slot_count)?;
        Ok(slots.iter().map(|&s| s % self.t()).collect())
    }

    fn decrypt_slots(&self, c: &Vec<u64>) -> Result<Vec<u64>> {
        Ok(c.clone())
    }

    fn encrypt_coeffs(&self, coeffs: &[u64]) -> Result<Vec<u64>> {
        self.check(coeffs, self.params.ring_degree)?;
        Ok(coeffs.iter().map(|&s| s % self.t()).collect())
    }

    fn decrypt_coeffs(&self, c: &Vec<u64>) -> Result<Vec<u64>> {
        Ok(c.clone())
    }

    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Result<Vec<u64>> {
        self.zip(a, b, add_mod)
    }

    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Result<Vec<u64>> {
        self.zip(a, b, sub_mod)
    }

    fn add_plain_slots(&self, a: &Vec<u64>, slots: &[u64]) -> Result<Vec<u64>> {
        self.zip(a, slots, add_mod)
    }

    fn add_plain_coeffs(&self, a: &Vec<u64>, coeffs: &[u64]) -> Result<Vec<u64>> {
        self.zip(a, coeffs, add_mod)
    }

    fn mult_plain_slots(&self, a: &Vec<u64>, slots: &[u64]) -> Result<Vec<u64>> {
        self.zip(a, slots, mul_mod)
    }

    fn mult_plain_coeffs(&self, a: &Vec<u64>, coeffs: &[u64]) -> Result<Vec<u64>> {
        self.check(coeffs, a.len())?;
        Ok(negacyclic_mul(a, coeffs, self.t()))
    }

    fn rotate_left(&self, a: &Vec<u64>, k: usize) -> Result<Vec<u64>> {
        let n = a.len();
        if k >= n {
            return Err(Error::OffsetOutOfRange { offset: k, slots: n });
        }
        let mut out = a.clone();
        out.rotate_left(k);
        Ok(out)
    }

    fn hoisted_rotate_left(&self, a: &Vec<u64>, ks: &[usize]) -> Result<Vec<Vec<u64>>> {
        ks.iter().map(|&k| self.rotate_left(a, k)).collect()
    }

    fn extract_lwe(&self, a: &Vec<u64>, index: usize) -> Result<u64> {
        a.get(index).copied().ok_or(Error::IndexOutOfRange { index, degree: a.len() })
    }

    fn decrypt_lwe(&self, c: &u64) -> Result<u64> {
        Ok(*c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negacyclic_wraps_with_sign() {
        // (1 + X^3) * X = X + X^4 = X - 1 in Z[X]/(X^4+1)
        let t = 97;
        let r = negacyclic_mul(&[1, 0, 0, 1], &[0, 1, 0, 0], t);
        assert_eq!(r, vec![96, 1, 0, 0]);
    }

    #[test]
    fn rejects_half_slot_params() {
        let mut p = SchemeParams::semantic(8);
        p.ring_degree = 16;
        assert!(SemanticBackend::new(p).is_err());
    }
}
