//! Slot and coefficient plaintexts with fixed-point encoding.

use crate::error::{Error, Result};
use crate::modarith::{centered, reduce_i128};
use crate::scalar::Scalar;
use crate::simd::params::SchemeParams;

/// A slot-domain plaintext: exactly `N'` residues mod `t`, vacant slots zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plaintext {
    pub slots: Vec<u64>,
    /// Power of delta carried by the slot values.
    pub scale_exponent: u32,
}

/// A coefficient-domain plaintext of `N` residues mod `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffPlaintext {
    pub coeffs: Vec<u64>,
    pub scale_exponent: u32,
}

impl Plaintext {
    pub fn zero(slots: usize, scale_exponent: u32) -> Self {
        Self { slots: vec![0; slots], scale_exponent }
    }

    pub fn from_residues(slots: Vec<u64>, scale_exponent: u32) -> Self {
        Self { slots, scale_exponent }
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }
}

/// Maps one value to `round(v * delta^exp) mod t`, rejecting values at or beyond `t/2`.
pub fn to_residue<T: Scalar>(v: T, params: &SchemeParams, exp: u32) -> Result<u64> {
    let overflow = || Error::OverflowAtScale { value: format!("{v:?}") };
    let scale = params.scale_factor(exp).ok_or_else(overflow)?;
    let fixed = v.to_fixed(scale).ok_or_else(overflow)?;
    let t = params.plain_modulus as i128;
    if fixed.unsigned_abs() >= (t as u128).div_ceil(2) {
        return Err(overflow());
    }
    Ok(reduce_i128(fixed, params.plain_modulus))
}

/// Encodes `v` into the first `len(v)` slots at scale delta; remaining slots are zero.
pub fn encode<T: Scalar>(v: &[T], params: &SchemeParams) -> Result<Plaintext> {
    encode_at(v, params, 1)
}

/// Encodes at scale `delta^exp`.
pub fn encode_at<T: Scalar>(v: &[T], params: &SchemeParams, exp: u32) -> Result<Plaintext> {
    let n = params.slot_count;
    if v.len() > n {
        return Err(Error::VectorTooLong { len: v.len(), slots: n });
    }
    let mut slots = vec![0u64; n];
    for (s, &x) in slots.iter_mut().zip(v) {
        *s = to_residue(x, params, exp)?;
    }
    Ok(Plaintext { slots, scale_exponent: exp })
}

/// Encodes into polynomial coefficients (no slot transform).
pub fn encode_coeffs_at<T: Scalar>(v: &[T], params: &SchemeParams, exp: u32) -> Result<CoeffPlaintext> {
    let n = params.ring_degree;
    if v.len() > n {
        return Err(Error::VectorTooLong { len: v.len(), slots: n });
    }
    let mut coeffs = vec![0u64; n];
    for (c, &x) in coeffs.iter_mut().zip(v) {
        *c = to_residue(x, params, exp)?;
    }
    Ok(CoeffPlaintext { coeffs, scale_exponent: exp })
}

/// Centered integer value of every slot, without removing the scale.
pub fn decode_raw(slots: &[u64], t: u64) -> Vec<i128> {
    slots.iter().map(|&s| centered(s, t)).collect()
}

/// Converts a residue carrying `delta^exp` back to a real number.
pub fn residue_to_f64(s: u64, params: &SchemeParams, exp: u32) -> f64 {
    let v = centered(s, params.plain_modulus) as f64;
    v / (params.delta as f64).powi(exp as i32)
}

pub fn decode(pt: &Plaintext, params: &SchemeParams) -> Vec<f64> {
    pt.slots.iter().map(|&s| residue_to_f64(s, params, pt.scale_exponent)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_slot_value() {
        let p = SchemeParams::semantic(4).with_delta(1 << 10).with_plain_modulus((1 << 20) + 7);
        let pt = encode(&[1.5f64], &p).unwrap();
        assert_eq!(pt.slots, vec![1536, 0, 0, 0]);
        assert_eq!(pt.scale_exponent, 1);
    }

    #[test]
    fn empty_vector_is_all_zero() {
        let p = SchemeParams::semantic(8);
        let pt = encode::<f64>(&[], &p).unwrap();
        assert_eq!(pt.slots, vec![0; 8]);
    }

    #[test]
    fn errors() {
        let p = SchemeParams::semantic(2).with_delta(1 << 10).with_plain_modulus((1 << 20) + 7);
        assert_eq!(encode(&[1.0, 2.0, 3.0], &p), Err(Error::VectorTooLong { len: 3, slots: 2 }));
        assert!(matches!(encode(&[600.0], &p), Err(Error::OverflowAtScale { .. })));
        assert!(encode(&[-500.0], &p).is_ok());
    }

    #[test]
    fn negative_values_round_trip() {
        let p = SchemeParams::semantic(4);
        let pt = encode(&[-2.25, 3.0], &p).unwrap();
        assert_eq!(decode(&pt, &p)[..2], [-2.25, 3.0]);
    }
}
