//! Slot batching for a prime plaintext modulus `t ≡ 1 (mod 2N)`.
//!
//! The evaluation points `psi^e` (odd `e`) split into two rows indexed by
//! `e = 5^c` and `e = -5^c`. A vector of `N/2` values is written to column
//! `c` of both rows, so the automorphism `X -> X^(5^k)` rotates it left by
//! `k` positions cyclically.

use crate::error::{Error, Result};
use crate::modarith::{is_prime, pow_mod};
use crate::rlwe::ntt::NttTable;

/// Galois element implementing a left rotation by `k` slots.
pub fn rotation_galois_element(k: usize, n: usize) -> usize {
    pow_mod(5, k as u64, 2 * n as u64) as usize
}

#[derive(Debug, Clone)]
pub struct SlotEncoder {
    table: NttTable,
    /// For each slot, its transform positions in the two rows.
    positions: Vec<(usize, usize)>,
}

impl SlotEncoder {
    pub fn new(n: usize, t: u64) -> Result<Self> {
        if !is_prime(t) || t % (2 * n as u64) != 1 {
            return Err(Error::BadModulus(format!("plain modulus {t} must be a prime congruent to 1 mod {}", 2 * n)));
        }
        let table = NttTable::new(n, t)?;
        let two_n = 2 * n;
        let positions = (0..n / 2)
            .map(|c| {
                let e = rotation_galois_element(c, n);
                (table.position(e), table.position(two_n - e))
            })
            .collect();
        Ok(Self { table, positions })
    }

    pub fn slot_count(&self) -> usize {
        self.positions.len()
    }

    pub fn plain_modulus(&self) -> u64 {
        self.table.modulus()
    }

    /// Slot residues (length `N/2`) to polynomial coefficients mod `t`.
    pub fn encode(&self, slots: &[u64]) -> Result<Vec<u64>> {
        if slots.len() != self.slot_count() {
            return Err(Error::SlotCountMismatch { left: slots.len(), right: self.slot_count() });
        }
        let t = self.plain_modulus();
        let mut evals = vec![0u64; self.table.degree()];
        for (&(p0, p1), &v) in self.positions.iter().zip(slots) {
            evals[p0] = v % t;
            evals[p1] = v % t;
        }
        self.table.inverse(&mut evals);
        Ok(evals)
    }

    /// Polynomial coefficients mod `t` to slot residues (row 0).
    pub fn decode(&self, coeffs: &[u64]) -> Vec<u64> {
        let mut evals = coeffs.to_vec();
        self.table.forward(&mut evals);
        self.positions.iter().map(|&(p0, _)| evals[p0]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::{add_mod, sub_mod};

    fn apply_galois(coeffs: &[u64], g: usize, t: u64) -> Vec<u64> {
        let n = coeffs.len();
        let mut out = vec![0u64; n];
        for (i, &c) in coeffs.iter().enumerate() {
            let k = i * g % (2 * n);
            if k < n {
                out[k] = add_mod(out[k], c, t);
            } else {
                out[k - n] = sub_mod(out[k - n], c, t);
            }
        }
        out
    }

    #[test]
    fn galois_automorphism_rotates_left() {
        let enc = SlotEncoder::new(16, 97).unwrap();
        let v: Vec<u64> = (1..=8).collect();
        let coeffs = enc.encode(&v).unwrap();
        assert_eq!(enc.decode(&coeffs), v);
        for k in 0..8 {
            let rotated = apply_galois(&coeffs, rotation_galois_element(k, 16), 97);
            let mut expect = v.clone();
            expect.rotate_left(k);
            assert_eq!(enc.decode(&rotated), expect, "k = {k}");
        }
    }

    #[test]
    fn bad_modulus() {
        assert!(matches!(SlotEncoder::new(16, 23), Err(Error::BadModulus(_))));
        assert!(SlotEncoder::new(16, 97).is_ok());
    }
}
