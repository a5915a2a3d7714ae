use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{is_prime, prime_below};
use crate::simd::params::SchemeParams;

/// Live parameters of the RLWE scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RlweParams {
    /// Batching parameters reported to the SIMD layer (`N′ = N/2`).
    pub scheme: SchemeParams,
    /// Ciphertext modulus, a prime below 2^62 with `q ≡ 1 (mod 2N·t)`.
    pub q: u64,
    /// Auxiliary prime used only inside key switching.
    pub special_prime: u64,
    /// Key-switching digit width in bits.
    pub digit_bits: u32,
    /// Standard deviation of the error distribution.
    pub sigma: f64,
}

/// Largest prime below 2^62 that supports the length-`n` NTT and differs from `q`.
fn special_prime(n: usize, q: u64) -> Result<u64> {
    let step = 2 * n as u64;
    let mut k = ((1u64 << 62) - 2) / step;
    while k > 0 {
        let p = k * step + 1;
        if p != q && is_prime(p) {
            return Ok(p);
        }
        k -= 1;
    }
    Err(Error::BadModulus(format!("no special prime for N = {n}")))
}

impl RlweParams {
    /// Picks the largest suitable 62-bit prime `q` for ring degree `n` and plain modulus `t`.
    ///
    /// `q ≡ 1 (mod t)` makes `floor(q/t)·t = q - 1`, so plaintext products
    /// pick up no rounding term from the scaling factor.
    pub fn new(n: usize, t: u64, max_mult_level: u32) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidParams(format!("ring degree {n} must be a power of two >= 4")));
        }
        if !is_prime(t) || t % (2 * n as u64) != 1 {
            return Err(Error::BadModulus(format!("plain modulus {t} must be a prime congruent to 1 mod {}", 2 * n)));
        }
        let step = 2 * n as u64 * t;
        let q = prime_below(62, step).ok_or_else(|| Error::BadModulus(format!("no 62-bit prime q = 1 mod {step}")))?;
        let special_prime = special_prime(n, q)?;
        let scheme = SchemeParams {
            ring_degree: n,
            slot_count: n / 2,
            coeff_modulus_bits: 64 - q.leading_zeros(),
            plain_modulus: t,
            delta: 1,
            max_mult_level,
        };
        Ok(Self { scheme, q, special_prime, digit_bits: 62, sigma: 3.2 })
    }

    /// `N = 1024`, `t = 12289`, two plaintext multiplications.
    pub fn desk_1024() -> Self {
        Self::new(1024, 12289, 2).expect("desk-1024 parameters are valid")
    }

    /// Tiny ring for exhaustive tests: `N = 16`, `t = 97`.
    pub fn toy() -> Self {
        Self::new(16, 97, 2).expect("toy parameters are valid")
    }

    pub fn degree(&self) -> usize {
        self.scheme.ring_degree
    }

    pub fn plain_modulus(&self) -> u64 {
        self.scheme.plain_modulus
    }

    /// Number of key-switching digits.
    pub fn digits(&self) -> usize {
        (64 - self.q.leading_zeros()).div_ceil(self.digit_bits) as usize
    }

    /// `floor(q / t)`.
    pub fn delta_q(&self) -> u64 {
        self.q / self.plain_modulus()
    }
}
