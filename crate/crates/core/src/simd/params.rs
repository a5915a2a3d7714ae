use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest prime below 2^40; default plaintext modulus of the semantic backend.
pub const DEFAULT_PLAIN_MODULUS: u64 = 1_099_511_627_689;
/// 2^61 - 1, used where shares and masks need more headroom.
pub const WIDE_PLAIN_MODULUS: u64 = (1 << 61) - 1;
pub const DEFAULT_DELTA: u64 = 1 << 10;

/// Parameters shared by every SIMD backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Ring degree `N`.
    pub ring_degree: usize,
    /// Slots per ciphertext `N'`.
    pub slot_count: usize,
    /// Bit length of the ciphertext modulus.
    pub coeff_modulus_bits: u32,
    /// Plaintext modulus `t`.
    pub plain_modulus: u64,
    /// Fixed-point scale.
    pub delta: u64,
    /// Multiplications a fresh ciphertext can absorb.
    pub max_mult_level: u32,
}

impl SchemeParams {
    /// Parameters for the semantic backend, which batches `N' = N` slots.
    pub fn semantic(slots: usize) -> Self {
        Self {
            ring_degree: slots,
            slot_count: slots,
            coeff_modulus_bits: 122,
            plain_modulus: DEFAULT_PLAIN_MODULUS,
            delta: DEFAULT_DELTA,
            max_mult_level: 2,
        }
    }

    pub fn with_plain_modulus(mut self, t: u64) -> Self {
        self.plain_modulus = t;
        self
    }

    pub fn with_delta(mut self, delta: u64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.max_mult_level = level;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ring_degree;
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidParams(format!("ring degree {n} is not a power of two")));
        }
        if self.slot_count != n && self.slot_count * 2 != n {
            return Err(Error::InvalidParams(format!(
                "slot count {} must be N or N/2 for N = {n}",
                self.slot_count
            )));
        }
        if self.delta == 0 {
            return Err(Error::InvalidParams("delta must be >= 1".into()));
        }
        if self.max_mult_level == 0 {
            return Err(Error::InvalidParams("max_mult_level must be >= 1".into()));
        }
        if self.plain_modulus < 2 {
            return Err(Error::InvalidParams("plain modulus must be >= 2".into()));
        }
        if self.coeff_modulus_bits == 0 {
            return Err(Error::InvalidParams("coeff_modulus_bits must be positive".into()));
        }
        Ok(())
    }

    /// `delta^exp` as an integer, if it fits.
    pub fn scale_factor(&self, exp: u32) -> Option<u128> {
        (self.delta as u128).checked_pow(exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SchemeParams::semantic(8).validate().is_ok());
        assert!(SchemeParams::semantic(6).validate().is_err());
        assert!(SchemeParams::semantic(8).with_level(0).validate().is_err());
        assert!(SchemeParams::semantic(8).with_delta(0).validate().is_err());
        let mut p = SchemeParams::semantic(8);
        p.ring_degree = 16;
        assert!(p.validate().is_ok());
        p.ring_degree = 32;
        assert!(p.validate().is_err());
    }
}
