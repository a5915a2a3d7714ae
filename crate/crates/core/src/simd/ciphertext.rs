use serde::{Deserialize, Serialize};

/// Which encoding the payload carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Slots,
    Coeffs,
}

/// A SIMD ciphertext together with its bookkeeping metadata.
#[derive(Debug, Clone)]
pub struct Ciphertext<P> {
    pub key_id: u64,
    pub payload: P,
    /// Remaining plaintext multiplications.
    pub level: u32,
    pub scale_exponent: u32,
    pub slot_count: usize,
    pub domain: Domain,
}

/// One coefficient of a coefficient-domain ciphertext, extracted as LWE.
#[derive(Debug, Clone)]
pub struct LweCiphertext<L> {
    pub key_id: u64,
    pub payload: L,
    pub scale_exponent: u32,
}
