//! The payload-level interface every SIMD backend implements.

use std::fmt::Debug;

use crate::error::Result;
use crate::simd::params::SchemeParams;

/// Raw homomorphic primitives over encrypted payloads.
///
/// Implementations do no bookkeeping: levels, scales, slot counts and
/// operation counts are tracked by [`crate::simd::Evaluator`]. Slot vectors
/// handed to and returned by a backend are residues mod `t` of length `N′`;
/// coefficient vectors are residues mod `t` of length `N`.
pub trait SimdBackend: Send + Sync {
    type Payload: Clone + Debug + Send + Sync;
    type LwePayload: Clone + Debug + Send + Sync;

    fn name(&self) -> &'static str;
    /// Identifies the key pair; ciphertexts under different keys never mix.
    fn key_id(&self) -> u64;
    fn params(&self) -> &SchemeParams;

    fn encrypt_slots(&self, slots: &[u64]) -> Result<Self::Payload>;
    fn decrypt_slots(&self, c: &Self::Payload) -> Result<Vec<u64>>;
    fn encrypt_coeffs(&self, coeffs: &[u64]) -> Result<Self::Payload>;
    fn decrypt_coeffs(&self, c: &Self::Payload) -> Result<Vec<u64>>;

    fn add(&self, a: &Self::Payload, b: &Self::Payload) -> Result<Self::Payload>;
    fn sub(&self, a: &Self::Payload, b: &Self::Payload) -> Result<Self::Payload>;
    fn add_plain_slots(&self, a: &Self::Payload, slots: &[u64]) -> Result<Self::Payload>;
    fn add_plain_coeffs(&self, a: &Self::Payload, coeffs: &[u64]) -> Result<Self::Payload>;
    fn mult_plain_slots(&self, a: &Self::Payload, slots: &[u64]) -> Result<Self::Payload>;
    /// Negacyclic product with a plaintext polynomial.
    fn mult_plain_coeffs(&self, a: &Self::Payload, coeffs: &[u64]) -> Result<Self::Payload>;

    /// `RotL(x, k)[j] = x[(j + k) mod N′]`; `k < N′`.
    fn rotate_left(&self, a: &Self::Payload, k: usize) -> Result<Self::Payload>;
    /// Several left rotations of one ciphertext sharing a single decomposition.
    fn hoisted_rotate_left(&self, a: &Self::Payload, ks: &[usize]) -> Result<Vec<Self::Payload>>;

    /// Extracts coefficient `index` of a coefficient-domain ciphertext.
    fn extract_lwe(&self, a: &Self::Payload, index: usize) -> Result<Self::LwePayload>;
    fn decrypt_lwe(&self, c: &Self::LwePayload) -> Result<u64>;
}
