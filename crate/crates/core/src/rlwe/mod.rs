//! An exact RLWE batching scheme (BFV-style) realizing the SIMD interface.
//!
//! Slots: `N′ = N/2`, each vector stored in both rows of the slot hypercube so
//! that left rotation by `k` is the automorphism `X -> X^(5^k)`. Rotations use
//! key switching through an auxiliary prime `P`; hoisted rotations decompose once and
//! apply each automorphism as a permutation of the transformed digits.

pub mod backend;
pub mod encoder;
pub mod keys;
pub mod ntt;
pub mod params;
pub mod poly;

pub use backend::{LweCiphertext as RlweLwe, RlweBackend, RlweCiphertext};
pub use params::RlweParams;
pub use poly::{ntt_poly_mult, PolyDomain, PolyRingElement};
