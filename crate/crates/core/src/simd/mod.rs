//! The abstract SIMD ciphertext interface, its accounting, and the semantic backend.

pub mod backend;
pub mod ciphertext;
pub mod cost;
pub mod evaluator;
pub mod meter;
pub mod params;
pub mod plaintext;
pub mod semantic;

pub use backend::SimdBackend;
pub use ciphertext::{Ciphertext, Domain, LweCiphertext};
pub use cost::CostModel;
pub use evaluator::{Ct, Evaluator, LweCt};
pub use meter::{CommStats, LinkStats, Meter, OpCounter, OpKind, Party, ScopeId};
pub use params::{SchemeParams, DEFAULT_DELTA, DEFAULT_PLAIN_MODULUS, WIDE_PLAIN_MODULUS};
pub use plaintext::{CoeffPlaintext, Plaintext};
pub use semantic::SemanticBackend;
