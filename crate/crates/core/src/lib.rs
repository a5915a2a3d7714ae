//! Homomorphic SIMD matrix-vector multiplication.
//!
//! The [`simd`] module defines the four basic ciphertext operations (slot-wise
//! addition, plaintext multiplication, rotation and hoisted rotation) with exact
//! accounting, plus a cleartext simulation backend.

pub mod error;
pub mod matmult;
pub mod matrix;
pub mod modarith;
pub mod rlwe;
pub mod scalar;
pub mod simd;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::Scalar;

pub type Matrix64 = Matrix<f64>;
pub type MatrixI64 = Matrix<i64>;
pub type MatrixQ = Matrix<num_rational::Rational64>;
