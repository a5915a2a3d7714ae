//! Matrix-vector multiplication strategies over the SIMD interface.

pub mod complexity;
pub mod encode;
pub mod exec;
pub mod layout;
pub mod method;
pub mod pending;
pub mod transpose;

pub use method::{pad_pow2, plan_partition, Method, PartitionCase, PartitionPlan};
pub use complexity::{predict_complexity, published_complexity, ComplexityPrediction, CtCount, CtKind};
pub use pending::{finalize_lazy_ras, finalize_lazy_ras_mod, inverse_ras_cleartext, split_for_plan, PendingResult, ReductionPlan};
pub use encode::{encode_matrix, encode_residues, prepare_vector, prepare_vector_residues, vector_layout, vector_slots, EncodedMatrix, MatrixBody, PreparedVector, VectorLayout};
pub use exec::{all_required_rotations, decrypt_output, decrypt_output_f64, matmult, matmult_with, required_rotations, MatMultOutput, RasMode};
pub use transpose::{conversion_rotations, conversion_table, encrypt_diagonals, encrypt_packed_diagonals, matmult_encrypted, transpose_diag_convert, transpose_diagonals_cleartext, DiagonalSource, EncryptedDiagonals};
