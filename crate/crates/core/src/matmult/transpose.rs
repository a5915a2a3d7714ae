//! Products with encrypted diagonal matrices and the conversion of those
//! diagonals into the diagonals of the transposed matrix.
//!
//! With the matrix encrypted and the vector in cleartext, the vector
//! rotations are free, so a product consumes no O3 or O4 at all.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matmult::layout::{self, Fill};
use crate::matmult::method::pad_pow2;
use crate::matmult::pending::{PendingResult, ReductionPlan};
use crate::matrix::Matrix;
use crate::simd::{Ct, Evaluator, Plaintext, SimdBackend};

/// Where converted diagonal `i` comes from: `RotL(ẽ_source, left_offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalSource {
    pub source: usize,
    pub left_offset: usize,
}

/// Encrypted diagonals `ẽ_i[j] = X[j mod m, (i + j) mod n]`, `i < min(m, n)`.
#[derive(Debug, Clone)]
pub struct EncryptedDiagonals<B: SimdBackend> {
    /// Unpadded shape of the encrypted matrix.
    pub m: usize,
    pub n: usize,
    pub slots: usize,
    /// `Some(m′)` when encrypted in the packed layout.
    pub packed_rows: Option<usize>,
    pub diagonals: Vec<Ct<B>>,
    /// Set on the output of [`transpose_diag_convert`].
    pub converted_from: Option<Vec<DiagonalSource>>,
}

impl<B: SimdBackend> EncryptedDiagonals<B> {
    pub fn padded_shape(&self) -> (usize, usize) {
        (pad_pow2(self.m), pad_pow2(self.n))
    }
}

/// Encrypts the diagonals of a residue matrix, filled periodically over all
/// slots so they can later be converted to the transpose.
pub fn encrypt_diagonals<B: SimdBackend>(eval: &Evaluator<B>, x: &Matrix<u64>, exp: u32) -> Result<EncryptedDiagonals<B>> {
    let slots = eval.slot_count();
    let diagonals = layout::packvfl_diagonals(x, slots, Fill::Periodic)?
        .into_iter()
        .map(|v| eval.encrypt(&Plaintext::from_residues(v, exp)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EncryptedDiagonals { m: x.rows(), n: x.cols(), slots, packed_rows: None, diagonals, converted_from: None })
}

/// Encrypts the packed diagonals (fewer ciphertexts, not convertible).
pub fn encrypt_packed_diagonals<B: SimdBackend>(
    eval: &Evaluator<B>,
    x: &Matrix<u64>,
    exp: u32,
) -> Result<EncryptedDiagonals<B>> {
    let slots = eval.slot_count();
    let diagonals = layout::packvfl_packed_diagonals(x, slots)?
        .into_iter()
        .map(|v| eval.encrypt(&Plaintext::from_residues(v, exp)))
        .collect::<Result<Vec<_>>>()?;
    let packed_rows = Some(layout::packed_rows(x.rows(), x.cols(), slots));
    Ok(EncryptedDiagonals { m: x.rows(), n: x.cols(), slots, packed_rows, diagonals, converted_from: None })
}

/// Source diagonal and left rotation producing diagonal `i` of `Xᵀ` from
/// the periodic diagonals of an `m × n` matrix (padded sizes).
///
/// Tall (`m ≥ n`): `ẽ′_i = RotL(ẽ_{(n-i) mod n}, i)`.
/// Wide (`m < n`): `ẽ′_0 = ẽ_0` and `ẽ′_i = RotL(ẽ_{m-i}, n - m + i)` for `i > 0`.
pub fn conversion_table(m: usize, n: usize) -> Vec<DiagonalSource> {
    let (m, n) = (pad_pow2(m), pad_pow2(n));
    (0..m.min(n))
        .map(|i| {
            if m >= n {
                DiagonalSource { source: (n - i) % n, left_offset: i }
            } else if i == 0 {
                DiagonalSource { source: 0, left_offset: 0 }
            } else {
                DiagonalSource { source: m - i, left_offset: n - m + i }
            }
        })
        .collect()
}

/// Left offsets needed by [`transpose_diag_convert`], reduced mod `N′`.
pub fn conversion_rotations(m: usize, n: usize, slots: usize) -> Vec<usize> {
    let mut v: Vec<usize> =
        conversion_table(m, n).iter().map(|s| s.left_offset % slots).filter(|&k| k != 0).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Cleartext counterpart of [`transpose_diag_convert`] on slot vectors.
pub fn transpose_diagonals_cleartext<T: Copy>(diags: &[Vec<T>], m: usize, n: usize) -> Vec<Vec<T>> {
    conversion_table(m, n)
        .iter()
        .map(|s| {
            let d = &diags[s.source];
            (0..d.len()).map(|j| d[(j + s.left_offset) % d.len()]).collect()
        })
        .collect()
}

/// Turns encrypted diagonals of `X` into encrypted diagonals of `Xᵀ` with one
/// O3 rotation per diagonal that needs moving (at most `min(m, n) − 1`).
pub fn transpose_diag_convert<B: SimdBackend>(
    eval: &Evaluator<B>,
    e: &EncryptedDiagonals<B>,
) -> Result<EncryptedDiagonals<B>> {
    if e.packed_rows.is_some() || e.converted_from.is_some() {
        return Err(Error::LayoutUnsupported("conversion needs unpacked periodic diagonals".into()));
    }
    let table = conversion_table(e.m, e.n);
    let diagonals = table
        .iter()
        .map(|s| {
            let src = &e.diagonals[s.source];
            match s.left_offset % e.slots {
                0 => Ok(src.clone()),
                k => eval.rotate_left(src, k),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EncryptedDiagonals {
        m: e.n,
        n: e.m,
        slots: e.slots,
        packed_rows: None,
        diagonals,
        converted_from: Some(table),
    })
}

/// `⟦X⟧·w` for a cleartext vector `w` (residues carrying `Δ^exp`); the result
/// awaits a cleartext rotate-and-sum.
pub fn matmult_encrypted<B: SimdBackend>(
    eval: &Evaluator<B>,
    e: &EncryptedDiagonals<B>,
    w: &[u64],
    exp: u32,
) -> Result<PendingResult<B::Payload>> {
    let (mp, np) = e.padded_shape();
    if w.len() > np {
        return Err(Error::ShapeMismatch(format!("vector of length {} for {} columns", w.len(), e.n)));
    }
    let base = layout::periodic_vector(w, np, e.slots)?;
    let prods = e
        .diagonals
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let rotated: Vec<u64> = (0..e.slots).map(|j| base[(j + i) % e.slots]).collect();
            eval.mult_plain(d, &Plaintext::from_residues(rotated, exp))
        })
        .collect::<Result<Vec<_>>>()?;
    let plan = match e.packed_rows {
        Some(k) => ReductionPlan::section_fold(e.m, k, np, e.slots),
        None if mp >= np => ReductionPlan::identity(e.m, e.slots),
        None => ReductionPlan::section_fold(e.m, mp, np, e.slots),
    };
    Ok(PendingResult { ciphertexts: vec![eval.add_many(&prods)?], plan })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_offsets() {
        // m = 4, n = 2: diagonal 1 of the transpose is diagonal 1 rotated left by 1
        assert_eq!(conversion_table(4, 2)[1], DiagonalSource { source: 1, left_offset: 1 });
        assert_eq!(conversion_table(1, 8), vec![DiagonalSource { source: 0, left_offset: 0 }]);
        assert_eq!(conversion_table(2, 8)[1], DiagonalSource { source: 1, left_offset: 7 });
        assert!(conversion_rotations(1, 16, 16).is_empty());
    }
}
