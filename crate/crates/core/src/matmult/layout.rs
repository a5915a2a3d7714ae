//! Cleartext slot layouts of matrices and vectors for every method.
//!
//! All functions zero-pad `m` and `n` to powers of two first. Slot vectors
//! returned here have length exactly `N′` (or `N` for coefficient layouts).

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matmult::method::pad_pow2;
use crate::matrix::Matrix;

fn padded<T: Copy + Zero>(x: &Matrix<T>) -> Matrix<T> {
    x.block(0, 0, pad_pow2(x.rows()), pad_pow2(x.cols()), T::zero())
}

fn check_fits(m: usize, n: usize, slots: usize) -> Result<()> {
    if m > slots || n > slots {
        return Err(Error::OperandTooLarge { m, n, slots });
    }
    Ok(())
}

/// `ẽ_i` = row `i` in slots `[0, n)`.
pub fn row_order<T: Copy + Zero>(x: &Matrix<T>, slots: usize) -> Result<Vec<Vec<T>>> {
    let x = padded(x);
    check_fits(x.rows(), x.cols(), slots)?;
    Ok((0..x.rows())
        .map(|i| {
            let mut v = vec![T::zero(); slots];
            v[..x.cols()].copy_from_slice(x.row(i));
            v
        })
        .collect())
}

/// `ẽ_j` = column `j` in slots `[0, m)`.
pub fn column_order<T: Copy + Zero>(x: &Matrix<T>, slots: usize) -> Result<Vec<Vec<T>>> {
    let x = padded(x);
    check_fits(x.rows(), x.cols(), slots)?;
    Ok((0..x.cols())
        .map(|j| {
            let mut v = vec![T::zero(); slots];
            for i in 0..x.rows() {
                v[i] = x.get(i, j);
            }
            v
        })
        .collect())
}

/// GALA diagonals `ẽ_i[j] = X[(i + j) mod m, j mod n]`, `i < min(m, n)`,
/// filled periodically over all `N′` slots.
pub fn gala_diagonals<T: Copy + Zero>(x: &Matrix<T>, slots: usize) -> Result<Vec<Vec<T>>> {
    let x = padded(x);
    let (m, n) = x.shape();
    check_fits(m, n, slots)?;
    Ok((0..m.min(n)).map(|i| (0..slots).map(|j| x.get((i + j) % m, j % n)).collect()).collect())
}

/// How slots beyond `max(m, n)` are filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fill {
    Zero,
    /// Continue the pattern with period `max(m, n)`.
    Periodic,
}

/// Diagonals `ẽ_i[j] = X[j mod m, (i + j) mod n]`, `i < min(m, n)`, `j < max(m, n)`.
pub fn packvfl_diagonals<T: Copy + Zero>(x: &Matrix<T>, slots: usize, fill: Fill) -> Result<Vec<Vec<T>>> {
    let x = padded(x);
    let (m, n) = x.shape();
    check_fits(m, n, slots)?;
    let len = match fill {
        Fill::Zero => m.max(n),
        Fill::Periodic => slots,
    };
    Ok((0..m.min(n))
        .map(|i| {
            let mut v = vec![T::zero(); slots];
            for (j, s) in v.iter_mut().enumerate().take(len) {
                *s = x.get(j % m, (i + j) % n);
            }
            v
        })
        .collect())
}

/// Rows per section `m′ = ⌈mn / N′⌉` after packing (padded sizes, at least 1).
pub fn packed_rows(m: usize, n: usize, slots: usize) -> usize {
    (pad_pow2(m) * pad_pow2(n)).div_ceil(slots).max(1)
}

/// The transformed matrix `X′ (m′ × N′)` with `X′[i mod m′, j + n⌊i/m′⌋] = X[i, j]`.
///
/// Fails with `PackingNotApplicable` when packing leaves no vacancy to use (`m′ = m > 1`).
pub fn input_pack<T: Copy + Zero>(x: &Matrix<T>, slots: usize) -> Result<Matrix<T>> {
    let x = padded(x);
    let (m, n) = x.shape();
    check_fits(m, n, slots)?;
    let mp = packed_rows(m, n, slots);
    if mp == m && m > 1 {
        return Err(Error::PackingNotApplicable { m, n });
    }
    let mut out = Matrix::zeros(mp, slots);
    for i in 0..m {
        for j in 0..n {
            out.set(i % mp, j + n * (i / mp), x.get(i, j));
        }
    }
    Ok(out)
}

/// Packed value at global slot `g` for a section-local diagonal:
/// section `s = g / n` holds rows `s·m′ .. (s+1)·m′` and the local column is
/// chosen by `col(j')` where `j' = g mod n`.
fn section_term<T: Copy + Zero>(x: &Matrix<T>, mp: usize, g: usize, col: impl Fn(usize) -> usize) -> T {
    let (m, n) = x.shape();
    let (s, jl) = (g / n, g % n);
    let row = s * mp + jl % mp;
    if row < m {
        x.get(row, col(jl))
    } else {
        T::zero()
    }
}

/// Packed PackVFL diagonals: `ẽ_k[s·n + j'] = X[s·m′ + j' mod m′, (k + j') mod n]`, `k < m′`.
///
/// Each `n`-wide section wraps on its own, so with `m = n = 4`, `N′ = 8`
/// `ẽ_1 = [A1, B2, A3, B0, C1, D2, C3, D0]`.
pub fn packvfl_packed_diagonals<T: Copy + Zero>(x: &Matrix<T>, slots: usize) -> Result<Vec<Vec<T>>> {
    let x = padded(x);
    let (m, n) = x.shape();
    check_fits(m, n, slots)?;
    let mp = packed_rows(m, n, slots);
    Ok((0..mp).map(|k| (0..slots).map(|g| section_term(&x, mp, g, |jl| (k + jl) % n)).collect()).collect())
}

/// Packed GALA diagonals: the product with the vector is later rotated right by
/// `i`, so `ẽ_i[h] = term_i((h + i) mod N′)` with
/// `term_i(s·n + j') = X[s·m′ + j' mod m′, (j' - i) mod n]`.
pub fn gala_packed_diagonals<T: Copy + Zero>(x: &Matrix<T>, slots: usize) -> Result<Vec<Vec<T>>> {
    let x = padded(x);
    let (m, n) = x.shape();
    check_fits(m, n, slots)?;
    let mp = packed_rows(m, n, slots);
    Ok((0..mp)
        .map(|i| (0..slots).map(|h| section_term(&x, mp, (h + i) % slots, |jl| (jl + n - i % n) % n)).collect())
        .collect())
}

/// Coefficient layout `X̃[i·n + n - 1 - j] = X[i, j]` (no padding).
pub fn cheetah_matrix<T: Copy + Zero>(x: &Matrix<T>, degree: usize) -> Result<Vec<T>> {
    let (m, n) = x.shape();
    if m * n > degree {
        return Err(Error::MatrixTooLarge { m, n, degree });
    }
    let mut v = vec![T::zero(); degree];
    for i in 0..m {
        for j in 0..n {
            v[i * n + n - 1 - j] = x.get(i, j);
        }
    }
    Ok(v)
}

/// Coefficient layout `ỹ[i] = y[i]`.
pub fn cheetah_vector<T: Copy + Zero>(y: &[T], degree: usize) -> Result<Vec<T>> {
    if y.len() > degree {
        return Err(Error::VectorTooLong { len: y.len(), slots: degree });
    }
    let mut v = vec![T::zero(); degree];
    v[..y.len()].copy_from_slice(y);
    Ok(v)
}

/// Coefficient positions holding `(X·y)[i]`: `i·n + n - 1`.
pub fn cheetah_output_indices(m: usize, n: usize) -> Vec<usize> {
    (0..m).map(|i| i * n + n - 1).collect()
}

/// `y` (zero-padded to `n`) in slots `[0, n)`.
pub fn plain_vector<T: Copy + Zero>(y: &[T], n: usize, slots: usize) -> Result<Vec<T>> {
    if y.len() > n || n > slots {
        return Err(Error::VectorTooLong { len: y.len().max(n), slots });
    }
    let mut v = vec![T::zero(); slots];
    v[..y.len()].copy_from_slice(y);
    Ok(v)
}

/// `y` (zero-padded to `period`) repeated across all slots.
pub fn periodic_vector<T: Copy + Zero>(y: &[T], period: usize, slots: usize) -> Result<Vec<T>> {
    if y.len() > period || period > slots || !slots.is_multiple_of(period) {
        return Err(Error::VectorTooLong { len: y.len().max(period), slots });
    }
    Ok((0..slots).map(|j| y.get(j % period).copied().unwrap_or_else(T::zero)).collect())
}

/// One all-slots replica per element of `y`.
pub fn element_replicated<T: Copy + Zero>(y: &[T], slots: usize) -> Vec<Vec<T>> {
    y.iter().map(|&v| vec![v; slots]).collect()
}
