//! Plaintext encodings of matrices and the encrypted vector layouts each
//! method expects.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matmult::layout::{self, Fill};
use crate::matmult::method::{pad_pow2, plan_partition, Method, PartitionPlan};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::simd::plaintext::to_residue;
use crate::simd::{CoeffPlaintext, Ct, Evaluator, Plaintext, SchemeParams, SimdBackend};

/// Encoded plaintext content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixBody {
    /// One plaintext per row, column or diagonal.
    Slots(Vec<Plaintext>),
    /// A single coefficient-packed polynomial.
    Coeffs(CoeffPlaintext),
    /// Diagonals of every block, indexed `[row block][column block][diagonal]`.
    Blocks(Vec<Vec<Vec<Plaintext>>>),
}

/// A matrix in the plaintext layout of one method. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedMatrix {
    pub method: Method,
    /// Unpadded shape.
    pub m: usize,
    pub n: usize,
    pub slots: usize,
    pub degree: usize,
    /// `m′` when several rows share a section (packed Gala / Packvfl).
    pub packed_rows: Option<usize>,
    pub partition: Option<PartitionPlan>,
    pub scale_exponent: u32,
    pub body: MatrixBody,
}

impl EncodedMatrix {
    pub fn padded_shape(&self) -> (usize, usize) {
        if self.method == Method::Cheetah {
            (self.m, self.n)
        } else {
            (pad_pow2(self.m), pad_pow2(self.n))
        }
    }

    /// Number of plaintexts held.
    pub fn plaintext_count(&self) -> usize {
        match &self.body {
            MatrixBody::Slots(v) => v.len(),
            MatrixBody::Coeffs(_) => 1,
            MatrixBody::Blocks(b) => b.iter().flatten().map(Vec::len).sum(),
        }
    }

    pub fn vector_layout(&self) -> Result<VectorLayout> {
        vector_layout(self.method, self.m, self.n, self.slots)
    }
}

fn slot_plaintexts(vs: Vec<Vec<u64>>, exp: u32) -> Vec<Plaintext> {
    vs.into_iter().map(|v| Plaintext::from_residues(v, exp)).collect()
}

/// Encodes a real-valued matrix at scale `Δ^exp`.
pub fn encode_matrix<T: Scalar>(method: Method, x: &Matrix<T>, params: &SchemeParams, exp: u32) -> Result<EncodedMatrix> {
    let mut data = Vec::with_capacity(x.rows() * x.cols());
    for &v in x.as_slice() {
        data.push(to_residue(v, params, exp)?);
    }
    let r = Matrix::from_vec(x.rows(), x.cols(), data)?;
    encode_residues(method, &r, params, exp)
}

/// Encodes a matrix whose entries are already residues mod `t` carrying `Δ^exp`.
pub fn encode_residues(method: Method, x: &Matrix<u64>, params: &SchemeParams, exp: u32) -> Result<EncodedMatrix> {
    let (m, n) = x.shape();
    let slots = params.slot_count;
    let degree = params.ring_degree;
    let mut packed_rows = None;
    let mut partition = None;
    let body = match method {
        Method::Naive => MatrixBody::Slots(slot_plaintexts(layout::row_order(x, slots)?, exp)),
        Method::Column => MatrixBody::Slots(slot_plaintexts(layout::column_order(x, slots)?, exp)),
        Method::GalaDiagonal => MatrixBody::Slots(slot_plaintexts(layout::gala_diagonals(x, slots)?, exp)),
        Method::PackvflDiagonal => {
            MatrixBody::Slots(slot_plaintexts(layout::packvfl_diagonals(x, slots, Fill::Zero)?, exp))
        }
        Method::Gala => {
            packed_rows = Some(layout::packed_rows(m, n, slots));
            MatrixBody::Slots(slot_plaintexts(layout::gala_packed_diagonals(x, slots)?, exp))
        }
        Method::Packvfl => {
            let (mp, np) = (pad_pow2(m), pad_pow2(n));
            if mp <= slots && np <= slots {
                packed_rows = Some(layout::packed_rows(m, n, slots));
                MatrixBody::Slots(slot_plaintexts(layout::packvfl_packed_diagonals(x, slots)?, exp))
            } else {
                let plan = plan_partition(m, n, slots)?;
                let xp = x.pad_pow2();
                let mut blocks = Vec::with_capacity(plan.row_blocks);
                for r in 0..plan.row_blocks {
                    let mut row = Vec::with_capacity(plan.col_blocks);
                    for c in 0..plan.col_blocks {
                        let (r0, c0) = plan.origin(r, c);
                        let b = xp.block(r0, c0, plan.block_rows, plan.block_cols, 0);
                        row.push(slot_plaintexts(layout::packvfl_diagonals(&b, slots, Fill::Zero)?, exp));
                    }
                    blocks.push(row);
                }
                partition = Some(plan);
                MatrixBody::Blocks(blocks)
            }
        }
        Method::Cheetah => MatrixBody::Coeffs(CoeffPlaintext { coeffs: layout::cheetah_matrix(x, degree)?, scale_exponent: exp }),
    };
    Ok(EncodedMatrix { method, m, n, slots, degree, packed_rows, partition, scale_exponent: exp, body })
}

/// How the encrypted vector operand must be laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VectorLayout {
    /// `y` in slots `[0, n)`, zeros elsewhere.
    Plain { n: usize },
    /// `n` ciphertexts, the `j`-th holding `y[j]` in every slot.
    Replicated { n: usize },
    /// `y` padded to `period` and repeated across all slots.
    Periodic { period: usize },
    /// `blocks` consecutive chunks of `y`, each periodic with `period`.
    PeriodicBlocks { period: usize, blocks: usize },
    /// `y` in polynomial coefficients `[0, n)`.
    Coeffs { n: usize },
}

impl VectorLayout {
    pub fn ciphertext_count(&self) -> usize {
        match *self {
            VectorLayout::Replicated { n } => n,
            VectorLayout::PeriodicBlocks { blocks, .. } => blocks,
            _ => 1,
        }
    }

    /// Longest `y` the layout can carry.
    pub fn capacity(&self) -> usize {
        match *self {
            VectorLayout::Plain { n } | VectorLayout::Replicated { n } | VectorLayout::Coeffs { n } => n,
            VectorLayout::Periodic { period } => period,
            VectorLayout::PeriodicBlocks { period, blocks } => period * blocks,
        }
    }
}

/// The layout `method` requires for a vector multiplied by an `m × n` matrix.
pub fn vector_layout(method: Method, m: usize, n: usize, slots: usize) -> Result<VectorLayout> {
    let (mp, np) = (pad_pow2(m), pad_pow2(n));
    Ok(match method {
        Method::Naive => VectorLayout::Plain { n: np },
        Method::Column => VectorLayout::Replicated { n: np },
        Method::GalaDiagonal | Method::PackvflDiagonal | Method::Gala => VectorLayout::Periodic { period: np },
        Method::Packvfl if mp <= slots && np <= slots => VectorLayout::Periodic { period: np },
        Method::Packvfl => {
            let plan = plan_partition(m, n, slots)?;
            VectorLayout::PeriodicBlocks { period: plan.block_cols, blocks: plan.col_blocks }
        }
        Method::Cheetah => VectorLayout::Coeffs { n },
    })
}

/// Cleartext slot (or coefficient) vectors of `y` in `layout`.
pub fn vector_slots<T: Copy + num_traits::Zero>(layout: VectorLayout, y: &[T], slots: usize, degree: usize) -> Result<Vec<Vec<T>>> {
    if y.len() > layout.capacity() {
        return Err(Error::ReplicationMismatch(format!(
            "vector of length {} does not fit layout {layout:?}",
            y.len()
        )));
    }
    match layout {
        VectorLayout::Plain { n } => Ok(vec![layout::plain_vector(y, n, slots)?]),
        VectorLayout::Replicated { n } => {
            let mut full = y.to_vec();
            full.resize(n, T::zero());
            Ok(layout::element_replicated(&full, slots))
        }
        VectorLayout::Periodic { period } => Ok(vec![layout::periodic_vector(y, period, slots)?]),
        VectorLayout::PeriodicBlocks { period, blocks } => (0..blocks)
            .map(|b| {
                let lo = (b * period).min(y.len());
                let hi = ((b + 1) * period).min(y.len());
                layout::periodic_vector(&y[lo..hi], period, slots)
            })
            .collect(),
        VectorLayout::Coeffs { .. } => Ok(vec![layout::cheetah_vector(y, degree)?]),
    }
}

/// An encrypted vector operand together with its layout.
#[derive(Debug, Clone)]
pub struct PreparedVector<B: SimdBackend> {
    pub layout: VectorLayout,
    pub ciphertexts: Vec<Ct<B>>,
}

/// Encrypts residues of `y` (already carrying `Δ^exp`) in `layout`.
pub fn prepare_vector_residues<B: SimdBackend>(
    eval: &Evaluator<B>,
    layout: VectorLayout,
    y: &[u64],
    exp: u32,
) -> Result<PreparedVector<B>> {
    let params = eval.params();
    let parts = vector_slots(layout, y, params.slot_count, params.ring_degree)?;
    let ciphertexts = parts
        .into_iter()
        .map(|v| match layout {
            VectorLayout::Coeffs { .. } => eval.encrypt_coeffs(&CoeffPlaintext { coeffs: v, scale_exponent: exp }),
            _ => eval.encrypt(&Plaintext::from_residues(v, exp)),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PreparedVector { layout, ciphertexts })
}

/// Encodes `y` at scale `Δ^exp` and encrypts it in `layout`.
pub fn prepare_vector<B: SimdBackend, T: Scalar>(
    eval: &Evaluator<B>,
    layout: VectorLayout,
    y: &[T],
    exp: u32,
) -> Result<PreparedVector<B>> {
    let r = y.iter().map(|&v| to_residue(v, eval.params(), exp)).collect::<Result<Vec<_>>>()?;
    prepare_vector_residues(eval, layout, &r, exp)
}
