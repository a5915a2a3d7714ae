//! Homomorphic matrix-vector products for every method.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matmult::encode::{EncodedMatrix, MatrixBody, PreparedVector};
use crate::matmult::method::{pad_pow2, plan_partition, Method};
use crate::matmult::layout;
use crate::matmult::pending::{finalize_lazy_ras_mod, PendingResult, ReductionPlan};
use crate::simd::plaintext::residue_to_f64;
use crate::simd::{Ct, Evaluator, LweCt, Plaintext, SimdBackend};

/// Where the final rotate-and-sum of packed or partitioned products happens.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RasMode {
    /// After decryption, in cleartext.
    #[default]
    Lazy,
    /// In ciphertext with O3 rotations.
    Eager,
}

/// Result of a product.
#[derive(Debug, Clone)]
pub enum MatMultOutput<B: SimdBackend> {
    /// Output row `k` sits at slot `positions[k].1` of ciphertext `positions[k].0`.
    Finished { ciphertexts: Vec<Ct<B>>, positions: Vec<(usize, usize)> },
    Pending(PendingResult<B::Payload>),
    /// One LWE ciphertext per output row.
    Lwe(Vec<LweCt<B>>),
}

impl<B: SimdBackend> MatMultOutput<B> {
    pub fn rows(&self) -> usize {
        match self {
            MatMultOutput::Finished { positions, .. } => positions.len(),
            MatMultOutput::Pending(p) => p.plan.len(),
            MatMultOutput::Lwe(v) => v.len(),
        }
    }

    /// Ciphertexts a party would transmit.
    pub fn ciphertext_count(&self) -> usize {
        match self {
            MatMultOutput::Finished { ciphertexts, .. } => ciphertexts.len(),
            MatMultOutput::Pending(p) => p.ciphertexts.len(),
            MatMultOutput::Lwe(v) => v.len(),
        }
    }

    pub fn scale_exponent(&self) -> u32 {
        match self {
            MatMultOutput::Finished { ciphertexts, .. } => ciphertexts.first().map_or(0, |c| c.scale_exponent),
            MatMultOutput::Pending(p) => p.ciphertexts.first().map_or(0, |c| c.scale_exponent),
            MatMultOutput::Lwe(v) => v.first().map_or(0, |c| c.scale_exponent),
        }
    }
}

/// Decrypts an output to its `m` residues mod `t`.
pub fn decrypt_output<B: SimdBackend>(eval: &Evaluator<B>, out: &MatMultOutput<B>) -> Result<Vec<u64>> {
    match out {
        MatMultOutput::Finished { ciphertexts, positions } => {
            let dec = ciphertexts.iter().map(|c| eval.decrypt(c).map(|p| p.slots)).collect::<Result<Vec<_>>>()?;
            Ok(positions.iter().map(|&(c, s)| dec[c][s]).collect())
        }
        MatMultOutput::Pending(p) => {
            let dec = p.ciphertexts.iter().map(|c| eval.decrypt(c).map(|p| p.slots)).collect::<Result<Vec<_>>>()?;
            finalize_lazy_ras_mod(&dec, &p.plan, eval.params().plain_modulus)
        }
        MatMultOutput::Lwe(v) => v.iter().map(|c| eval.decrypt_lwe(c)).collect(),
    }
}

/// Decrypts and removes the fixed-point scale.
pub fn decrypt_output_f64<B: SimdBackend>(eval: &Evaluator<B>, out: &MatMultOutput<B>) -> Result<Vec<f64>> {
    let exp = out.scale_exponent();
    Ok(decrypt_output(eval, out)?.into_iter().map(|r| residue_to_f64(r, eval.params(), exp)).collect())
}

/// Left offsets `width/2, width/4, …, stop` that fold a `width`-wide run onto `stop` slots.
fn fold_offsets(width: usize, stop: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut off = width / 2;
    while off >= stop && off > 0 {
        out.push(off);
        off /= 2;
    }
    out
}

/// Left rotation offsets (non-zero, deduplicated, sorted) a product needs keys for.
pub fn required_rotations(method: Method, m: usize, n: usize, slots: usize, mode: RasMode) -> Result<Vec<usize>> {
    let (mp, np) = (pad_pow2(m), pad_pow2(n));
    let right = |k: usize| (slots - k % slots) % slots;
    let mut offs: Vec<usize> = match method {
        Method::Naive => fold_offsets(np, 1).into_iter().chain((1..mp).map(right)).collect(),
        Method::Column | Method::Cheetah => Vec::new(),
        Method::GalaDiagonal => (1..mp.min(np)).map(right).chain(fold_offsets(np, mp)).collect(),
        Method::PackvflDiagonal => (1..mp.min(np)).chain(fold_offsets(np, mp)).collect(),
        Method::Gala | Method::Packvfl if mp <= slots && np <= slots => {
            let k = layout::packed_rows(m, n, slots);
            let shifts: Vec<usize> =
                if method == Method::Gala { (1..k).map(right).collect() } else { (1..k).collect() };
            let fold = if mode == RasMode::Eager { fold_offsets(np, k) } else { Vec::new() };
            shifts.into_iter().chain(fold).collect()
        }
        Method::Gala => return Err(Error::OperandTooLarge { m: mp, n: np, slots }),
        Method::Packvfl => {
            let plan = plan_partition(m, n, slots)?;
            let d = plan.block_rows.min(plan.block_cols);
            let fold = if mode == RasMode::Eager { fold_offsets(plan.block_cols, plan.block_rows) } else { Vec::new() };
            (1..d).chain(fold).collect()
        }
    };
    offs.retain(|&k| k != 0);
    offs.sort_unstable();
    offs.dedup();
    Ok(offs)
}

/// `X·y` with lazy rotate-and-sum where the method allows it.
pub fn matmult<B: SimdBackend>(
    eval: &Evaluator<B>,
    method: Method,
    x: &EncodedMatrix,
    y: &PreparedVector<B>,
) -> Result<MatMultOutput<B>> {
    matmult_with(eval, method, x, y, RasMode::Lazy)
}

pub fn matmult_with<B: SimdBackend>(
    eval: &Evaluator<B>,
    method: Method,
    x: &EncodedMatrix,
    y: &PreparedVector<B>,
    mode: RasMode,
) -> Result<MatMultOutput<B>> {
    if x.method != method {
        return Err(Error::EncodingMismatch(format!("matrix encoded for {}, called with {method}", x.method)));
    }
    if x.slots != eval.slot_count() || x.degree != eval.params().ring_degree {
        return Err(Error::EncodingMismatch(format!(
            "matrix encoded for N′ = {}, evaluator has {}",
            x.slots,
            eval.slot_count()
        )));
    }
    let want = x.vector_layout()?;
    if y.layout != want || y.ciphertexts.len() != want.ciphertext_count() {
        return Err(Error::ReplicationMismatch(format!("{method} needs {want:?}, got {:?}", y.layout)));
    }
    let (mp, np) = x.padded_shape();
    match (&x.body, method) {
        (MatrixBody::Slots(rows), Method::Naive) => naive(eval, rows, &y.ciphertexts[0], x.m, np),
        (MatrixBody::Slots(cols), Method::Column) => {
            let prods = par_mult(eval, &y.ciphertexts, cols)?;
            finished(eval.add_many(&prods)?, x.m)
        }
        (MatrixBody::Slots(diags), Method::GalaDiagonal) => {
            let acc = gala_pass(eval, diags, &y.ciphertexts[0])?;
            let mut acc = acc;
            for off in fold_offsets(np, mp) {
                // single-offset hoisted calls, as GALA issues them
                let r = eval.hst_rot_many(&acc, &[off])?.remove(0);
                acc = eval.add(&acc, &r)?;
            }
            finished(acc, x.m)
        }
        (MatrixBody::Slots(diags), Method::PackvflDiagonal) => {
            let mut acc = packvfl_pass(eval, diags, &y.ciphertexts[0])?;
            for off in fold_offsets(np, mp) {
                let r = eval.rotate_left(&acc, off)?;
                acc = eval.add(&acc, &r)?;
            }
            finished(acc, x.m)
        }
        (MatrixBody::Slots(diags), Method::Gala | Method::Packvfl) => {
            let k = x.packed_rows.expect("packed encoding");
            let acc = if method == Method::Gala {
                gala_pass(eval, diags, &y.ciphertexts[0])?
            } else {
                packvfl_pass(eval, diags, &y.ciphertexts[0])?
            };
            match mode {
                RasMode::Lazy => Ok(MatMultOutput::Pending(PendingResult {
                    ciphertexts: vec![acc],
                    plan: ReductionPlan::section_fold(x.m, k, np, x.slots),
                })),
                RasMode::Eager => {
                    let mut acc = acc;
                    for off in fold_offsets(np, k) {
                        let r = eval.rotate_left(&acc, off)?;
                        acc = eval.add(&acc, &r)?;
                    }
                    let positions = (0..x.m).map(|row| (0, (row / k) * np + row % k)).collect();
                    Ok(MatMultOutput::Finished { ciphertexts: vec![acc], positions })
                }
            }
        }
        (MatrixBody::Blocks(blocks), Method::Packvfl) => partitioned(eval, x, blocks, &y.ciphertexts, mode),
        (MatrixBody::Coeffs(pt), Method::Cheetah) => {
            let prod = eval.mult_plain_coeffs(&y.ciphertexts[0], pt)?;
            let lwes = layout::cheetah_output_indices(x.m, x.n)
                .into_iter()
                .map(|i| eval.extract_lwe(&prod, i))
                .collect::<Result<Vec<_>>>()?;
            Ok(MatMultOutput::Lwe(lwes))
        }
        _ => Err(Error::EncodingMismatch(format!("{method} cannot use this matrix body"))),
    }
}

fn finished<B: SimdBackend>(ct: Ct<B>, m: usize) -> Result<MatMultOutput<B>> {
    Ok(MatMultOutput::Finished { ciphertexts: vec![ct], positions: (0..m).map(|i| (0, i)).collect() })
}

/// Pairwise products, computed in parallel and returned in order.
fn par_mult<B: SimdBackend>(eval: &Evaluator<B>, cts: &[Ct<B>], pts: &[Plaintext]) -> Result<Vec<Ct<B>>> {
    cts.par_iter().zip(pts.par_iter()).map(|(c, p)| eval.mult_plain(c, p)).collect()
}

fn naive<B: SimdBackend>(eval: &Evaluator<B>, rows: &[Plaintext], y: &Ct<B>, m: usize, np: usize) -> Result<MatMultOutput<B>> {
    let slots = eval.slot_count();
    let mut indicator = vec![0u64; slots];
    indicator[0] = 1;
    let indicator = Plaintext::from_residues(indicator, 0);
    let per_row = rows
        .par_iter()
        .map(|row| {
            let mut p = eval.mult_plain(y, row)?;
            for off in fold_offsets(np, 1) {
                let r = eval.rotate_left(&p, off)?;
                p = eval.add(&p, &r)?;
            }
            eval.mult_plain(&p, &indicator)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut placed = Vec::with_capacity(per_row.len());
    for (i, c) in per_row.into_iter().enumerate() {
        placed.push(if i == 0 { c } else { eval.rotate_right(&c, i)? });
    }
    finished(eval.add_many(&placed)?, m)
}

/// Diagonal products with the vector, each product rotated right by its index.
fn gala_pass<B: SimdBackend>(eval: &Evaluator<B>, diags: &[Plaintext], y: &Ct<B>) -> Result<Ct<B>> {
    let ys = vec![y.clone(); diags.len()];
    let prods = par_mult(eval, &ys, diags)?;
    let rotated = prods
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| if i == 0 { Ok(p) } else { eval.rotate_right(&p, i) })
        .collect::<Result<Vec<_>>>()?;
    eval.add_many(&rotated)
}

/// Diagonal products with hoisted left rotations of the vector.
fn packvfl_pass<B: SimdBackend>(eval: &Evaluator<B>, diags: &[Plaintext], y: &Ct<B>) -> Result<Ct<B>> {
    let offsets: Vec<usize> = (1..diags.len()).collect();
    let mut ys = vec![y.clone()];
    ys.extend(eval.hst_rot_many(y, &offsets)?);
    eval.add_many(&par_mult(eval, &ys, diags)?)
}

fn partitioned<B: SimdBackend>(
    eval: &Evaluator<B>,
    x: &EncodedMatrix,
    blocks: &[Vec<Vec<Plaintext>>],
    ys: &[Ct<B>],
    mode: RasMode,
) -> Result<MatMultOutput<B>> {
    let plan = x.partition.expect("partitioned encoding");
    let (br, bc) = (plan.block_rows, plan.block_cols);
    let d = br.min(bc);
    // one hoisted rotation group per vector block, shared by all row blocks
    let rotated = ys
        .iter()
        .map(|y| {
            let mut v = vec![y.clone()];
            v.extend(eval.hst_rot_many(y, &(1..d).collect::<Vec<_>>())?);
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let sums = blocks
        .par_iter()
        .map(|row| {
            let mut prods = Vec::with_capacity(row.len() * d);
            for (c, diags) in row.iter().enumerate() {
                prods.extend(par_mult(eval, &rotated[c], diags)?);
            }
            eval.add_many(&prods)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = x.m;
    match mode {
        RasMode::Lazy => {
            let per_block = if br >= bc {
                ReductionPlan::identity(br, x.slots)
            } else {
                ReductionPlan::section_fold(br, br, bc, x.slots)
            };
            let outputs = (0..rows)
                .map(|row| {
                    let (rb, r) = (row / br, row % br);
                    per_block.outputs[r].iter().map(|&(_, s)| (rb, s)).collect()
                })
                .collect();
            let plan = ReductionPlan { slots: x.slots, ciphertexts: sums.len(), outputs };
            Ok(MatMultOutput::Pending(PendingResult { ciphertexts: sums, plan }))
        }
        RasMode::Eager => {
            let offs = fold_offsets(bc, br);
            let ciphertexts = sums
                .into_iter()
                .map(|mut acc| {
                    for &off in &offs {
                        let r = eval.rotate_left(&acc, off)?;
                        acc = eval.add(&acc, &r)?;
                    }
                    Ok(acc)
                })
                .collect::<Result<Vec<_>>>()?;
            let positions = (0..rows).map(|row| (row / br, row % br)).collect();
            Ok(MatMultOutput::Finished { ciphertexts, positions })
        }
    }
}

/// Rotation keys for every method at once.
pub fn all_required_rotations(m: usize, n: usize, slots: usize) -> Vec<usize> {
    let mut all: Vec<usize> = Method::ALL
        .iter()
        .flat_map(|&meth| {
            [RasMode::Lazy, RasMode::Eager]
                .into_iter()
                .flat_map(move |mode| required_rotations(meth, m, n, slots, mode).unwrap_or_default())
        })
        .collect();
    all.sort_unstable();
    all.dedup();
    all
}
