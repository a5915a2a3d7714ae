//! Ten thousand random end-to-end products at the desk-1024 preset, every
//! one compared with the exact product mod t.

use std::sync::Arc;

use hesimd_core::matmult::*;
use hesimd_core::modarith::{add_mod, mul_mod};
use hesimd_core::rlwe::{RlweBackend, RlweParams};
use hesimd_core::simd::Evaluator;
use hesimd_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const RUNS: usize = 10_000;
const SIZES: [usize; 5] = [1, 2, 4, 8, 16];

#[test]
fn ten_thousand_runs_decrypt_exactly() {
    let params = RlweParams::desk_1024();
    let slots = params.scheme.slot_count;
    let t = params.scheme.plain_modulus;
    let mut rots: Vec<usize> = Vec::new();
    for &m in &SIZES {
        for &n in &SIZES {
            rots.extend(all_required_rotations(m, n, slots));
        }
    }
    let eval = Evaluator::new(Arc::new(RlweBackend::new(params, &rots, 99).unwrap()));
    let failures: usize = (0..RUNS)
        .into_par_iter()
        .map(|run| {
            let mut rng = ChaCha8Rng::seed_from_u64(run as u64);
            let method = Method::ALL[rng.random_range(0..Method::ALL.len())];
            let (m, n) = (SIZES[rng.random_range(0..5)], SIZES[rng.random_range(0..5)]);
            // full-range residues: the worst case for plaintext-product noise
            let x = Matrix::from_fn(m, n, |_, _| rng.random_range(0..t));
            let y: Vec<u64> = (0..n).map(|_| rng.random_range(0..t)).collect();
            let want: Vec<u64> = (0..m)
                .map(|i| (0..n).fold(0, |acc, j| add_mod(acc, mul_mod(x.get(i, j), y[j], t), t)))
                .collect();
            let enc = encode_residues(method, &x, eval.params(), 0).unwrap();
            let v = prepare_vector_residues(&eval, enc.vector_layout().unwrap(), &y, 0).unwrap();
            let out = matmult(&eval, method, &enc, &v).unwrap();
            usize::from(decrypt_output(&eval, &out).unwrap() != want)
        })
        .sum();
    assert_eq!(failures, 0);
}
