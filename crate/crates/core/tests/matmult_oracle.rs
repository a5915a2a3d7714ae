//! Every method against a brute-force product mod t, with measured operation
//! counts checked against the structural predictor.

use std::sync::Arc;

use hesimd_core::matmult::*;
use hesimd_core::modarith::{add_mod, mul_mod};
use hesimd_core::rlwe::{RlweBackend, RlweParams};
use hesimd_core::simd::{Evaluator, OpCounter, SchemeParams, SemanticBackend, SimdBackend};
use hesimd_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIZES: [usize; 5] = [1, 2, 4, 8, 16];

fn oracle(x: &Matrix<u64>, y: &[u64], t: u64) -> Vec<u64> {
    (0..x.rows())
        .map(|i| (0..x.cols()).fold(0, |acc, j| add_mod(acc, mul_mod(x.get(i, j), y[j], t), t)))
        .collect()
}

fn random_instance(rng: &mut impl Rng, m: usize, n: usize, t: u64) -> (Matrix<u64>, Vec<u64>) {
    let x = Matrix::from_fn(m, n, |_, _| rng.random_range(0..t));
    let y = (0..n).map(|_| rng.random_range(0..t)).collect();
    (x, y)
}

/// Runs one product; returns the decrypted residues and the counts measured inside.
fn run<B: SimdBackend>(
    eval: &Evaluator<B>,
    method: Method,
    mode: RasMode,
    x: &Matrix<u64>,
    y: &[u64],
) -> hesimd_core::Result<(Vec<u64>, OpCounter, usize)> {
    let enc = encode_residues(method, x, eval.params(), 0)?;
    let v = prepare_vector_residues(eval, enc.vector_layout()?, y, 0)?;
    let scope = eval.meter().open();
    let out = matmult_with(eval, method, &enc, &v, mode)?;
    let (ops, _) = eval.meter().close(scope)?;
    Ok((decrypt_output(eval, &out)?, ops, out.ciphertext_count()))
}

fn applicable(method: Method, m: usize, n: usize, slots: usize, degree: usize) -> bool {
    match method {
        Method::Cheetah => m * n <= degree,
        Method::Packvfl => true,
        _ => pad_pow2(m) <= slots && pad_pow2(n) <= slots,
    }
}

fn sweep<B: SimdBackend>(eval: &Evaluator<B>, rng: &mut impl Rng, reps: usize) -> usize {
    let p = *eval.params();
    let mut cases = 0;
    for &m in &SIZES {
        for &n in &SIZES {
            for method in Method::ALL {
                if !applicable(method, m, n, p.slot_count, p.ring_degree) {
                    assert!(run(eval, method, RasMode::Lazy, &Matrix::zeros(m, n), &vec![0; n]).is_err());
                    continue;
                }
                let pred = predict_complexity(method, m, n, p.slot_count, p.ring_degree).unwrap();
                for _ in 0..reps {
                    let (x, y) = random_instance(rng, m, n, p.plain_modulus);
                    let (got, ops, cts) = run(eval, method, RasMode::Lazy, &x, &y).unwrap();
                    assert_eq!(got, oracle(&x, &y, p.plain_modulus), "{method} {m}x{n} N'={}", p.slot_count);
                    assert_eq!(ops, pred.ops, "{method} {m}x{n} N'={}", p.slot_count);
                    assert_eq!(cts as u64, pred.a_to_b.count, "{method} {m}x{n} output ciphertexts");
                    cases += 1;
                }
            }
        }
    }
    cases
}

#[test]
fn semantic_backend_all_methods_all_sizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = 0;
    // N′ = 8 exercises every partition case, 32 the packed cases, 256 the plain ones
    for slots in [8, 32, 256] {
        let eval = Evaluator::new(Arc::new(SemanticBackend::with_slots(slots).unwrap()));
        cases += sweep(&eval, &mut rng, 3);
    }
    assert!(cases >= 300, "{cases}");
}

#[test]
fn rlwe_backend_all_methods_all_sizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let params = RlweParams::desk_1024();
    let slots = params.scheme.slot_count;
    let rots: Vec<usize> = SIZES
        .iter()
        .flat_map(|&m| SIZES.iter().map(move |&n| (m, n)))
        .flat_map(|(m, n)| all_required_rotations(m, n, slots))
        .collect();
    let eval = Evaluator::new(Arc::new(RlweBackend::new(params, &rots, 3).unwrap()));
    assert!(sweep(&eval, &mut rng, 1) >= 150);
}

#[test]
fn rlwe_toy_partitioned_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let params = RlweParams::toy();
    let slots = params.scheme.slot_count;
    let t = params.scheme.plain_modulus;
    for (m, n) in [(16, 4), (4, 16), (16, 16), (32, 8)] {
        let eval = Evaluator::new(Arc::new(
            RlweBackend::new(params, &required_rotations(Method::Packvfl, m, n, slots, RasMode::Eager).unwrap(), 4)
                .unwrap(),
        ));
        for mode in [RasMode::Lazy, RasMode::Eager] {
            let (x, y) = random_instance(&mut rng, m, n, t);
            let (got, _, _) = run(&eval, Method::Packvfl, mode, &x, &y).unwrap();
            assert_eq!(got, oracle(&x, &y, t), "{m}x{n} {mode:?}");
        }
    }
}

#[test]
fn lazy_and_eager_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let eval = Evaluator::new(Arc::new(SemanticBackend::with_slots(8).unwrap()));
    let t = eval.params().plain_modulus;
    for &m in &SIZES {
        for &n in &SIZES {
            for method in [Method::Gala, Method::Packvfl] {
                if !applicable(method, m, n, 8, 8) {
                    continue;
                }
                let (x, y) = random_instance(&mut rng, m, n, t);
                let (lazy, lazy_ops, _) = run(&eval, method, RasMode::Lazy, &x, &y).unwrap();
                let (eager, eager_ops, _) = run(&eval, method, RasMode::Eager, &x, &y).unwrap();
                assert_eq!(lazy, eager, "{method} {m}x{n}");
                assert!(eager_ops.rot >= lazy_ops.rot);
                if method == Method::Packvfl {
                    assert_eq!(lazy_ops.rot, 0, "{m}x{n}");
                }
            }
        }
    }
}

#[test]
fn identity_matrix_returns_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let eval = Evaluator::new(Arc::new(SemanticBackend::with_slots(16).unwrap()));
    let t = eval.params().plain_modulus;
    let x = Matrix::from_fn(4, 4, |i, j| u64::from(i == j));
    let y: Vec<u64> = (0..4).map(|_| rng.random_range(0..t)).collect();
    for method in Method::ALL {
        assert_eq!(run(&eval, method, RasMode::Lazy, &x, &y).unwrap().0, y, "{method}");
    }
}

#[test]
fn fixed_point_values_decode() {
    let p = SchemeParams::semantic(16);
    let eval = Evaluator::new(Arc::new(SemanticBackend::new(p).unwrap()));
    let x = Matrix::from_rows(&[vec![0.5, -1.25], vec![2.0, 0.75], vec![-0.5, 1.0]]).unwrap();
    let y = [1.5, -2.0];
    let want = x.matvec(&y).unwrap();
    for method in Method::ALL {
        let enc = encode_matrix(method, &x, &p, 1).unwrap();
        let v = prepare_vector(&eval, enc.vector_layout().unwrap(), &y, 1).unwrap();
        let out = matmult(&eval, method, &enc, &v).unwrap();
        let got = decrypt_output_f64(&eval, &out).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-9, "{method}: {got:?} vs {want:?}");
        }
    }
}

#[test]
fn mismatches_are_rejected() {
    let eval = Evaluator::new(Arc::new(SemanticBackend::with_slots(8).unwrap()));
    let x = Matrix::from_fn(4, 2, |i, j| (i + j) as u64);
    let enc = encode_residues(Method::Gala, &x, eval.params(), 0).unwrap();
    let v = prepare_vector_residues(&eval, enc.vector_layout().unwrap(), &[1, 2], 0).unwrap();
    assert!(matches!(matmult(&eval, Method::Packvfl, &enc, &v), Err(hesimd_core::Error::EncodingMismatch(_))));
    let plain = prepare_vector_residues(&eval, VectorLayout::Plain { n: 2 }, &[1, 2], 0).unwrap();
    assert!(matches!(matmult(&eval, Method::Gala, &enc, &plain), Err(hesimd_core::Error::ReplicationMismatch(_))));
}
