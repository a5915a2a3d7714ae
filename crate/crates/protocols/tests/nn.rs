use std::sync::Arc;

use hesimd_core::matmult::transpose_diag_convert;
use hesimd_core::simd::{Party, SemanticBackend};
use hesimd_core::Matrix;
use hesimd_protocols::common::ProtocolParams;
use hesimd_protocols::model::NnModel;
use hesimd_protocols::netsim::MessageKind;
use hesimd_protocols::nn::NnSession;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn session(m: usize, na: usize, nb: usize, embed: usize, hidden: usize, slots: usize, seed: u64) -> NnSession<SemanticBackend> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut mat = |r, c| Matrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0));
    let (xa, xb) = (mat(m, na), mat(m, nb));
    let y: Vec<f64> = (0..m).map(|i| (i as f64 * 0.37).sin()).collect();
    let params = ProtocolParams::semantic(slots);
    let key = Arc::new(SemanticBackend::new(params.scheme).unwrap());
    let model = NnModel::init(na, nb, embed, hidden, seed);
    NnSession::new(params, key, xa, xb, y, model, 0.1, seed).unwrap()
}

fn close(a: &Matrix<f64>, b: &Matrix<f64>, tol: f64) {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }
}

fn columns(x: &Matrix<f64>) -> Vec<Vec<f64>> {
    (0..x.cols()).map(|k| (0..x.rows()).map(|i| x.get(i, k)).collect()).collect()
}

fn from_columns(cols: &[Vec<f64>]) -> Matrix<f64> {
    Matrix::from_fn(cols[0].len(), cols.len(), |i, k| cols[k][i])
}

#[test]
fn forward_and_backward_products_match_oracles_without_rotations() {
    let mut s = session(4, 3, 3, 4, 2, 4, 1);
    let alpha = Matrix::from_fn(4, 4, |i, j| (i as f64 - 1.5) * 0.5 + j as f64 * 0.25);
    let w = Matrix::from_fn(4, 2, |i, k| if (i + k) % 3 == 0 { 0.5 } else { -0.25 });
    let enc = s.upload_alpha(&alpha).unwrap();
    let (z, ops) = s.masked_products(&enc, &columns(&w), "z").unwrap();
    close(&from_columns(&z), &alpha.matmul(&w).unwrap(), 1e-6);
    assert_eq!((ops.rot, ops.hst_rot), (0, 0));

    let (z, _) = s.masked_products(&enc, &columns(&hesimd_core::matrix::identity::<f64>(4)), "z").unwrap();
    close(&from_columns(&z), &alpha, 1e-6);

    let delta = Matrix::from_fn(4, 2, |i, k| ((i * 2 + k) as f64).cos());
    let enc_t = transpose_diag_convert(&s.b.eval, &enc).unwrap();
    let (g, ops) = s.masked_products(&enc_t, &columns(&delta), "g").unwrap();
    // δ is not dyadic, so its encoding rounds at 2^-17
    close(&from_columns(&g), &alpha.transpose().matmul(&delta).unwrap(), 1e-4);
    assert_eq!((ops.rot, ops.hst_rot), (0, 0));

    let (g, _) = s.masked_products(&enc_t, &columns(&Matrix::zeros(4, 2)), "g").unwrap();
    assert!(g.iter().flatten().all(|&v| v == 0.0));
}

#[test]
fn one_upload_and_two_masked_downloads_per_batch() {
    let mut s = session(8, 4, 4, 4, 3, 8, 2);
    for batch in [[0, 1, 2, 3, 4, 5, 6, 7], [7, 6, 5, 4, 3, 2, 1, 0]] {
        let before = s.net.transcript().len();
        let stats = s.iteration(&batch).unwrap();
        assert_eq!((stats.forward_ops.rot, stats.forward_ops.hst_rot), (0, 0));
        assert_eq!((stats.backward_ops.rot, stats.backward_ops.hst_rot), (0, 0));
        let recs = &s.net.transcript()[before..];
        let rlwe = |from, to| {
            recs.iter().filter(|r| r.kind == MessageKind::RlweCt && r.sender == from && r.receiver == to).count()
        };
        assert_eq!(rlwe(Party::A, Party::B), 1);
        assert_eq!(rlwe(Party::B, Party::A), 2);
        assert_eq!(recs.iter().filter(|r| r.label == "alpha").count(), 1);
    }
    assert_eq!(s.net.pending(), 0);
}

#[test]
fn iteration_matches_cleartext_backpropagation() {
    let mut s = session(16, 4, 4, 4, 3, 16, 3);
    let mut reference = s.model();
    let idx: Vec<usize> = (0..16).collect();
    let (xa, xb, y) = (s.a.features.clone(), s.b.features.clone(), s.b.labels.clone());
    for _ in 0..3 {
        let f = reference.forward(&xa, &xb);
        let g = reference.backward(&xa, &xb, &f, &y);
        reference.apply(&g, s.lr);
        s.iteration(&idx).unwrap();
    }
    let got = s.model();
    close(&got.va, &reference.va, 1e-4);
    close(&got.vb, &reference.vb, 1e-4);
    close(&got.wa, &reference.wa, 1e-4);
    close(&got.wb, &reference.wb, 1e-4);
    for (a, b) in got.top.iter().zip(&reference.top) {
        assert!((a - b).abs() < 1e-4);
    }
}
