use std::sync::Arc;

use hesimd_core::simd::SemanticBackend;
use hesimd_core::Matrix;
use hesimd_protocols::common::{matvec, ProtocolParams};
use hesimd_protocols::linr::LinrSession;
use hesimd_protocols::model::scaled_transpose_product;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn session(m: usize, na: usize, nb: usize, slots: usize, seed: u64) -> (LinrSession<SemanticBackend>, Vec<f64>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut mat = |r, c| Matrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0));
    let (xa, xb) = (mat(m, na), mat(m, nb));
    let mut rng = ChaCha20Rng::seed_from_u64(seed + 1);
    let y: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
    let params = ProtocolParams::semantic(slots);
    let backend = Arc::new(SemanticBackend::new(params.scheme).unwrap());
    (LinrSession::new(params, backend, xa, xb, y.clone(), 0.1, seed).unwrap(), y)
}

#[test]
fn gradient_matches_cleartext_oracle() {
    let (mut s, y) = session(4, 4, 4, 8, 11);
    s.a.weights = vec![0.3, -0.2, 0.5, 0.1];
    s.b.weights = vec![-0.4, 0.25, 0.0, 0.7];
    let idx = [0, 1, 2, 3];
    let (xa, xb) = (s.a.features.clone(), s.b.features.clone());
    let u: Vec<f64> =
        matvec(&xa, &s.a.weights).iter().zip(matvec(&xb, &s.b.weights)).map(|(a, b)| a + b).collect();
    let d: Vec<f64> = u.iter().zip(&y).map(|(u, y)| u - y).collect();
    let (oa, ob) = (scaled_transpose_product(&xa, &d), scaled_transpose_product(&xb, &d));
    let stats = s.iteration(&idx).unwrap();
    for (g, o) in stats.grad_a.iter().zip(&oa).chain(stats.grad_b.iter().zip(&ob)) {
        assert!((g - o).abs() <= 2f64.powi(-8), "{g} vs {o}");
    }
    assert_eq!(s.net.pending(), 0);
}

#[test]
fn zero_everything_gives_zero_gradient() {
    let params = ProtocolParams::semantic(8);
    let backend = Arc::new(SemanticBackend::new(params.scheme).unwrap());
    let mut s =
        LinrSession::new(params, backend, Matrix::zeros(4, 4), Matrix::zeros(4, 4), vec![0.0; 4], 0.1, 1).unwrap();
    let stats = s.iteration(&[0, 1, 2, 3]).unwrap();
    assert!(stats.grad_a.iter().chain(&stats.grad_b).all(|&g| g == 0.0));
}

#[test]
fn matmult_ops_follow_the_predictor() {
    for (m, na, nb, slots) in [(4, 4, 4, 8), (8, 2, 4, 8), (16, 4, 2, 32), (64, 4, 4, 64)] {
        let (mut s, _) = session(m, na, nb, slots, 5);
        let idx: Vec<usize> = (0..m).collect();
        let stats = s.iteration(&idx).unwrap();
        assert_eq!(stats.matmult_ops_a, stats.prediction_a.ops, "A at m={m} n={na}");
        assert_eq!(stats.matmult_ops_b, stats.prediction_b.ops, "B at m={m} n={nb}");
        assert_eq!(stats.matmult_ops_a.rot, 0);
    }
}

#[test]
fn arbiter_only_sees_masked_ciphertexts() {
    let (mut s, _) = session(8, 4, 4, 8, 3);
    s.iteration(&(0..8).collect::<Vec<_>>()).unwrap();
    let labels: Vec<&str> = s.net.transcript().iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["u_a", "d", "masked-gradient", "masked-gradient", "masked-gradient-plain", "masked-gradient-plain"]);
}

#[test]
fn training_recovers_generating_weights() {
    use hesimd_protocols::dataset::{generate, DatasetSpec, TaskKind};
    use hesimd_protocols::training::{train, ProtocolKind, TrainingConfig};
    let spec = DatasetSpec { rows: 512, features_a: 4, features_b: 4, task: TaskKind::Linear, noise: 0.1, seed: 8 };
    let (data, truth) = generate(&spec).unwrap();
    let params = ProtocolParams::semantic(64);
    let backend = Arc::new(SemanticBackend::new(params.scheme).unwrap());
    let mut s = LinrSession::new(params, backend, data.xa.clone(), data.xb.clone(), data.y.clone(), 0.1, 8).unwrap();
    let cfg = TrainingConfig::new(ProtocolKind::Linr);
    for epoch in 0..cfg.epochs {
        for idx in hesimd_protocols::model::batches(data.rows(), cfg.batch_size, cfg.seed, epoch) {
            s.iteration(&idx).unwrap();
        }
    }
    let got = s.model();
    for (w, t) in got.wa.iter().chain(&got.wb).zip(truth.weights_a.iter().chain(&truth.weights_b)) {
        assert!((w - t).abs() < 0.05, "{w} vs {t}");
    }
    assert!(train(&cfg, &data).unwrap().max_loss_gap < 1e-3);
}
