use hesimd_protocols::dataset::{generate, DatasetSpec, TaskKind};
use hesimd_protocols::training::{train, ProtocolKind, TrainingConfig};

fn data(task: TaskKind) -> hesimd_protocols::dataset::Dataset {
    let spec = DatasetSpec { rows: 512, features_a: 4, features_b: 4, task, noise: 0.1, seed: 21 };
    generate(&spec).unwrap().0
}

fn run(kind: ProtocolKind, task: TaskKind, tol: f64) {
    let report = train(&TrainingConfig::new(kind), &data(task)).unwrap();
    assert_eq!(report.epochs.len(), 10);
    for e in &report.epochs {
        println!("{kind} epoch {}: fed {:.6} central {:.6} gap {:.2e}", e.epoch, e.fed_loss, e.central_loss, e.loss_gap);
        assert!(e.loss_gap <= tol, "{kind} epoch {} gap {}", e.epoch, e.loss_gap);
    }
    let (first, last) = (&report.epochs[0], report.epochs.last().unwrap());
    assert!(last.central_loss <= first.central_loss, "{kind} reference does not train");
}

#[test]
fn linr_tracks_centralized_sgd() {
    run(ProtocolKind::Linr, TaskKind::Linear, 1e-3);
}

#[test]
fn caesar_tracks_centralized_cubic_sigmoid() {
    run(ProtocolKind::Caesar, TaskKind::Logistic, 1e-2);
}

#[test]
fn nn_tracks_centralized_backprop() {
    run(ProtocolKind::Nn, TaskKind::Linear, 1e-2);
}

#[test]
fn caesar_auc_close_to_reference() {
    let mut cfg = TrainingConfig::new(ProtocolKind::Caesar);
    cfg.epochs = 5;
    let r = train(&cfg, &data(TaskKind::Logistic)).unwrap();
    let last = r.epochs.last().unwrap();
    assert!((last.fed_auc.unwrap() - last.central_auc.unwrap()).abs() <= 0.01);
}

#[test]
fn zero_epochs_report_the_initial_loss_only() {
    let spec = DatasetSpec { rows: 64, features_a: 2, features_b: 2, task: TaskKind::Linear, noise: 0.1, seed: 3 };
    let (data, _) = generate(&spec).unwrap();
    let mut cfg = TrainingConfig::new(ProtocolKind::Linr);
    cfg.epochs = 0;
    let report = train(&cfg, &data).unwrap();
    assert!(report.epochs.is_empty());
    assert_eq!(report.messages, 0);
    assert_eq!(report.initial.loss_gap, 0.0);
    assert!(report.initial.fed_loss > 0.0);
}
