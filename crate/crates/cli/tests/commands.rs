use std::process::Command;

use hesimd_cli::bench::bench_matmult;
use hesimd_cli::config::{pair_sizes, BackendKind, BenchConfig, Preset, TrainRun, VerifyConfig};
use hesimd_cli::train::{gen_dataset, run_train, truth_path};
use hesimd_cli::verify::{check_case, structural_reference, table_reference, verify_complexity};
use hesimd_cli::CliError;
use hesimd_core::matmult::{predict_complexity, ComplexityPrediction, Method};
use hesimd_protocols::dataset::{Dataset, DatasetSpec, GroundTruth, TaskKind};
use hesimd_protocols::training::{ProtocolKind, TrainingConfig};
use nalgebra::{DMatrix, DVector};

fn bench_cfg(methods: &[Method], sizes: &[(usize, usize)]) -> BenchConfig {
    BenchConfig {
        methods: methods.to_vec(),
        sizes: sizes.to_vec(),
        slots: None,
        backend: BackendKind::Semantic,
        preset: Preset::Paper122,
        seed: 5,
    }
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("hesimd-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn bench_grid_has_one_exact_row_per_case() {
    let cfg = bench_cfg(&[Method::Naive, Method::Gala, Method::Packvfl], &[(64, 64), (256, 256)]);
    let report = bench_matmult(&cfg).unwrap();
    assert_eq!(report.rows.len(), 6);
    assert!(report.passed, "{:?}", report.failures);
    assert!(report.rows.iter().all(|r| r.max_abs_error == 0 && r.modeled_time.is_finite()));
    let at = |m, size| report.rows.iter().find(|r| r.method == m && r.m == size).unwrap();
    assert_eq!(at(Method::Packvfl, 64).ops(), at(Method::Gala, 64).ops());
    assert!(at(Method::Packvfl, 256).modeled_time < at(Method::Gala, 256).modeled_time);
}

#[test]
fn bench_rejects_empty_and_oversized_configs() {
    let empty = bench_cfg(&[], &[(4, 4)]);
    assert!(matches!(bench_matmult(&empty), Err(CliError::ConfigInvalid(_))));
    let mut big = bench_cfg(&[Method::Naive], &[(64, 64)]);
    big.slots = Some(32);
    assert!(matches!(bench_matmult(&big), Err(CliError::ConfigInvalid(_))));
    let mut rlwe = bench_cfg(&[Method::Naive], &[(4, 4)]);
    rlwe.backend = BackendKind::Rlwe;
    assert!(matches!(bench_matmult(&rlwe), Err(CliError::ConfigInvalid(_))));
    assert!(pair_sizes(&[1, 2], &[1, 2, 3]).is_err());
    assert_eq!(pair_sizes(&[4], &[1, 2]).unwrap(), vec![(4, 1), (4, 2)]);
}

#[test]
fn bench_on_rlwe_is_exact() {
    let mut cfg = bench_cfg(&Method::ALL, &[(8, 8), (4, 16)]);
    cfg.backend = BackendKind::Rlwe;
    cfg.preset = Preset::Desk1024;
    let report = bench_matmult(&cfg).unwrap();
    assert_eq!(report.rows.len(), 14);
    assert!(report.passed, "{:?}", report.failures);
}

#[test]
fn bench_reports_are_deterministic_apart_from_wall_time() {
    let cfg = bench_cfg(&[Method::Naive, Method::Packvfl, Method::Cheetah], &[(8, 16), (32, 4)]);
    let strip = |mut r: hesimd_cli::bench::Report| {
        r.rows.iter_mut().for_each(|row| row.wall_time = 0.0);
        serde_json::to_string(&r).unwrap()
    };
    assert_eq!(strip(bench_matmult(&cfg).unwrap()), strip(bench_matmult(&cfg).unwrap()));
}

#[test]
fn structural_reference_passes_the_full_grid() {
    let cfg = VerifyConfig { slots: vec![8, 64], ..VerifyConfig::default() };
    let report = verify_complexity(&cfg, &structural_reference).unwrap();
    assert!(report.all_passed(), "{:?}", report.failures().next());
    assert!(report.cases.len() > 300);
}

#[test]
fn corrupted_predictor_fails_with_itemized_diff() {
    let corrupt = |m: Method, r, c, s, d| -> Option<ComplexityPrediction> {
        let mut p = predict_complexity(m, r, c, s, d).ok()?;
        if m == Method::Gala {
            p.ops.rot += 1;
        }
        Some(p)
    };
    let cfg = VerifyConfig { slots: vec![8], ms: vec![2, 4], ns: vec![4], ..VerifyConfig::default() };
    let report = verify_complexity(&cfg, &corrupt).unwrap();
    let failed: Vec<_> = report.failures().collect();
    assert_eq!(failed.len(), 2);
    assert!(failed.iter().all(|c| c.method == Method::Gala));
    assert!(failed[0].diffs[0].starts_with("rot: measured"), "{:?}", failed[0].diffs);
}

#[test]
fn partition_cases_against_the_tables() {
    // m ≤ N′ < n and n ≤ N′ < m follow the tables exactly
    for (m, n) in [(4, 16), (16, 4)] {
        let c = check_case(Method::Packvfl, m, n, 8, 1, &table_reference).unwrap();
        assert!(c.passed(), "{m}x{n}: {:?}", c.diffs);
    }
    let c = check_case(Method::Packvfl, 4, 16, 8, 1, &table_reference).unwrap();
    assert_eq!((c.measured.add, c.measured.mult, c.measured.rot, c.measured.hst_rot), (7, 8, 0, 6));
    assert_eq!((c.b_to_a.rlwe, c.a_to_b.rlwe), (2, 1));
    // m, n > N′: one output ciphertext per row block, so m/N′ − 1 fewer additions than printed
    let c = check_case(Method::Packvfl, 16, 16, 8, 1, &table_reference).unwrap();
    assert_eq!(c.diffs, vec!["add: measured 30, expected 31".to_string()]);
    assert!(check_case(Method::Packvfl, 16, 16, 8, 1, &structural_reference).unwrap().passed());
}

#[test]
fn generated_dataset_has_header_and_rows() {
    let path = tmp("lin.csv");
    let spec = DatasetSpec { rows: 512, features_a: 4, features_b: 4, task: TaskKind::Linear, noise: 0.1, seed: 1 };
    let (data, _) = gen_dataset(&spec, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 513);
    assert_eq!(text.lines().next().unwrap(), "id,a_0,a_1,a_2,a_3,b_0,b_1,b_2,b_3,label");
    assert_eq!(Dataset::load(&path).unwrap(), data);
    let truth: GroundTruth = serde_json::from_str(&std::fs::read_to_string(truth_path(&path)).unwrap()).unwrap();
    assert_eq!((truth.weights_a.len(), truth.weights_b.len()), (4, 4));
}

#[test]
fn noiseless_linear_data_recovers_weights_by_least_squares() {
    let path = tmp("exact.csv");
    let spec = DatasetSpec { rows: 200, features_a: 3, features_b: 2, task: TaskKind::Linear, noise: 0.0, seed: 2 };
    let (_, truth) = gen_dataset(&spec, &path).unwrap();
    let data = Dataset::load(&path).unwrap();
    let x = DMatrix::from_fn(data.rows(), 5, |i, j| if j < 3 { data.xa.get(i, j) } else { data.xb.get(i, j - 3) });
    let y = DVector::from_vec(data.y.clone());
    let w = x.svd(true, true).solve(&y, 1e-12).unwrap();
    for (got, want) in w.iter().zip(truth.weights_a.iter().chain(&truth.weights_b)) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
}

#[test]
fn logistic_labels_are_balanced() {
    let path = tmp("logit.csv");
    let spec = DatasetSpec { rows: 10_000, features_a: 4, features_b: 4, task: TaskKind::Logistic, noise: 0.1, seed: 3 };
    let (data, _) = gen_dataset(&spec, &path).unwrap();
    let mean = data.y.iter().sum::<f64>() / data.rows() as f64;
    assert!((0.4..=0.6).contains(&mean), "{mean}");
}

#[test]
fn training_runs_and_rejects_bad_inputs() {
    let path = tmp("train.csv");
    let spec = DatasetSpec { rows: 128, features_a: 2, features_b: 2, task: TaskKind::Linear, noise: 0.1, seed: 4 };
    gen_dataset(&spec, &path).unwrap();
    let mut config = TrainingConfig::new(ProtocolKind::Linr);
    config.epochs = 2;
    let run = TrainRun { data: path.clone(), config: config.clone(), backend: BackendKind::Semantic };
    let out = run_train(&run).unwrap();
    assert!(out.passed && out.report.epochs.len() == 2);
    let again = run_train(&run).unwrap();
    assert_eq!(serde_json::to_string(&out.report).unwrap(), serde_json::to_string(&again.report).unwrap());

    let rlwe = TrainRun { backend: BackendKind::Rlwe, ..run.clone() };
    assert!(matches!(run_train(&rlwe), Err(CliError::ConfigInvalid(_))));
    let missing = TrainRun { data: tmp("absent.csv"), ..run };
    assert!(matches!(run_train(&missing), Err(CliError::Protocol(hesimd_protocols::ProtocolError::DatasetMissing(_)))));
}

#[test]
fn exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hesimd");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["bench-matmult", "--m", "16", "--n", "8", "--slots", "16"]), Some(0));
    assert_eq!(status(&["verify-complexity", "--slots", "8", "--reference", "structural"]), Some(0));
    // the grid-partition addition counts differ from the printed table
    assert_eq!(status(&["verify-complexity", "--slots", "8", "--method", "packvfl"]), Some(1));
    assert_eq!(status(&["bench-matmult", "--method", "naive", "--m", "64", "--slots", "8"]), Some(2));
    let data = tmp("cli.csv");
    assert_eq!(status(&["gen-dataset", "--rows", "64", "--out", data.to_str().unwrap()]), Some(0));
    let out = tmp("report.csv");
    let args = ["train", "--protocol", "linr", "--data", data.to_str().unwrap(), "--epochs", "1", "--out", out.to_str().unwrap()];
    assert_eq!(status(&args), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 3);
}
