use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hesimd_core::matmult::Method;
use hesimd_cli::bench::bench_matmult;
use hesimd_cli::config::{pair_sizes, BackendKind, BenchConfig, Preset, TrainRun, VerifyConfig};
use hesimd_cli::report::{epoch_rows, write_report};
use hesimd_cli::train::{gen_dataset, run_train, truth_path};
use hesimd_cli::verify::{structural_reference, table_reference, verify_complexity};
use hesimd_protocols::dataset::{DatasetSpec, TaskKind};
use hesimd_protocols::training::{ProtocolKind, TrainingConfig};

#[derive(Parser)]
#[command(name = "hesimd", version, about = "Homomorphic MatMult benchmarks, complexity checks and federated training runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run MatMult methods on random matrices and record counts, bytes and errors.
    BenchMatmult(BenchArgs),
    /// Sweep a size grid and compare measured counts with the closed forms.
    VerifyComplexity(VerifyArgs),
    /// Train a federated model next to a centralized cleartext reference.
    Train(TrainArgs),
    /// Write a synthetic vertically partitioned dataset.
    GenDataset(GenArgs),
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "naive,gala,packvfl")]
    method: Vec<Method>,
    /// Row counts; paired with --n by position.
    #[arg(long, value_delimiter = ',', default_value = "64")]
    m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "64")]
    n: Vec<usize>,
    /// Slots per ciphertext (default: N/2 of the preset).
    #[arg(long)]
    slots: Option<usize>,
    #[arg(long, value_enum, default_value = "semantic")]
    backend: BackendKind,
    #[arg(long, value_enum, default_value = "paper-122")]
    preset: Preset,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Report file (.json or .csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReferenceKind {
    /// Table closed forms.
    Table,
    /// Structural predictor.
    Structural,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_delimiter = ',', default_value = "naive,column,gala-diagonal,packvfl-diagonal,gala,packvfl,cheetah")]
    method: Vec<Method>,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64")]
    m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "8,64,512")]
    slots: Vec<usize>,
    #[arg(long, value_enum, default_value = "table")]
    reference: ReferenceKind,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    protocol: ProtocolKind,
    /// Dataset CSV from gen-dataset.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 64)]
    batch: usize,
    /// Learning rate (default depends on the protocol).
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    slots: usize,
    #[arg(long, value_enum, default_value = "semantic")]
    backend: BackendKind,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 512)]
    rows: usize,
    #[arg(long, default_value_t = 4)]
    features_a: usize,
    #[arg(long, default_value_t = 4)]
    features_b: usize,
    #[arg(long, default_value = "linear")]
    task: TaskKind,
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Dataset CSV; the ground truth goes next to it as .truth.json.
    #[arg(long)]
    out: PathBuf,
}

fn bench(a: BenchArgs) -> anyhow::Result<bool> {
    let cfg = BenchConfig {
        methods: a.method,
        sizes: pair_sizes(&a.m, &a.n)?,
        slots: a.slots,
        backend: a.backend,
        preset: a.preset,
        seed: a.seed,
    };
    let report = bench_matmult(&cfg)?;
    println!(
        "{:<17} {:>5} {:>5} {:>5} {:>7} {:>6} {:>6} {:>6} {:>10} {:>10} {:>12} {:>9} {:>4}",
        "method", "m", "n", "N'", "add", "mult", "rot", "hst", "bytes_in", "bytes_out", "modeled", "wall_s", "err"
    );
    for r in &report.rows {
        println!(
            "{:<17} {:>5} {:>5} {:>5} {:>7} {:>6} {:>6} {:>6} {:>10} {:>10} {:>12.1} {:>9.4} {:>4}",
            r.method.name(),
            r.m,
            r.n,
            r.slots,
            r.add,
            r.mult,
            r.rot,
            r.hst,
            r.bytes_in,
            r.bytes_out,
            r.modeled_time,
            r.wall_time,
            r.max_abs_error
        );
    }
    for f in &report.failures {
        println!("FAIL {f}");
    }
    if let Some(out) = &a.out {
        write_report(out, &report, &report.rows).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(report.passed)
}

fn verify(a: VerifyArgs) -> anyhow::Result<bool> {
    let cfg = VerifyConfig { methods: a.method, ms: a.m, ns: a.n, slots: a.slots, seed: a.seed };
    let report = match a.reference {
        ReferenceKind::Table => verify_complexity(&cfg, &table_reference)?,
        ReferenceKind::Structural => verify_complexity(&cfg, &structural_reference)?,
    };
    for c in report.failures() {
        println!("FAIL {} {}x{} N'={}: {}", c.method, c.m, c.n, c.slots, c.diffs.join("; "));
    }
    println!("{} cases, {} passed, {} failed", report.cases.len(), report.passed, report.failed);
    if let Some(out) = &a.out {
        write_report(out, &report, &report.cases.iter().map(flat_case).collect::<Vec<_>>())
            .with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(report.all_passed())
}

#[derive(serde::Serialize)]
struct CaseRow {
    method: Method,
    m: usize,
    n: usize,
    slots: usize,
    add: u64,
    mult: u64,
    rot: u64,
    hst: u64,
    cts_in: u64,
    cts_out: u64,
    passed: bool,
    diffs: String,
}

fn flat_case(c: &hesimd_cli::verify::CaseCheck) -> CaseRow {
    CaseRow {
        method: c.method,
        m: c.m,
        n: c.n,
        slots: c.slots,
        add: c.measured.add,
        mult: c.measured.mult,
        rot: c.measured.rot,
        hst: c.measured.hst_rot,
        cts_in: c.b_to_a.rlwe + c.b_to_a.lwe,
        cts_out: c.a_to_b.rlwe + c.a_to_b.lwe,
        passed: c.passed(),
        diffs: c.diffs.join("; "),
    }
}

fn train_cmd(a: TrainArgs) -> anyhow::Result<bool> {
    let mut config = TrainingConfig::new(a.protocol);
    config.epochs = a.epochs;
    config.batch_size = a.batch;
    config.seed = a.seed;
    config.slots = a.slots;
    if let Some(lr) = a.lr {
        config.lr = lr;
    }
    let run = TrainRun { data: a.data, config, backend: a.backend };
    let outcome = run_train(&run)?;
    let r = &outcome.report;
    for e in std::iter::once(&r.initial).chain(&r.epochs) {
        let auc = match (e.fed_auc, e.central_auc) {
            (Some(f), Some(c)) => format!(" auc {f:.4} / {c:.4}"),
            _ => String::new(),
        };
        println!(
            "epoch {:>3}: loss {:.6} / central {:.6} gap {:.2e}{auc} bytes {} ops {}+{}+{}+{}",
            e.epoch, e.fed_loss, e.central_loss, e.loss_gap, e.bytes, e.ops.add, e.ops.mult, e.ops.rot, e.ops.hst_rot
        );
    }
    println!("max gap {:.2e} (tolerance {:.0e}), {} messages", r.max_loss_gap, outcome.tolerance, r.messages);
    if let Some(out) = &a.out {
        write_report(out, r, &epoch_rows(r)).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(outcome.passed)
}

fn gen(a: GenArgs) -> anyhow::Result<bool> {
    let spec = DatasetSpec {
        rows: a.rows,
        features_a: a.features_a,
        features_b: a.features_b,
        task: a.task,
        noise: a.noise,
        seed: a.seed,
    };
    let (data, _) = gen_dataset(&spec, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    println!("wrote {} rows to {} and weights to {}", data.rows(), a.out.display(), truth_path(&a.out).display());
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::BenchMatmult(a) => bench(a),
        Command::VerifyComplexity(a) => verify(a),
        Command::Train(a) => train_cmd(a),
        Command::GenDataset(a) => gen(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
