//! MatMult benchmark: every (method, size) case runs through the two-party
//! exchange, and its counts, bytes, modeled cost and oracle error are recorded.

use std::sync::Arc;
use std::time::Instant;

use hesimd_core::matmult::{all_required_rotations, predict_complexity, Method};
use hesimd_core::modarith::{add_mod, mul_mod};
use hesimd_core::rlwe::{RlweBackend, RlweParams};
use hesimd_core::simd::{CostModel, OpCounter, Party, SchemeParams, SemanticBackend, SimdBackend};
use hesimd_core::Matrix;
use hesimd_protocols::exchange::matmult_exchange;
use hesimd_protocols::netsim::ChannelSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{BackendKind, BenchConfig};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: Method,
    pub m: usize,
    pub n: usize,
    pub slots: usize,
    pub add: u64,
    pub mult: u64,
    pub rot: u64,
    pub hst: u64,
    /// Bytes B sent to A (the encrypted vector).
    pub bytes_in: u64,
    /// Bytes A sent back.
    pub bytes_out: u64,
    /// Operation cost under the cost model's unit costs.
    pub modeled_time: f64,
    /// Modeled transfer time of both messages, seconds.
    pub comm_time: f64,
    pub wall_time: f64,
    /// Largest centered residue difference from `X·y mod t`.
    pub max_abs_error: u64,
    pub counts_match: bool,
    pub audit_passed: bool,
}

impl ReportRow {
    pub fn ops(&self) -> OpCounter {
        OpCounter::new(self.add, self.mult, self.rot, self.hst)
    }

    pub fn passed(&self) -> bool {
        self.counts_match && self.audit_passed && self.max_abs_error == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: BenchConfig,
    pub cost: CostModel,
    pub rows: Vec<ReportRow>,
    pub passed: bool,
    /// One line per failing row.
    pub failures: Vec<String>,
}

pub fn oracle_mod(x: &Matrix<u64>, y: &[u64], t: u64) -> Vec<u64> {
    (0..x.rows()).map(|i| (0..x.cols()).fold(0, |acc, j| add_mod(acc, mul_mod(x.get(i, j), y[j], t), t))).collect()
}

/// `|a - b|` as the smaller of the two distances around `Z_t`.
fn centered_distance(a: u64, b: u64, t: u64) -> u64 {
    let d = a.abs_diff(b);
    d.min(t - d)
}

fn run_case<B: SimdBackend>(
    backend: &Arc<B>,
    method: Method,
    (m, n): (usize, usize),
    cost: &CostModel,
    seed: u64,
) -> Result<ReportRow> {
    let p = *backend.params();
    let t = p.plain_modulus;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Matrix::from_fn(m, n, |_, _| rng.random_range(0..t));
    let y: Vec<u64> = (0..n).map(|_| rng.random_range(0..t)).collect();
    let start = Instant::now();
    let out = matmult_exchange(backend.clone(), method, &x, &y, cost.clone(), ChannelSpec::default())?;
    let wall_time = start.elapsed().as_secs_f64();
    let want = oracle_mod(&x, &y, t);
    let max_abs_error = if out.result.len() == want.len() {
        out.result.iter().zip(&want).map(|(&a, &b)| centered_distance(a, b, t)).max().unwrap_or(0)
    } else {
        t
    };
    let predicted = predict_complexity(method, m, n, p.slot_count, p.ring_degree)?;
    Ok(ReportRow {
        method,
        m,
        n,
        slots: p.slot_count,
        add: out.ops.add,
        mult: out.ops.mult,
        rot: out.ops.rot,
        hst: out.ops.hst_rot,
        bytes_in: out.comm.bytes(Party::B, Party::A),
        bytes_out: out.comm.bytes(Party::A, Party::B),
        modeled_time: cost.time(&out.ops),
        comm_time: out.comm.total_modeled_time(),
        wall_time,
        max_abs_error,
        counts_match: out.ops == predicted.ops,
        audit_passed: out.audit.passed,
    })
}

fn run_all<B: SimdBackend>(backend: Arc<B>, cfg: &BenchConfig, cost: &CostModel) -> Result<Vec<ReportRow>> {
    let cases: Vec<(Method, (usize, usize))> =
        cfg.methods.iter().flat_map(|&meth| cfg.sizes.iter().map(move |&s| (meth, s))).collect();
    cases
        .par_iter()
        .enumerate()
        .map(|(i, &(method, size))| run_case(&backend, method, size, cost, cfg.seed.wrapping_add(i as u64)))
        .collect()
}

pub fn bench_matmult(cfg: &BenchConfig) -> Result<Report> {
    cfg.validate()?;
    let cost = cfg.preset.cost_model();
    let rows = match cfg.backend {
        BackendKind::Semantic => {
            let backend = Arc::new(SemanticBackend::new(SchemeParams::semantic(cfg.resolved_slots()))?);
            run_all(backend, cfg, &cost)?
        }
        BackendKind::Rlwe => {
            let params = RlweParams::desk_1024();
            let slots = params.scheme.slot_count;
            let mut rots: Vec<usize> = cfg.sizes.iter().flat_map(|&(m, n)| all_required_rotations(m, n, slots)).collect();
            rots.sort_unstable();
            rots.dedup();
            run_all(Arc::new(RlweBackend::new(params, &rots, cfg.seed)?), cfg, &cost)?
        }
    };
    let failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.passed())
        .map(|r| {
            format!(
                "{} {}x{} N'={}: counts_match={} audit_passed={} max_abs_error={}",
                r.method, r.m, r.n, r.slots, r.counts_match, r.audit_passed, r.max_abs_error
            )
        })
        .collect();
    Ok(Report { config: cfg.clone(), cost, passed: failures.is_empty(), rows, failures })
}
