//! Complexity verification: measured counts and ciphertext traffic of every
//! method over a power-of-two grid, compared with a reference formula.

use std::sync::Arc;

use hesimd_core::matmult::{predict_complexity, published_complexity, ComplexityPrediction, Method};
use hesimd_core::simd::{CostModel, OpCounter, Party, SchemeParams, SemanticBackend, SimdBackend};
use hesimd_core::Matrix;
use hesimd_protocols::exchange::matmult_exchange;
use hesimd_protocols::netsim::{audit, ChannelSpec, DirectionCounts};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::oracle_mod;
use crate::config::{applicable, VerifyConfig};
use crate::error::Result;

/// Expected counts for `(method, m, n, N′, N)`, or `None` when there is no formula.
pub type Reference = dyn Fn(Method, usize, usize, usize, usize) -> Option<ComplexityPrediction> + Sync;

/// The table closed forms, and the structural prediction where the tables have no entry.
pub fn table_reference(method: Method, m: usize, n: usize, slots: usize, degree: usize) -> Option<ComplexityPrediction> {
    published_complexity(method, m, n, slots).or_else(|| predict_complexity(method, m, n, slots, degree).ok())
}

/// The structural predictor alone.
pub fn structural_reference(method: Method, m: usize, n: usize, slots: usize, degree: usize) -> Option<ComplexityPrediction> {
    predict_complexity(method, m, n, slots, degree).ok()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseCheck {
    pub method: Method,
    pub m: usize,
    pub n: usize,
    pub slots: usize,
    pub measured: OpCounter,
    pub expected: Option<OpCounter>,
    pub b_to_a: DirectionCounts,
    pub a_to_b: DirectionCounts,
    pub oracle_exact: bool,
    /// Empty when the case passes.
    pub diffs: Vec<String>,
}

impl CaseCheck {
    pub fn passed(&self) -> bool {
        self.diffs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub cases: Vec<CaseCheck>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseCheck> {
        self.cases.iter().filter(|c| !c.passed())
    }
}

fn op_diffs(measured: OpCounter, expected: OpCounter) -> Vec<String> {
    [
        ("add", measured.add, expected.add),
        ("mult", measured.mult, expected.mult),
        ("rot", measured.rot, expected.rot),
        ("hst", measured.hst_rot, expected.hst_rot),
    ]
    .into_iter()
    .filter(|(_, a, b)| a != b)
    .map(|(name, a, b)| format!("{name}: measured {a}, expected {b}"))
    .collect()
}

/// Runs one case on a fresh semantic backend with `slots` slots.
pub fn check_case(method: Method, m: usize, n: usize, slots: usize, seed: u64, reference: &Reference) -> Result<CaseCheck> {
    let backend = Arc::new(SemanticBackend::new(SchemeParams::semantic(slots))?);
    let t = backend.params().plain_modulus;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Matrix::from_fn(m, n, |_, _| rng.random_range(0..t));
    let y: Vec<u64> = (0..n).map(|_| rng.random_range(0..t)).collect();
    let out = matmult_exchange(backend, method, &x, &y, CostModel::default(), ChannelSpec::default())?;
    let oracle_exact = out.result == oracle_mod(&x, &y, t);
    let expected = reference(method, m, n, slots, slots);
    let mut diffs = Vec::new();
    if !oracle_exact {
        diffs.push("decrypted product differs from X·y".to_string());
    }
    let (b_to_a, a_to_b) = match &expected {
        Some(e) => {
            diffs.extend(op_diffs(out.ops, e.ops));
            let a = audit(&out.transcript, e, Party::A, Party::B);
            diffs.extend(a.mismatches);
            (a.b_to_a, a.a_to_b)
        }
        None => {
            diffs.push("no reference formula".to_string());
            (out.audit.b_to_a, out.audit.a_to_b)
        }
    };
    Ok(CaseCheck { method, m, n, slots, measured: out.ops, expected: expected.map(|e| e.ops), b_to_a, a_to_b, oracle_exact, diffs })
}

/// Sweeps every applicable `(method, m, n, N′)` of the grid.
pub fn verify_complexity(cfg: &VerifyConfig, reference: &Reference) -> Result<VerifyReport> {
    cfg.validate()?;
    let mut grid = Vec::new();
    for &slots in &cfg.slots {
        for &m in &cfg.ms {
            for &n in &cfg.ns {
                for &method in &cfg.methods {
                    if applicable(method, m, n, slots, slots) {
                        grid.push((method, m, n, slots));
                    }
                }
            }
        }
    }
    let cases = grid
        .par_iter()
        .enumerate()
        .map(|(i, &(method, m, n, slots))| check_case(method, m, n, slots, cfg.seed.wrapping_add(i as u64), reference))
        .collect::<Result<Vec<_>>>()?;
    let failed = cases.iter().filter(|c| !c.passed()).count();
    Ok(VerifyReport { config: cfg.clone(), passed: cases.len() - failed, failed, cases })
}
