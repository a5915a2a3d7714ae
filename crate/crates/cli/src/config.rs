//! Run configuration shared by the subcommands.

use std::path::PathBuf;

use clap::ValueEnum;
use hesimd_core::matmult::{pad_pow2, Method};
use hesimd_core::rlwe::RlweParams;
use hesimd_core::simd::CostModel;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Semantic,
    Rlwe,
}

/// Ciphertext sizing used for byte accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// N = 8192, log q = 122.
    #[value(name = "paper-122")]
    Paper122,
    /// N = 8192, log q = 156.
    #[value(name = "paper-156")]
    Paper156,
    /// N = 1024 with the live RLWE parameters.
    #[value(name = "desk-1024")]
    Desk1024,
}

impl Preset {
    pub fn cost_model(self) -> CostModel {
        let (n, log_q) = match self {
            Preset::Paper122 => (8192, 122),
            Preset::Paper156 => (8192, 156),
            Preset::Desk1024 => (1024, RlweParams::desk_1024().scheme.coeff_modulus_bits),
        };
        CostModel::new(n, log_q).expect("preset cost models are valid")
    }

    /// Slot count of a BFV ciphertext at this preset, `N/2`.
    pub fn default_slots(self) -> usize {
        self.cost_model().ring_degree / 2
    }
}

/// Pairs `--m` and `--n` position by position; a single value is broadcast.
pub fn pair_sizes(ms: &[usize], ns: &[usize]) -> Result<Vec<(usize, usize)>> {
    if ms.is_empty() || ns.is_empty() {
        return Err(CliError::ConfigInvalid("at least one --m and one --n value is required".into()));
    }
    if ms.iter().chain(ns).any(|&v| v == 0) {
        return Err(CliError::ConfigInvalid("matrix dimensions must be positive".into()));
    }
    let pairs = match (ms.len(), ns.len()) {
        (1, _) => ns.iter().map(|&n| (ms[0], n)).collect(),
        (_, 1) => ms.iter().map(|&m| (m, ns[0])).collect(),
        (a, b) if a == b => ms.iter().copied().zip(ns.iter().copied()).collect(),
        (a, b) => {
            return Err(CliError::ConfigInvalid(format!(
                "--m has {a} values and --n has {b}; give equal counts or a single value for one of them"
            )))
        }
    };
    Ok(pairs)
}

/// Whether `method` can run an `m × n` product with `slots` slots and ring degree `degree`.
pub fn applicable(method: Method, m: usize, n: usize, slots: usize, degree: usize) -> bool {
    match method {
        Method::Cheetah => m * n <= degree,
        Method::Packvfl => true,
        _ => pad_pow2(m) <= slots && pad_pow2(n) <= slots,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub methods: Vec<Method>,
    pub sizes: Vec<(usize, usize)>,
    /// `N′`; defaults to the preset's.
    pub slots: Option<usize>,
    pub backend: BackendKind,
    pub preset: Preset,
    pub seed: u64,
}

impl BenchConfig {
    /// Slot count the run uses after validation.
    pub fn resolved_slots(&self) -> usize {
        match self.backend {
            BackendKind::Rlwe => RlweParams::desk_1024().scheme.slot_count,
            BackendKind::Semantic => self.slots.unwrap_or_else(|| self.preset.default_slots()),
        }
    }

    /// Ring degree seen by Cheetah.
    pub fn resolved_degree(&self) -> usize {
        match self.backend {
            BackendKind::Rlwe => RlweParams::desk_1024().scheme.ring_degree,
            // the semantic backend batches N′ = N
            BackendKind::Semantic => self.resolved_slots(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(CliError::ConfigInvalid("no method selected; pass --method".into()));
        }
        if self.sizes.is_empty() {
            return Err(CliError::ConfigInvalid("no matrix size selected; pass --m and --n".into()));
        }
        if self.backend == BackendKind::Rlwe {
            if self.preset != Preset::Desk1024 {
                return Err(CliError::ConfigInvalid(
                    "the rlwe backend runs the desk-1024 preset only; model paper presets with --backend semantic".into(),
                ));
            }
            let live = RlweParams::desk_1024().scheme.slot_count;
            if self.slots.is_some_and(|s| s != live) {
                return Err(CliError::ConfigInvalid(format!("the rlwe backend has {live} slots; drop --slots or pass {live}")));
            }
        }
        let slots = self.resolved_slots();
        if !slots.is_power_of_two() || slots < 2 {
            return Err(CliError::ConfigInvalid(format!("slot count {slots} must be a power of two >= 2")));
        }
        let degree = self.resolved_degree();
        for &method in &self.methods {
            for &(m, n) in &self.sizes {
                if !applicable(method, m, n, slots, degree) {
                    return Err(CliError::ConfigInvalid(format!(
                        "{method} cannot run {m}x{n} with N'={slots} (N={degree}); raise --slots or use packvfl"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub methods: Vec<Method>,
    pub ms: Vec<usize>,
    pub ns: Vec<usize>,
    pub slots: Vec<usize>,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let dims = vec![2, 4, 8, 16, 32, 64];
        Self { methods: Method::ALL.to_vec(), ms: dims.clone(), ns: dims, slots: vec![8, 64, 512], seed: 1 }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.ms.is_empty() || self.ns.is_empty() || self.slots.is_empty() {
            return Err(CliError::ConfigInvalid("methods, sizes and slot counts must be non-empty".into()));
        }
        if let Some(s) = self.slots.iter().find(|s| !s.is_power_of_two() || **s < 2) {
            return Err(CliError::ConfigInvalid(format!("slot count {s} must be a power of two >= 2")));
        }
        if self.ms.contains(&0) || self.ns.contains(&0) {
            return Err(CliError::ConfigInvalid("matrix dimensions must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRun {
    pub data: PathBuf,
    pub config: hesimd_protocols::training::TrainingConfig,
    pub backend: BackendKind,
}

impl TrainRun {
    pub fn validate(&self) -> Result<()> {
        if self.backend == BackendKind::Rlwe {
            return Err(CliError::ConfigInvalid(
                "training runs on the semantic backend; the desk RLWE preset has no room for fixed-point values".into(),
            ));
        }
        self.config.validate()?;
        Ok(())
    }
}
