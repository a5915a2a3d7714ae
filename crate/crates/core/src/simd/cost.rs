//! Abstract time and byte costs of the basic operations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simd::meter::OpCounter;

/// Unit costs of O1-O4 plus ciphertext sizing parameters.
///
/// The default unit costs (1, 2, 30, 10) are a modeling choice. They only
/// drive benchmark rankings and never enter correctness checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub cost_add: f64,
    pub cost_mult: f64,
    pub cost_rot: f64,
    pub cost_hst_rot: f64,
    #[serde(rename = "N")]
    pub ring_degree: usize,
    pub log_q: u32,
    #[serde(default)]
    pub t: Option<u64>,
    #[serde(default)]
    pub delta: Option<u64>,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            cost_add: 1.0,
            cost_mult: 2.0,
            cost_rot: 30.0,
            cost_hst_rot: 10.0,
            ring_degree: 8192,
            log_q: 122,
            t: None,
            delta: None,
        }
    }
}

impl CostModel {
    pub fn new(ring_degree: usize, log_q: u32) -> Result<Self> {
        let m = Self { ring_degree, log_q, ..Self::default() };
        m.validate()?;
        Ok(m)
    }

    pub fn with_unit_costs(mut self, add: f64, mult: f64, rot: f64, hst_rot: f64) -> Result<Self> {
        self.cost_add = add;
        self.cost_mult = mult;
        self.cost_rot = rot;
        self.cost_hst_rot = hst_rot;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let ordered = self.cost_rot > self.cost_hst_rot
            && self.cost_hst_rot > self.cost_mult
            && self.cost_mult >= self.cost_add
            && self.cost_add > 0.0;
        if !ordered {
            return Err(Error::InvalidCostModel(format!(
                "need rot > hst_rot > mult >= add > 0, got {} {} {} {}",
                self.cost_rot, self.cost_hst_rot, self.cost_mult, self.cost_add
            )));
        }
        if !self.ring_degree.is_power_of_two() || self.log_q == 0 {
            return Err(Error::InvalidCostModel(format!(
                "N must be a power of two and log_q positive (N={}, log_q={})",
                self.ring_degree, self.log_q
            )));
        }
        Ok(())
    }

    /// Parses a TOML document; unspecified keys keep their defaults.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Partial {
            cost_add: Option<f64>,
            cost_mult: Option<f64>,
            cost_rot: Option<f64>,
            cost_hst_rot: Option<f64>,
            #[serde(rename = "N")]
            n: Option<usize>,
            log_q: Option<u32>,
            t: Option<u64>,
            delta: Option<u64>,
        }
        let p: Partial = toml::from_str(s).map_err(|e| Error::InvalidCostModel(e.to_string()))?;
        let d = Self::default();
        let m = Self {
            cost_add: p.cost_add.unwrap_or(d.cost_add),
            cost_mult: p.cost_mult.unwrap_or(d.cost_mult),
            cost_rot: p.cost_rot.unwrap_or(d.cost_rot),
            cost_hst_rot: p.cost_hst_rot.unwrap_or(d.cost_hst_rot),
            ring_degree: p.n.unwrap_or(d.ring_degree),
            log_q: p.log_q.unwrap_or(d.log_q),
            t: p.t,
            delta: p.delta,
        };
        m.validate()?;
        Ok(m)
    }

    fn coeff_bytes(&self) -> u64 {
        u64::from(self.log_q).div_ceil(8)
    }

    pub fn rlwe_ct_bytes(&self) -> u64 {
        2 * self.ring_degree as u64 * self.coeff_bytes()
    }

    pub fn lwe_ct_bytes(&self) -> u64 {
        (self.ring_degree as u64 + 1) * self.coeff_bytes()
    }

    pub fn time(&self, ops: &OpCounter) -> f64 {
        ops.add as f64 * self.cost_add
            + ops.mult as f64 * self.cost_mult
            + ops.rot as f64 * self.cost_rot
            + ops.hst_rot as f64 * self.cost_hst_rot
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sizes() {
        let m = CostModel::default();
        assert_eq!(m.rlwe_ct_bytes(), 2 * 8192 * 16);
        assert_eq!(m.lwe_ct_bytes(), 8193 * 16);
        assert_eq!(m.time(&OpCounter::new(1, 1, 1, 1)), 43.0);
    }

    #[test]
    fn toml_overrides_and_rejects_bad_ordering() {
        let m = CostModel::from_toml_str("cost_rot = 50.0\nN = 4096\nlog_q = 156\n").unwrap();
        assert_eq!(m.cost_rot, 50.0);
        assert_eq!(m.ring_degree, 4096);
        assert_eq!(m.rlwe_ct_bytes(), 2 * 4096 * 20);
        assert!(CostModel::from_toml_str("cost_hst_rot = 40.0").is_err());
        assert!(CostModel::from_toml_str("cost_add = 3.0").is_err());
        assert!(CostModel::from_toml_str("bogus = 1").is_err());
    }
}
