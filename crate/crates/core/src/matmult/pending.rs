//! Deferred rotate-and-sum: reduction plans, their cleartext evaluation, and
//! the inverse operation that splits a cleartext into plan-compatible addends.

use std::ops::Add;

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{add_mod, sub_mod};
use crate::simd::ciphertext::Ciphertext;

/// For each output index, the `(ciphertext, slot)` pairs whose sum it is.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionPlan {
    pub slots: usize,
    pub ciphertexts: usize,
    pub outputs: Vec<Vec<(usize, usize)>>,
}

impl ReductionPlan {
    /// `output[k] = slot k` of ciphertext 0.
    pub fn identity(len: usize, slots: usize) -> Self {
        Self { slots, ciphertexts: 1, outputs: (0..len).map(|k| vec![(0, k)]).collect() }
    }

    /// Output `k` of block `b` reads ciphertext `b`, for `blocks` ciphertexts of `len` outputs each.
    pub fn concat_identity(len: usize, blocks: usize, slots: usize) -> Self {
        let outputs = (0..blocks).flat_map(|b| (0..len).map(move |k| vec![(b, k)])).collect();
        Self { slots, ciphertexts: blocks, outputs }
    }

    /// Folding of `n`-wide sections onto `mp` rows each: output `s·mp + r`
    /// sums slots `s·n + j'` with `j' ≡ r (mod mp)`, `j' < n`. Only the first
    /// `m` outputs are kept.
    pub fn section_fold(m: usize, mp: usize, n: usize, slots: usize) -> Self {
        let outputs = (0..m)
            .map(|row| {
                let (s, r) = (row / mp, row % mp);
                (r..n).step_by(mp).map(|j| (0, s * n + j)).collect()
            })
            .collect();
        Self { slots, ciphertexts: 1, outputs }
    }

    /// Layout of the cleartext inverse rotate-and-sum: output `k` sums slots
    /// `k + a·len` for `a < 2^rounds`.
    pub fn interleaved(len: usize, rounds: u32, slots: usize) -> Self {
        let copies = 1usize << rounds;
        let outputs = (0..len).map(|k| (0..copies).map(|a| (0, k + a * len)).collect()).collect();
        Self { slots, ciphertexts: 1, outputs }
    }

    /// Applies the same plan to ciphertext `ct` instead of 0.
    pub fn on_ciphertext(mut self, ct: usize, total: usize) -> Self {
        for out in &mut self.outputs {
            for e in out.iter_mut() {
                e.0 = ct;
            }
        }
        self.ciphertexts = total;
        self
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for (k, out) in self.outputs.iter().enumerate() {
            if out.is_empty() {
                return Err(Error::PlanMismatch(format!("output {k} has no slots")));
            }
            for &(c, s) in out {
                if c >= self.ciphertexts || s >= self.slots {
                    return Err(Error::PlanMismatch(format!("output {k} names slot ({c}, {s}) out of range")));
                }
            }
        }
        Ok(())
    }

    fn check_inputs<T>(&self, decrypted: &[Vec<T>]) -> Result<()> {
        if decrypted.len() != self.ciphertexts {
            return Err(Error::PlanMismatch(format!(
                "plan expects {} decrypted vectors, got {}",
                self.ciphertexts,
                decrypted.len()
            )));
        }
        if let Some(v) = decrypted.iter().find(|v| v.len() != self.slots) {
            return Err(Error::PlanMismatch(format!("decrypted vector has {} slots, plan {}", v.len(), self.slots)));
        }
        self.validate()
    }
}

/// Ciphertexts awaiting a cleartext rotate-and-sum after decryption.
#[derive(Debug, Clone)]
pub struct PendingResult<P> {
    pub ciphertexts: Vec<Ciphertext<P>>,
    pub plan: ReductionPlan,
}

/// `output[k] = Σ slots named by the plan for k`.
pub fn finalize_lazy_ras<T: Copy + Zero + Add<Output = T>>(decrypted: &[Vec<T>], plan: &ReductionPlan) -> Result<Vec<T>> {
    plan.check_inputs(decrypted)?;
    Ok(plan.outputs.iter().map(|out| out.iter().fold(T::zero(), |acc, &(c, s)| acc + decrypted[c][s])).collect())
}

/// [`finalize_lazy_ras`] over residues mod `t`.
pub fn finalize_lazy_ras_mod(decrypted: &[Vec<u64>], plan: &ReductionPlan, t: u64) -> Result<Vec<u64>> {
    plan.check_inputs(decrypted)?;
    Ok(plan.outputs.iter().map(|out| out.iter().fold(0, |acc, &(c, s)| add_mod(acc, decrypted[c][s], t))).collect())
}

/// Splits every element of `v` into `2^rounds` random addends mod `t`, with
/// element `k`'s addend `a` at slot `k + a·len(v)`; vacant slots are zero.
///
/// One round turns `[M0, M1]` into `[M00, M10, M01, M11]` with `M0 = M00 + M01`.
pub fn inverse_ras_cleartext<R: Rng + ?Sized>(
    v: &[u64],
    rounds: u32,
    slots: usize,
    t: u64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let copies = 1usize.checked_shl(rounds).unwrap_or(usize::MAX);
    let needed = v.len().saturating_mul(copies);
    if needed > slots {
        return Err(Error::CapacityExceeded { len: v.len(), parts: copies, slots });
    }
    split_for_plan(v, &ReductionPlan::interleaved(v.len(), rounds, slots), t, rng).map(|mut cts| cts.remove(0))
}

/// Produces one slot vector per plan ciphertext such that evaluating `plan`
/// on them yields `v` (mod `t`); every addend but the last of each output is uniform.
pub fn split_for_plan<R: Rng + ?Sized>(v: &[u64], plan: &ReductionPlan, t: u64, rng: &mut R) -> Result<Vec<Vec<u64>>> {
    plan.validate()?;
    if v.len() != plan.len() {
        return Err(Error::PlanMismatch(format!("vector of {} values for plan of {} outputs", v.len(), plan.len())));
    }
    let mut out = vec![vec![0u64; plan.slots]; plan.ciphertexts];
    for (&x, slots) in v.iter().zip(&plan.outputs) {
        let (last, rest) = slots.split_last().expect("validated non-empty");
        let mut acc = 0;
        for &(c, s) in rest {
            let r = rng.random_range(0..t);
            out[c][s] = r;
            acc = add_mod(acc, r, t);
        }
        out[last.0][last.1] = sub_mod(x % t, acc, t);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_round_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = 101;
        let s = inverse_ras_cleartext(&[10, 20], 1, 4, t, &mut rng).unwrap();
        assert_eq!((s[0] + s[2]) % t, 10);
        assert_eq!((s[1] + s[3]) % t, 20);
        assert_eq!(inverse_ras_cleartext(&[10, 20], 0, 4, t, &mut rng).unwrap(), vec![10, 20, 0, 0]);
        assert!(matches!(inverse_ras_cleartext(&[1, 2, 3], 1, 4, t, &mut rng), Err(Error::CapacityExceeded { .. })));
    }

    #[test]
    fn section_fold_worked_case() {
        // slots [A0M0+A1M1, B1M1+B2M2, A2M2+A3M3, B3M3+B0M0, ...] fold to rows A, B
        let plan = ReductionPlan::section_fold(4, 2, 4, 8);
        assert_eq!(plan.outputs[0], vec![(0, 0), (0, 2)]);
        assert_eq!(plan.outputs[1], vec![(0, 1), (0, 3)]);
        assert_eq!(plan.outputs[2], vec![(0, 4), (0, 6)]);
        let v = vec![vec![1, 2, 3, 4, 5, 6, 7, 8]];
        assert_eq!(finalize_lazy_ras(&v, &plan).unwrap(), vec![4, 6, 12, 14]);
        assert!(finalize_lazy_ras(&[vec![1; 8], vec![1; 8]], &plan).is_err());
    }
}
