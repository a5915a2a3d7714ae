//! Operation and communication accounting with nestable measurement scopes.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts of logical O1-O4 invocations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounter {
    pub add: u64,
    pub mult: u64,
    pub rot: u64,
    pub hst_rot: u64,
}

impl OpCounter {
    pub fn new(add: u64, mult: u64, rot: u64, hst_rot: u64) -> Self {
        Self { add, mult, rot, hst_rot }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::default()
    }

    pub fn scaled(&self, k: u64) -> Self {
        Self::new(self.add * k, self.mult * k, self.rot * k, self.hst_rot * k)
    }
}

impl Add for OpCounter {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.add + o.add, self.mult + o.mult, self.rot + o.rot, self.hst_rot + o.hst_rot)
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    A,
    B,
    Arbiter,
    Dealer,
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Party::A => "A",
            Party::B => "B",
            Party::Arbiter => "C",
            Party::Dealer => "dealer",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LinkStats {
    pub bytes: u64,
    pub messages: u64,
    /// Ciphertexts (or cleartext vectors) carried.
    pub items: u64,
    /// Sum over messages of `latency + bytes / bandwidth`.
    pub modeled_time: f64,
}

impl AddAssign for LinkStats {
    fn add_assign(&mut self, o: Self) {
        self.bytes += o.bytes;
        self.messages += o.messages;
        self.items += o.items;
        self.modeled_time += o.modeled_time;
    }
}

/// Per-direction communication totals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CommStats {
    pub links: BTreeMap<(Party, Party), LinkStats>,
}

impl CommStats {
    pub fn record(&mut self, from: Party, to: Party, stats: LinkStats) {
        *self.links.entry((from, to)).or_default() += stats;
    }

    pub fn link(&self, from: Party, to: Party) -> LinkStats {
        self.links.get(&(from, to)).copied().unwrap_or_default()
    }

    pub fn bytes(&self, from: Party, to: Party) -> u64 {
        self.link(from, to).bytes
    }

    pub fn total_bytes(&self) -> u64 {
        self.links.values().map(|l| l.bytes).sum()
    }

    pub fn total_modeled_time(&self) -> f64 {
        self.links.values().map(|l| l.modeled_time).sum()
    }

    pub fn merge(&mut self, other: &CommStats) {
        for (&(f, t), &s) in &other.links {
            self.record(f, t, s);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Add,
    Mult,
    Rot,
    HstRot,
}

/// Identifier of an open measurement scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScopeId(u64);

#[derive(Debug, Default)]
struct MeterState {
    total: OpCounter,
    total_comm: CommStats,
    frames: Vec<(u64, OpCounter, CommStats)>,
    next_id: u64,
}

/// Shared accumulator for one logical thread of execution.
///
/// Closing a scope adds its counts into the enclosing scope, so nested
/// measurements compose additively.
#[derive(Debug, Clone, Default)]
pub struct Meter {
    state: Arc<Mutex<MeterState>>,
}

impl Meter {
    pub fn new() -> Self {
        Self::default()
    }

    fn with<R>(&self, f: impl FnOnce(&mut MeterState) -> R) -> R {
        let mut guard = self.state.lock().unwrap_or_else(|e| e.into_inner());
        f(&mut guard)
    }

    pub fn record_ops(&self, kind: OpKind, count: u64) {
        self.with(|s| {
            let mut delta = OpCounter::default();
            match kind {
                OpKind::Add => delta.add = count,
                OpKind::Mult => delta.mult = count,
                OpKind::Rot => delta.rot = count,
                OpKind::HstRot => delta.hst_rot = count,
            }
            s.total += delta;
            if let Some(top) = s.frames.last_mut() {
                top.1 += delta;
            }
        })
    }

    pub fn record_comm(&self, from: Party, to: Party, stats: LinkStats) {
        self.with(|s| {
            s.total_comm.record(from, to, stats);
            if let Some(top) = s.frames.last_mut() {
                top.2.record(from, to, stats);
            }
        })
    }

    pub fn open(&self) -> ScopeId {
        self.with(|s| {
            let id = s.next_id;
            s.next_id += 1;
            s.frames.push((id, OpCounter::default(), CommStats::default()));
            ScopeId(id)
        })
    }

    /// Closes the innermost scope, which must be `id`.
    pub fn close(&self, id: ScopeId) -> Result<(OpCounter, CommStats)> {
        self.with(|s| {
            match s.frames.last() {
                Some((top, _, _)) if *top == id.0 => {}
                _ => return Err(Error::ScopeNotOpen),
            }
            let (_, ops, comm) = s.frames.pop().expect("checked above");
            if let Some(parent) = s.frames.last_mut() {
                parent.1 += ops;
                parent.2.merge(&comm);
            }
            Ok((ops, comm))
        })
    }

    /// Runs `f` inside a fresh scope.
    pub fn measure<R>(&self, f: impl FnOnce() -> R) -> (R, OpCounter, CommStats) {
        let id = self.open();
        let r = f();
        let (ops, comm) = self.close(id).expect("scope opened above");
        (r, ops, comm)
    }

    pub fn total(&self) -> OpCounter {
        self.with(|s| s.total)
    }

    pub fn total_comm(&self) -> CommStats {
        self.with(|s| s.total_comm.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_scope_is_zero() {
        let m = Meter::new();
        let (_, ops, comm) = m.measure(|| ());
        assert!(ops.is_zero());
        assert!(comm.is_empty());
    }

    #[test]
    fn nested_scopes_compose() {
        let m = Meter::new();
        let outer = m.open();
        m.record_ops(OpKind::Add, 1);
        let inner = m.open();
        m.record_ops(OpKind::Rot, 2);
        let (i, _) = m.close(inner).unwrap();
        assert_eq!(i, OpCounter::new(0, 0, 2, 0));
        let (o, _) = m.close(outer).unwrap();
        assert_eq!(o, OpCounter::new(1, 0, 2, 0));
        assert_eq!(m.total(), o);
    }

    #[test]
    fn closing_out_of_order_fails() {
        let m = Meter::new();
        let a = m.open();
        let _b = m.open();
        assert_eq!(m.close(a), Err(Error::ScopeNotOpen));
        let fresh = Meter::new();
        assert_eq!(fresh.close(a), Err(Error::ScopeNotOpen));
    }
}
