//! Simulated point-to-point channels with modeled transfer time and an
//! auditable transcript. Message sizes come from the cost model, never from
//! in-memory representations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use hesimd_core::matmult::{ComplexityPrediction, CtKind};
use hesimd_core::simd::{CommStats, CostModel, Ct, LinkStats, LweCt, Meter, OpCounter, Party, SimdBackend};
use serde::{Deserialize, Serialize};

use crate::error::{ProtocolError, Result};

/// Bytes per cleartext residue on the wire.
pub const CLEARTEXT_ELEMENT_BYTES: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    /// Bytes per second.
    pub bandwidth: f64,
    /// One-way latency in seconds.
    pub latency: f64,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        Self { bandwidth: 50e6, latency: 0.02 }
    }
}

impl ChannelSpec {
    pub fn new(bandwidth: f64, latency: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && latency > 0.0 && bandwidth.is_finite() && latency.is_finite()) {
            return Err(ProtocolError::ConfigInvalid(format!(
                "bandwidth and latency must be positive, got {bandwidth} B/s and {latency} s"
            )));
        }
        Ok(Self { bandwidth, latency })
    }

    pub fn transfer_time(&self, bytes: u64) -> f64 {
        self.latency + bytes as f64 / self.bandwidth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    RlweCt,
    LweCtBatch,
    Cleartext,
    Control,
}

#[derive(Debug, Clone)]
pub enum Payload<B: SimdBackend> {
    Rlwe(Vec<Ct<B>>),
    Lwe(Vec<LweCt<B>>),
    /// Residues mod t (masked values, shares, openings).
    Values(Vec<u64>),
    Control(String),
}

impl<B: SimdBackend> Payload<B> {
    pub fn kind(&self) -> MessageKind {
        match self {
            Payload::Rlwe(_) => MessageKind::RlweCt,
            Payload::Lwe(_) => MessageKind::LweCtBatch,
            Payload::Values(_) => MessageKind::Cleartext,
            Payload::Control(_) => MessageKind::Control,
        }
    }

    pub fn items(&self) -> u64 {
        match self {
            Payload::Rlwe(v) => v.len() as u64,
            Payload::Lwe(v) => v.len() as u64,
            Payload::Values(v) => v.len() as u64,
            Payload::Control(_) => 0,
        }
    }

    fn bytes(&self, cost: &CostModel) -> u64 {
        match self {
            Payload::Rlwe(v) => v.len() as u64 * cost.rlwe_ct_bytes(),
            Payload::Lwe(v) => v.len() as u64 * cost.lwe_ct_bytes(),
            Payload::Values(v) => v.len() as u64 * CLEARTEXT_ELEMENT_BYTES,
            Payload::Control(_) => 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Message<B: SimdBackend> {
    pub seq: u64,
    pub sender: Party,
    pub receiver: Party,
    pub kind: MessageKind,
    pub payload_bytes: u64,
    pub logical_time_sent: f64,
    pub payload: Payload<B>,
}

/// One line of the exported transcript. Field order is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub seq: u64,
    pub sender: Party,
    pub receiver: Party,
    pub kind: MessageKind,
    pub items: u64,
    pub bytes: u64,
    pub sent_at: f64,
    pub transfer_time: f64,
    /// Sender's operation total when the message left.
    pub ops: OpCounter,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Receipt {
    pub seq: u64,
    pub bytes: u64,
    pub delivered_at: f64,
}

/// Reliable FIFO channels between parties.
pub struct Network<B: SimdBackend> {
    spec: ChannelSpec,
    cost: CostModel,
    queues: BTreeMap<(Party, Party), VecDeque<Message<B>>>,
    closed: BTreeSet<(Party, Party)>,
    clocks: BTreeMap<Party, f64>,
    meters: BTreeMap<Party, Meter>,
    transcript: Vec<TranscriptRecord>,
}

impl<B: SimdBackend> Network<B> {
    pub fn new(spec: ChannelSpec, cost: CostModel) -> Self {
        Self {
            spec,
            cost,
            queues: BTreeMap::new(),
            closed: BTreeSet::new(),
            clocks: BTreeMap::new(),
            meters: BTreeMap::new(),
            transcript: Vec::new(),
        }
    }

    pub fn spec(&self) -> ChannelSpec {
        self.spec
    }

    pub fn cost(&self) -> &CostModel {
        &self.cost
    }

    /// Messages sent by `party` are also recorded on `meter`, and its
    /// operation total is snapshotted into the transcript.
    pub fn attach_meter(&mut self, party: Party, meter: Meter) {
        self.meters.insert(party, meter);
    }

    pub fn clock(&self, party: Party) -> f64 {
        self.clocks.get(&party).copied().unwrap_or(0.0)
    }

    pub fn close(&mut self, from: Party, to: Party) {
        self.closed.insert((from, to));
    }

    pub fn send(&mut self, from: Party, to: Party, payload: Payload<B>) -> Result<Receipt> {
        self.send_labeled(from, to, payload, "")
    }

    pub fn send_labeled(&mut self, from: Party, to: Party, payload: Payload<B>, label: &str) -> Result<Receipt> {
        if self.closed.contains(&(from, to)) {
            return Err(ProtocolError::ChannelClosed { from, to });
        }
        let bytes = payload.bytes(&self.cost);
        let transfer = self.spec.transfer_time(bytes);
        let sent_at = self.clock(from);
        let seq = self.transcript.len() as u64;
        let kind = payload.kind();
        let items = payload.items();
        let ops = self.meters.get(&from).map(Meter::total).unwrap_or_default();
        if let Some(m) = self.meters.get(&from) {
            m.record_comm(from, to, LinkStats { bytes, messages: 1, items, modeled_time: transfer });
        }
        self.transcript.push(TranscriptRecord {
            seq,
            sender: from,
            receiver: to,
            kind,
            items,
            bytes,
            sent_at,
            transfer_time: transfer,
            ops,
            label: label.to_string(),
        });
        self.queues.entry((from, to)).or_default().push_back(Message {
            seq,
            sender: from,
            receiver: to,
            kind,
            payload_bytes: bytes,
            logical_time_sent: sent_at,
            payload,
        });
        Ok(Receipt { seq, bytes, delivered_at: sent_at + transfer })
    }

    /// Next message on `from -> to`; the receiver's clock advances to its delivery time.
    pub fn recv(&mut self, to: Party, from: Party) -> Result<Message<B>> {
        let msg = self
            .queues
            .get_mut(&(from, to))
            .and_then(VecDeque::pop_front)
            .ok_or(if self.closed.contains(&(from, to)) {
                ProtocolError::ChannelClosed { from, to }
            } else {
                ProtocolError::NoMessage { from, to }
            })?;
        let delivered = msg.logical_time_sent + self.spec.transfer_time(msg.payload_bytes);
        let c = self.clocks.entry(to).or_insert(0.0);
        *c = c.max(delivered);
        Ok(msg)
    }

    pub fn recv_rlwe(&mut self, to: Party, from: Party) -> Result<Vec<Ct<B>>> {
        match self.recv(to, from)?.payload {
            Payload::Rlwe(v) => Ok(v),
            _ => Err(ProtocolError::UnexpectedMessage { from, to, wanted: "RLWE ciphertexts" }),
        }
    }

    pub fn recv_lwe(&mut self, to: Party, from: Party) -> Result<Vec<LweCt<B>>> {
        match self.recv(to, from)?.payload {
            Payload::Lwe(v) => Ok(v),
            _ => Err(ProtocolError::UnexpectedMessage { from, to, wanted: "LWE ciphertexts" }),
        }
    }

    pub fn recv_values(&mut self, to: Party, from: Party) -> Result<Vec<u64>> {
        match self.recv(to, from)?.payload {
            Payload::Values(v) => Ok(v),
            _ => Err(ProtocolError::UnexpectedMessage { from, to, wanted: "cleartext values" }),
        }
    }

    /// Messages sent but not yet received.
    pub fn pending(&self) -> usize {
        self.queues.values().map(VecDeque::len).sum()
    }

    pub fn transcript(&self) -> &[TranscriptRecord] {
        &self.transcript
    }

    pub fn comm_stats(&self) -> CommStats {
        comm_stats(&self.transcript)
    }

    /// One JSON object per line.
    pub fn export_jsonl(&self) -> Result<String> {
        export_jsonl(&self.transcript)
    }

    /// Compares ciphertext counts per direction between `a` and `b`.
    pub fn audit(&self, expectation: &ComplexityPrediction, a: Party, b: Party) -> Result<AuditReport> {
        match self.pending() {
            0 => Ok(audit(&self.transcript, expectation, a, b)),
            n => Err(ProtocolError::IncompleteTranscript(n)),
        }
    }
}

pub fn comm_stats(records: &[TranscriptRecord]) -> CommStats {
    let mut s = CommStats::default();
    for r in records {
        s.record(r.sender, r.receiver, LinkStats { bytes: r.bytes, messages: 1, items: r.items, modeled_time: r.transfer_time });
    }
    s
}

pub fn export_jsonl(records: &[TranscriptRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

/// Ciphertext counts seen in one direction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionCounts {
    pub rlwe: u64,
    pub lwe: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub passed: bool,
    pub b_to_a: DirectionCounts,
    pub a_to_b: DirectionCounts,
    pub mismatches: Vec<String>,
}

fn direction(records: &[TranscriptRecord], from: Party, to: Party) -> DirectionCounts {
    let mut c = DirectionCounts::default();
    for r in records.iter().filter(|r| r.sender == from && r.receiver == to) {
        match r.kind {
            MessageKind::RlweCt => c.rlwe += r.items,
            MessageKind::LweCtBatch => c.lwe += r.items,
            _ => {}
        }
    }
    c
}

/// Itemized comparison of ciphertext counts against a prediction.
pub fn audit(records: &[TranscriptRecord], expectation: &ComplexityPrediction, a: Party, b: Party) -> AuditReport {
    let b_to_a = direction(records, b, a);
    let a_to_b = direction(records, a, b);
    let mut mismatches = Vec::new();
    for (name, seen, want) in [("B->A", b_to_a, expectation.b_to_a), ("A->B", a_to_b, expectation.a_to_b)] {
        let want = match want.kind {
            CtKind::Rlwe => DirectionCounts { rlwe: want.count, lwe: 0 },
            CtKind::Lwe => DirectionCounts { rlwe: 0, lwe: want.count },
        };
        if seen != want {
            mismatches.push(format!(
                "{name}: expected {} RLWE + {} LWE, saw {} RLWE + {} LWE",
                want.rlwe, want.lwe, seen.rlwe, seen.lwe
            ));
        }
    }
    AuditReport { passed: mismatches.is_empty(), b_to_a, a_to_b, mismatches }
}
