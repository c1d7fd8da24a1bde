//! Butterfly topology, unit-capacity typed edges, classical coding nodes and
//! transcript auditing.
//!
//! A round is one full protocol execution. Quantum edges carry one qubit per
//! round and classical edges carry two bits per round, never both. Qubits
//! travel as photon references into the protocol register, so the network
//! layer never holds amplitudes it could duplicate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const S1: &str = "S1";
pub const S2: &str = "S2";
pub const C1: &str = "C1";
pub const C2: &str = "C2";
pub const R1: &str = "R1";
pub const R2: &str = "R2";

/// Maximum number of classical bits per message.
pub const MAX_BITS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("capacity of {edge} exceeded in round {round}")]
    CapacityExceeded { edge: EdgeRef, round: u32 },
    #[error("{payload} payload cannot travel on {edge}")]
    KindMismatch { edge: EdgeRef, payload: &'static str },
    #[error("a qubit cannot be copied")]
    NoCloning,
    #[error("no edge {0} in the topology")]
    UnknownEdge(EdgeRef),
    #[error("bit strings of lengths {0} and {1} cannot be combined")]
    LengthMismatch(usize, usize),
    #[error("classical payloads are limited to {MAX_BITS} bits, got {0}")]
    TooManyBits(usize),
    #[error("edge endpoint {0} is not a node")]
    UnknownNode(NodeId),
    #[error("cannot parse {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A directed edge named by its endpoints, written `FROM->TO`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeRef {
    pub from: NodeId,
    pub to: NodeId,
}

impl EdgeRef {
    pub fn new(from: &str, to: &str) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
        }
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

impl FromStr for EdgeRef {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (from, to) = s
            .split_once("->")
            .ok_or_else(|| NetworkError::Parse(s.to_owned()))?;
        Ok(Self::new(from.trim(), to.trim()))
    }
}

impl Serialize for EdgeRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EdgeRef {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// One qubit per round.
    QuantumUnit,
    /// Two classical bits per round.
    ClassicalUnit,
}

impl EdgeKind {
    pub fn qubit_capacity(self) -> usize {
        match self {
            EdgeKind::QuantumUnit => 1,
            EdgeKind::ClassicalUnit => 0,
        }
    }

    pub fn bit_capacity(self) -> usize {
        match self {
            EdgeKind::QuantumUnit => 0,
            EdgeKind::ClassicalUnit => MAX_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: NodeId,
    pub to: NodeId,
    pub kind: EdgeKind,
}

impl EdgeSpec {
    pub fn new(from: &str, to: &str, kind: EdgeKind) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            kind,
        }
    }

    pub fn edge_ref(&self) -> EdgeRef {
        EdgeRef {
            from: self.from.clone(),
            to: self.to.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    nodes: BTreeSet<NodeId>,
    edges: Vec<EdgeSpec>,
}

impl Topology {
    pub fn new(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: Vec<EdgeSpec>,
    ) -> Result<Self, NetworkError> {
        let nodes: BTreeSet<NodeId> = nodes.into_iter().collect();
        for e in &edges {
            for end in [&e.from, &e.to] {
                if !nodes.contains(end) {
                    return Err(NetworkError::UnknownNode(end.clone()));
                }
            }
        }
        Ok(Self { nodes, edges })
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeSpec] {
        &self.edges
    }

    pub fn edge(&self, edge: &EdgeRef) -> Option<&EdgeSpec> {
        self.edges
            .iter()
            .find(|e| e.from == edge.from && e.to == edge.to)
    }

    pub fn in_degree(&self, node: &str) -> usize {
        self.edges.iter().filter(|e| e.to.0 == node).count()
    }

    pub fn out_degree(&self, node: &str) -> usize {
        self.edges.iter().filter(|e| e.from.0 == node).count()
    }
}

fn butterfly_with(direct: EdgeKind) -> Topology {
    use EdgeKind::ClassicalUnit as C;
    let edges = vec![
        EdgeSpec::new(S1, R2, direct),
        EdgeSpec::new(S2, R1, direct),
        EdgeSpec::new(S1, C1, C),
        EdgeSpec::new(S2, C1, C),
        EdgeSpec::new(C1, C2, C),
        EdgeSpec::new(C2, R1, C),
        EdgeSpec::new(C2, R2, C),
    ];
    Topology::new([S1, S2, C1, C2, R1, R2].map(NodeId::from), edges)
        .expect("butterfly endpoints are nodes")
}

/// The butterfly used by the coding protocol: quantum edges `S1->R2` and
/// `S2->R1`, every other edge classical.
pub fn build_butterfly() -> Topology {
    butterfly_with(EdgeKind::QuantumUnit)
}

/// The same graph with every edge classical, as in the bit-level scheme.
pub fn build_classical_butterfly() -> Topology {
    butterfly_with(EdgeKind::ClassicalUnit)
}

/// Up to two classical bits, written most-significant first (`"10"`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Result<Self, NetworkError> {
        if bits.len() > MAX_BITS {
            return Err(NetworkError::TooManyBits(bits.len()));
        }
        Ok(Self(bits))
    }

    pub fn pair(a: bool, b: bool) -> Self {
        Self(vec![a, b])
    }

    pub fn single(b: bool) -> Self {
        Self(vec![b])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(NetworkError::Parse(s.to_owned())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Bits::new(bits)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "payload", rename_all = "snake_case")]
pub enum Payload {
    /// Reference to a photon of the protocol register.
    Qubit { photon: u8 },
    Classical { bits: Bits },
}

impl Payload {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Payload::Qubit { .. } => "qubit",
            Payload::Classical { .. } => "classical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub edge: EdgeRef,
    pub payload: Payload,
    pub round: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub qubits: usize,
    pub bits: usize,
}

/// Per-edge, per-round usage.
#[derive(Debug, Clone)]
pub struct UsageLedger {
    topology: Topology,
    tallies: BTreeMap<(u32, EdgeRef), Tally>,
}

impl UsageLedger {
    pub fn new(topology: Topology) -> Self {
        Self {
            topology,
            tallies: BTreeMap::new(),
        }
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Records `msg`, rejecting it (and leaving the ledger untouched) when the
    /// payload kind does not match the edge or the round's capacity would be
    /// exceeded.
    pub fn send(&mut self, msg: &Message) -> Result<(), NetworkError> {
        let spec = self
            .topology
            .edge(&msg.edge)
            .ok_or_else(|| NetworkError::UnknownEdge(msg.edge.clone()))?;
        let (qubits, bits) = match &msg.payload {
            Payload::Qubit { .. } => (1, 0),
            Payload::Classical { bits } => (0, bits.len()),
        };
        let fits_kind = match spec.kind {
            EdgeKind::QuantumUnit => qubits > 0,
            EdgeKind::ClassicalUnit => qubits == 0,
        };
        if !fits_kind {
            return Err(NetworkError::KindMismatch {
                edge: msg.edge.clone(),
                payload: msg.payload.kind_name(),
            });
        }
        let kind = spec.kind;
        let tally = self
            .tallies
            .entry((msg.round, msg.edge.clone()))
            .or_default();
        if tally.qubits + qubits > kind.qubit_capacity() || tally.bits + bits > kind.bit_capacity()
        {
            return Err(NetworkError::CapacityExceeded {
                edge: msg.edge.clone(),
                round: msg.round,
            });
        }
        tally.qubits += qubits;
        tally.bits += bits;
        Ok(())
    }

    pub fn tally(&self, round: u32, edge: &EdgeRef) -> Tally {
        self.tallies
            .get(&(round, edge.clone()))
            .copied()
            .unwrap_or_default()
    }

    /// Every recorded (round, edge) tally.
    pub fn entries(&self) -> impl Iterator<Item = (&(u32, EdgeRef), &Tally)> {
        self.tallies.iter()
    }

    /// True when every tally fits its edge capacity.
    pub fn within_capacity(&self) -> bool {
        self.tallies.iter().all(|((_, edge), t)| {
            self.topology.edge(edge).is_some_and(|spec| {
                t.qubits <= spec.kind.qubit_capacity() && t.bits <= spec.kind.bit_capacity()
            })
        })
    }
}

/// Bitwise XOR of two equal-length bit strings.
pub fn xor_node(a: &Bits, b: &Bits) -> Result<Bits, NetworkError> {
    if a.len() != b.len() {
        return Err(NetworkError::LengthMismatch(a.len(), b.len()));
    }
    Bits::new(a.0.iter().zip(&b.0).map(|(x, y)| x ^ y).collect())
}

/// Duplicates a classical payload. Qubits cannot be copied.
pub fn copy_node(payload: &Payload) -> Result<(Payload, Payload), NetworkError> {
    match payload {
        Payload::Classical { .. } => Ok((payload.clone(), payload.clone())),
        Payload::Qubit { .. } => Err(NetworkError::NoCloning),
    }
}

/// One step of a protocol transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkEvent {
    pub round: u32,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventKind {
    Send {
        edge: EdgeRef,
        #[serde(flatten)]
        payload: Payload,
        /// Logical stream carried by a qubit, e.g. `"1"` for the state
        /// injected at S1.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stream: Option<String>,
    },
    Xor {
        node: NodeId,
        inputs: (Bits, Bits),
        output: Bits,
    },
    Copy {
        node: NodeId,
        #[serde(flatten)]
        payload: Payload,
    },
    /// Local processing at a node (measurement, correction, preparation).
    Local { node: NodeId, action: String },
}

impl NetworkEvent {
    pub fn send(round: u32, edge: EdgeRef, payload: Payload) -> Self {
        Self {
            round,
            kind: EventKind::Send {
                edge,
                payload,
                stream: None,
            },
        }
    }

    pub fn local(round: u32, node: &str, action: impl Into<String>) -> Self {
        Self {
            round,
            kind: EventKind::Local {
                node: node.into(),
                action: action.into(),
            },
        }
    }
}

/// Serializes a transcript as one JSON object per line.
pub fn to_jsonl(events: &[NetworkEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("events serialize"));
        out.push('\n');
    }
    out
}

pub fn from_jsonl(text: &str) -> Result<Vec<NetworkEvent>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    CapacityExceeded,
    KindMismatch,
    NoCloning,
    UnknownEdge,
    MalformedXor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Position of the offending event in the transcript.
    pub index: usize,
    pub round: u32,
    pub kind: ViolationKind,
    pub detail: String,
}

/// Replays `events` against `topology` and collects every capacity, kind and
/// cloning violation. An empty result means the transcript is admissible.
pub fn audit(events: &[NetworkEvent], topology: &Topology) -> Vec<Violation> {
    let mut ledger = UsageLedger::new(topology.clone());
    let mut violations = Vec::new();
    for (index, event) in events.iter().enumerate() {
        let mut flag = |kind, detail: String| {
            violations.push(Violation {
                index,
                round: event.round,
                kind,
                detail,
            })
        };
        match &event.kind {
            EventKind::Send { edge, payload, .. } => {
                let msg = Message {
                    edge: edge.clone(),
                    payload: payload.clone(),
                    round: event.round,
                };
                if let Err(err) = ledger.send(&msg) {
                    let kind = match err {
                        NetworkError::CapacityExceeded { .. } => ViolationKind::CapacityExceeded,
                        NetworkError::KindMismatch { .. } => ViolationKind::KindMismatch,
                        _ => ViolationKind::UnknownEdge,
                    };
                    flag(kind, err.to_string());
                }
            }
            EventKind::Copy { node, payload } => {
                if let Err(err) = copy_node(payload) {
                    flag(ViolationKind::NoCloning, format!("{err} at {node}"));
                }
            }
            EventKind::Xor {
                node,
                inputs,
                output,
            } => match xor_node(&inputs.0, &inputs.1) {
                Ok(expected) if &expected == output => {}
                Ok(expected) => flag(
                    ViolationKind::MalformedXor,
                    format!("{node} emitted {output}, expected {expected}"),
                ),
                Err(err) => flag(ViolationKind::MalformedXor, format!("{err} at {node}")),
            },
            EventKind::Local { .. } => {}
        }
    }
    violations
}

/// Result of the bit-level butterfly.
#[derive(Debug, Clone)]
pub struct ClassicalOutcome {
    /// Bit decoded at R1 (the stream injected at S1).
    pub at_r1: bool,
    /// Bit decoded at R2 (the stream injected at S2).
    pub at_r2: bool,
    pub ledger: UsageLedger,
    pub transcript: Vec<NetworkEvent>,
}

/// Classical network coding on the all-classical butterfly. Direct edges
/// carry `b1` to R2 and `b2` to R1; C1 emits `b1 ^ b2`; C2 copies it; each
/// receiver XORs the coded bit with its directly received bit.
pub fn classical_butterfly(b1: bool, b2: bool) -> Result<ClassicalOutcome, NetworkError> {
    let round = 0;
    let mut ledger = UsageLedger::new(build_classical_butterfly());
    let mut events = Vec::new();
    let send = |ledger: &mut UsageLedger,
                    events: &mut Vec<NetworkEvent>,
                    from: &str,
                    to: &str,
                    bits: &Bits| {
        let edge = EdgeRef::new(from, to);
        let payload = Payload::Classical { bits: bits.clone() };
        ledger.send(&Message {
            edge: edge.clone(),
            payload: payload.clone(),
            round,
        })?;
        events.push(NetworkEvent::send(round, edge, payload));
        Ok::<_, NetworkError>(())
    };

    let p1 = Bits::single(b1);
    let p2 = Bits::single(b2);
    send(&mut ledger, &mut events, S1, R2, &p1)?;
    send(&mut ledger, &mut events, S2, R1, &p2)?;
    send(&mut ledger, &mut events, S1, C1, &p1)?;
    send(&mut ledger, &mut events, S2, C1, &p2)?;

    let coded = xor_node(&p1, &p2)?;
    events.push(NetworkEvent {
        round,
        kind: EventKind::Xor {
            node: C1.into(),
            inputs: (p1.clone(), p2.clone()),
            output: coded.clone(),
        },
    });
    send(&mut ledger, &mut events, C1, C2, &coded)?;

    let coded_payload = Payload::Classical { bits: coded };
    let copies = copy_node(&coded_payload)?;
    events.push(NetworkEvent {
        round,
        kind: EventKind::Copy {
            node: C2.into(),
            payload: coded_payload,
        },
    });
    let (Payload::Classical { bits: to_r1 }, Payload::Classical { bits: to_r2 }) = copies else {
        unreachable!("copies of a classical payload are classical");
    };
    send(&mut ledger, &mut events, C2, R1, &to_r1)?;
    send(&mut ledger, &mut events, C2, R2, &to_r2)?;

    let at_r1 = xor_node(&p2, &to_r1)?;
    let at_r2 = xor_node(&p1, &to_r2)?;
    events.push(NetworkEvent::local(round, R1, format!("decode {at_r1}")));
    events.push(NetworkEvent::local(round, R2, format!("decode {at_r2}")));

    Ok(ClassicalOutcome {
        at_r1: at_r1.0[0],
        at_r2: at_r2.0[0],
        ledger,
        transcript: events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn butterfly_shape() {
        let t = build_butterfly();
        assert_eq!(t.nodes().len(), 6);
        assert_eq!(t.edges().len(), 7);
        let quantum: Vec<_> = t
            .edges()
            .iter()
            .filter(|e| e.kind == EdgeKind::QuantumUnit)
            .map(|e| e.edge_ref())
            .collect();
        assert_eq!(quantum, vec![EdgeRef::new(S1, R2), EdgeRef::new(S2, R1)]);
        assert_eq!(t.in_degree(C1), 2);
        assert_eq!(t.out_degree(C2), 2);
    }

    #[test]
    fn topology_rejects_dangling_edges() {
        let err = Topology::new(
            [NodeId::from("A")],
            vec![EdgeSpec::new("A", "B", EdgeKind::ClassicalUnit)],
        );
        assert_eq!(err, Err(NetworkError::UnknownNode("B".into())));
    }

    #[test]
    fn classical_edge_takes_two_single_bits() {
        let mut ledger = UsageLedger::new(build_butterfly());
        let msg = Message {
            edge: EdgeRef::new(C1, C2),
            payload: Payload::Classical { bits: bits("1") },
            round: 0,
        };
        ledger.send(&msg).unwrap();
        ledger.send(&msg).unwrap();
        assert_eq!(ledger.tally(0, &msg.edge).bits, 2);
        assert!(matches!(
            ledger.send(&msg),
            Err(NetworkError::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn second_qubit_exceeds_capacity() {
        let mut ledger = UsageLedger::new(build_butterfly());
        let msg = Message {
            edge: EdgeRef::new(S1, R2),
            payload: Payload::Qubit { photon: 3 },
            round: 4,
        };
        ledger.send(&msg).unwrap();
        assert_eq!(
            ledger.send(&msg),
            Err(NetworkError::CapacityExceeded {
                edge: EdgeRef::new(S1, R2),
                round: 4
            })
        );
        // A new round starts with fresh capacity.
        ledger.send(&Message { round: 5, ..msg }).unwrap();
    }

    #[test]
    fn qubit_on_classical_edge_is_kind_mismatch() {
        let mut ledger = UsageLedger::new(build_butterfly());
        let msg = Message {
            edge: EdgeRef::new(C1, C2),
            payload: Payload::Qubit { photon: 1 },
            round: 0,
        };
        assert!(matches!(
            ledger.send(&msg),
            Err(NetworkError::KindMismatch { .. })
        ));
        let bits_on_quantum = Message {
            edge: EdgeRef::new(S2, R1),
            payload: Payload::Classical { bits: bits("01") },
            round: 0,
        };
        assert!(matches!(
            ledger.send(&bits_on_quantum),
            Err(NetworkError::KindMismatch { .. })
        ));
        let unknown = Message {
            edge: EdgeRef::new(R1, S1),
            payload: Payload::Classical { bits: bits("0") },
            round: 0,
        };
        assert!(matches!(ledger.send(&unknown), Err(NetworkError::UnknownEdge(_))));
        assert!(ledger.within_capacity());
    }

    #[test]
    fn xor_examples() {
        assert_eq!(xor_node(&bits("01"), &bits("11")).unwrap(), bits("10"));
        assert_eq!(xor_node(&bits("00"), &bits("00")).unwrap(), bits("00"));
        assert_eq!(
            xor_node(&bits("0"), &bits("11")),
            Err(NetworkError::LengthMismatch(1, 2))
        );
        assert_eq!("101".parse::<Bits>(), Err(NetworkError::TooManyBits(3)));
    }

    #[test]
    fn copy_examples() {
        for s in ["10", "00"] {
            let p = Payload::Classical { bits: bits(s) };
            assert_eq!(copy_node(&p).unwrap(), (p.clone(), p));
        }
        assert_eq!(
            copy_node(&Payload::Qubit { photon: 2 }),
            Err(NetworkError::NoCloning)
        );
    }

    #[test]
    fn classical_butterfly_decodes_all_inputs() {
        for b1 in [false, true] {
            for b2 in [false, true] {
                let out = classical_butterfly(b1, b2).unwrap();
                assert_eq!((out.at_r1, out.at_r2), (b1, b2));
                assert!(out.ledger.within_capacity());
                for (_, tally) in out.ledger.entries() {
                    assert_eq!(tally.bits, 1);
                }
                assert!(audit(&out.transcript, &build_classical_butterfly()).is_empty());
            }
        }
    }

    #[test]
    fn audit_flags_injected_faults() {
        let base = classical_butterfly(true, false).unwrap().transcript;
        let topo = build_classical_butterfly();

        let mut dup = base.clone();
        dup.push(NetworkEvent::send(
            0,
            EdgeRef::new(C1, C2),
            Payload::Classical { bits: bits("11") },
        ));
        let v = audit(&dup, &topo);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::CapacityExceeded);

        let mut clone = base.clone();
        clone.push(NetworkEvent {
            round: 0,
            kind: EventKind::Copy {
                node: C2.into(),
                payload: Payload::Qubit { photon: 2 },
            },
        });
        let v = audit(&clone, &topo);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::NoCloning);

        let mut bad_xor = base;
        bad_xor.push(NetworkEvent {
            round: 0,
            kind: EventKind::Xor {
                node: C1.into(),
                inputs: (bits("1"), bits("1")),
                output: bits("1"),
            },
        });
        assert_eq!(audit(&bad_xor, &topo)[0].kind, ViolationKind::MalformedXor);
    }

    #[test]
    fn jsonl_round_trip_and_shape() {
        let events = vec![
            NetworkEvent {
                round: 3,
                kind: EventKind::Send {
                    edge: EdgeRef::new(S2, R1),
                    payload: Payload::Qubit { photon: 2 },
                    stream: Some("1".into()),
                },
            },
            NetworkEvent::send(3, EdgeRef::new(S1, C1), Payload::Classical { bits: bits("01") }),
            NetworkEvent::local(3, S1, "bsm(6,1)"),
        ];
        let text = to_jsonl(&events);
        let first = text.lines().next().unwrap();
        assert_eq!(
            first,
            r#"{"round":3,"event":"send","edge":"S2->R1","payload":"qubit","photon":2,"stream":"1"}"#
        );
        assert_eq!(
            text.lines().nth(1).unwrap(),
            r#"{"round":3,"event":"send","edge":"S1->C1","payload":"classical","bits":"01"}"#
        );
        assert_eq!(from_jsonl(&text).unwrap(), events);
    }

    proptest! {
        #[test]
        fn xor_is_decodable(a in proptest::collection::vec(any::<bool>(), 0..=2), seed in any::<u8>()) {
            let b: Vec<bool> = (0..a.len()).map(|i| (seed >> i) & 1 == 1).collect();
            let a = Bits::new(a).unwrap();
            let b = Bits::new(b).unwrap();
            let coded = xor_node(&a, &b).unwrap();
            prop_assert_eq!(xor_node(&coded, &b).unwrap(), a);
            prop_assert!(xor_node(&b, &b).unwrap().as_slice().iter().all(|x| !x));
        }
    }
}
