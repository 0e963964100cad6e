//! Simulation record and its line-oriented text export.

use std::fmt::{self, Write as _};

use num_rational::Ratio;

use crate::channel::{ChannelParams, GfVec};

use super::allocation::BitAllocation;
use super::label::{Label, Var, VarSpace};
use super::nofb::MidDesign;
use super::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeId {
    S1,
    S2,
    R1,
    R2,
    D1,
    D2,
}

impl NodeId {
    pub fn source(side: usize) -> NodeId {
        [NodeId::S1, NodeId::S2][side]
    }

    pub fn relay(side: usize) -> NodeId {
        [NodeId::R1, NodeId::R2][side]
    }

    pub fn destination(side: usize) -> NodeId {
        [NodeId::D1, NodeId::D2][side]
    }

    pub fn side(&self) -> usize {
        match self {
            NodeId::S1 | NodeId::R1 | NodeId::D1 => 0,
            _ => 1,
        }
    }

    pub fn is_relay(&self) -> bool {
        matches!(self, NodeId::R1 | NodeId::R2)
    }

    pub fn is_source(&self) -> bool {
        matches!(self, NodeId::S1 | NodeId::S2)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// How a relay level was used in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelUse {
    Idle,
    /// Payload bit for the destination.
    Forward,
    /// Feedback content for a source only.
    Feedback,
    /// One bit serving the destination and the overhearing source at once.
    ForwardFeedback,
}

/// Which packet phase a hop use belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseTag {
    /// 1-based packet number.
    pub packet: u32,
    /// 1..=4
    pub phase: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotRecord {
    pub slot: u32,
    pub hop1_phase: Option<PhaseTag>,
    pub hop2_phase: Option<PhaseTag>,
    pub x_s: [GfVec; 2],
    pub x_s_labels: [Vec<Label>; 2],
    pub y_r: [GfVec; 2],
    pub x_r: [GfVec; 2],
    pub x_r_labels: [Vec<Label>; 2],
    pub relay_use: [Vec<LevelUse>; 2],
    pub y_d: [GfVec; 2],
    pub y_s: [GfVec; 2],
}

/// A node resolving a single payload bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeEvent {
    pub slot: u32,
    pub node: NodeId,
    pub var: Var,
    pub value: bool,
}

/// A node receiving an observation inconsistent with earlier ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict {
    pub slot: u32,
    pub node: NodeId,
    pub level: usize,
}

/// Scheme-specific layout recorded in the trace header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Layout {
    FourPhase(BitAllocation),
    NoFeedback(MidDesign),
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layout::FourPhase(a) => write!(f, "{a}"),
            Layout::NoFeedback(d) => write!(f, "{d}"),
        }
    }
}

/// Throughput accounting of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Throughput {
    pub slots: u32,
    /// Own-source bits each destination decoded correctly.
    pub delivered: [u64; 2],
    /// Correct deliveries (both destinations) per slot, index 0 = slot 1.
    pub per_slot: Vec<u32>,
    /// Inclusive slot range used for the steady-state rate.
    pub window: (u32, u32),
    pub raw_rate: Ratio<u64>,
    pub steady_rate: Ratio<u64>,
}

/// Per-packet completion: slot at which all of a source's bits of the packet
/// were decoded at its relay and at its destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PacketVerdict {
    pub packet: u32,
    pub relay_done: [Option<u32>; 2],
    pub destination_done: [Option<u32>; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationTrace {
    pub scheme: Scheme,
    pub params: ChannelParams,
    pub seed: u64,
    pub packets: u32,
    pub layout: Layout,
    pub vars: VarSpace,
    /// Payload value of every variable, indexed by id.
    pub payload: Vec<bool>,
    pub slots: Vec<SlotRecord>,
    pub decodes: Vec<DecodeEvent>,
    pub conflicts: Vec<Conflict>,
    pub packet_verdicts: Vec<PacketVerdict>,
    pub throughput: Throughput,
}

impl SimulationTrace {
    pub fn measured_sum_rate(&self) -> Ratio<u64> {
        self.throughput.raw_rate
    }

    pub fn steady_state_rate(&self) -> Ratio<u64> {
        self.throughput.steady_rate
    }

    /// Bits decoded by `node` in ascending slot order.
    pub fn decodes_at(&self, node: NodeId) -> impl Iterator<Item = &DecodeEvent> {
        self.decodes.iter().filter(move |e| e.node == node)
    }

    /// Line-oriented text form: `#` header lines, then one line per slot with
    /// every signal as a '0'/'1' string, top level first ('-' for empty).
    pub fn export(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        let _ = writeln!(out, "# scheme {}", self.scheme);
        let _ = writeln!(out, "# params {p}");
        let _ = writeln!(out, "# seed {}", self.seed);
        let _ = writeln!(out, "# packets {}", self.packets);
        let _ = writeln!(out, "# layout {}", self.layout);
        let _ = writeln!(out, "# columns slot x_s1 x_s2 y_r1 y_r2 x_r1 x_r2 y_d1 y_d2 y_s1 y_s2");
        for r in &self.slots {
            let _ = write!(out, "{}", r.slot);
            for v in [
                &r.x_s[0], &r.x_s[1], &r.y_r[0], &r.y_r[1], &r.x_r[0], &r.x_r[1], &r.y_d[0], &r.y_d[1], &r.y_s[0],
                &r.y_s[1],
            ] {
                if v.is_empty() {
                    out.push_str(" -");
                } else {
                    let _ = write!(out, " {v}");
                }
            }
            out.push('\n');
        }
        let t = &self.throughput;
        let _ = writeln!(
            out,
            "# delivered d1={} d2={} slots={} raw_rate={} steady_rate={} window={}..{}",
            t.delivered[0], t.delivered[1], t.slots, t.raw_rate, t.steady_rate, t.window.0, t.window.1
        );
        out
    }
}
