//! Slot-by-slot execution of a protocol over the channel.
//!
//! Every transmitted level carries a symbolic label next to its bit. Nodes
//! only ever see received labels and values, and may transmit a label only
//! if it is in the span of what they know, so causality and side-information
//! soundness are enforced by construction.

use std::collections::{HashMap, HashSet, VecDeque};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{first_hop, first_hop_levels, second_hop, second_hop_levels, ChannelParams, GfVec};
use crate::error::{Error, Result};

use super::label::{Label, Var, VarSpace};
use super::solver::Knowledge;
use super::trace::{
    Conflict, DecodeEvent, Layout, LevelUse, NodeId, PacketVerdict, PhaseTag, SimulationTrace, SlotRecord, Throughput,
};
use super::{Fault, Scheme};

const NODES: [NodeId; 6] = [NodeId::S1, NodeId::S2, NodeId::R1, NodeId::R2, NodeId::D1, NodeId::D2];

/// Packets at each end of a run excluded from the steady-state rate.
const WARMUP_PACKETS: u32 = 2;

/// Extra slots allowed after the last scheduled phase before giving up.
const DRAIN_LIMIT: u32 = 16;

pub(crate) struct NodeState {
    pub id: NodeId,
    pub know: Knowledge,
    /// Own-source bits decoded but not yet forwarded.
    pub fifo: VecDeque<Var>,
    queued: HashSet<Var>,
    /// Received label per (slot, 1-based level).
    pub heard: HashMap<(u32, usize), Label>,
}

impl NodeState {
    fn new(id: NodeId) -> Self {
        NodeState { id, know: Knowledge::new(), fifo: VecDeque::new(), queued: HashSet::new(), heard: HashMap::new() }
    }

    fn value(&self, label: &Label, slot: u32, level: usize) -> Result<bool> {
        self.know.eval(label).ok_or_else(|| {
            Error::Internal(format!("{} cannot evaluate its level {level} content at slot {slot}", self.id))
        })
    }
}

/// A relay's hop-2 vector under construction.
pub(crate) struct RelayOut {
    pub labels: Vec<Label>,
    pub uses: Vec<LevelUse>,
}

impl RelayOut {
    pub fn idle(qbar: usize) -> Self {
        RelayOut { labels: vec![Label::zero(); qbar], uses: vec![LevelUse::Idle; qbar] }
    }

    /// Puts `label` on 1-based `level`.
    pub fn set(&mut self, level: usize, label: Label, usage: LevelUse) -> Result<()> {
        if self.uses[level - 1] != LevelUse::Idle {
            return Err(Error::Internal(format!("relay level {level} assigned twice")));
        }
        self.labels[level - 1] = label;
        self.uses[level - 1] = usage;
        Ok(())
    }

    /// Drains the backlog into the idle levels among 1..=f, top-down.
    pub fn fill_forward(&mut self, node: &mut NodeState, f: usize) {
        for k in 0..f {
            if self.uses[k] != LevelUse::Idle {
                continue;
            }
            let Some(v) = node.fifo.pop_front() else { break };
            self.labels[k] = Label::var(v);
            self.uses[k] = LevelUse::Forward;
        }
    }
}

/// Transmission rules of one scheme.
pub(crate) trait Protocol {
    fn scheme(&self) -> Scheme;
    fn params(&self) -> &ChannelParams;
    fn vars(&self) -> VarSpace;
    fn layout(&self) -> Layout;

    /// Source vector (labels, top first) at `slot`.
    fn hop1(&self, slot: u32, side: usize, node: &NodeState) -> Result<(Vec<Label>, Option<PhaseTag>)>;

    /// Relay vector at `slot`; may pop the relay's backlog.
    fn hop2(&self, slot: u32, side: usize, node: &mut NodeState) -> Result<(RelayOut, Option<PhaseTag>)>;

    /// Bits the relay forwards by other means, so they never enter its backlog.
    fn forwarded_directly(&self, var: Var) -> bool;

    /// Last slot with any scheduled source or relay phase.
    fn last_scheduled_slot(&self) -> u32;

    /// Slots after which the steady-state schedule repeats.
    fn period(&self) -> u32;
}

fn to_vec(bits: Vec<bool>) -> GfVec {
    GfVec::from_bits(bits)
}

fn apply_fault(values: &mut [bool], fault: Option<&Fault>, slot: u32, node: NodeId) {
    if let Some(fl) = fault {
        if fl.slot == slot && fl.node == node {
            values[fl.level - 1] ^= true;
        }
    }
}

pub(crate) fn simulate(
    proto: &dyn Protocol,
    packets: u32,
    seed: u64,
    fault: Option<&Fault>,
) -> Result<SimulationTrace> {
    let p = *proto.params();
    let vars = proto.vars();
    let (q, qbar) = (p.q(), p.qbar());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let payload: Vec<bool> = (0..vars.total()).map(|_| rng.gen()).collect();

    let mut nodes: Vec<NodeState> = NODES.iter().map(|&id| NodeState::new(id)).collect();
    for pk in 0..vars.packets {
        for (side, source) in nodes.iter_mut().take(2).enumerate() {
            for i in 0..vars.per_packet {
                let v = vars.var(side, pk, i);
                source.know.learn(v, payload[v as usize]);
            }
        }
    }

    if let Some(fl) = fault {
        let len = if fl.node.is_source() { q } else { qbar };
        if !(fl.node.is_source() || fl.node.is_relay()) || fl.level == 0 || fl.level > len {
            return Err(Error::Domain(format!("fault at {} level {} is not a transmitted level", fl.node, fl.level)));
        }
        if fl.slot == 0 || fl.slot > proto.last_scheduled_slot() {
            return Err(Error::Domain(format!("fault slot {} outside the schedule", fl.slot)));
        }
    }

    let mut slots = Vec::new();
    let mut decodes = Vec::new();
    let mut conflicts = Vec::new();
    let last = proto.last_scheduled_slot();

    for t in 1.. {
        let mut x_s_labels: [Vec<Label>; 2] = Default::default();
        let mut x_s_bits: [Vec<bool>; 2] = Default::default();
        let mut hop1_phase = None;
        for side in 0..2 {
            let (labels, tag) = proto.hop1(t, side, &nodes[side])?;
            if labels.len() != q {
                return Err(Error::Internal(format!("source vector of length {} != {q}", labels.len())));
            }
            let mut bits = Vec::with_capacity(q);
            for (k, l) in labels.iter().enumerate() {
                bits.push(nodes[side].value(l, t, k + 1)?);
            }
            apply_fault(&mut bits, fault, t, NodeId::source(side));
            hop1_phase = hop1_phase.or(tag);
            x_s_labels[side] = labels;
            x_s_bits[side] = bits;
        }

        let mut x_r_labels: [Vec<Label>; 2] = Default::default();
        let mut x_r_bits: [Vec<bool>; 2] = Default::default();
        let mut relay_use: [Vec<LevelUse>; 2] = Default::default();
        let mut hop2_phase = None;
        for side in 0..2 {
            let node = &mut nodes[2 + side];
            let (out, tag) = proto.hop2(t, side, node)?;
            if out.labels.len() != qbar {
                return Err(Error::Internal(format!("relay vector of length {} != {qbar}", out.labels.len())));
            }
            let mut bits = Vec::with_capacity(qbar);
            for (k, l) in out.labels.iter().enumerate() {
                bits.push(node.value(l, t, k + 1)?);
            }
            apply_fault(&mut bits, fault, t, NodeId::relay(side));
            hop2_phase = hop2_phase.or(tag);
            x_r_labels[side] = out.labels;
            x_r_bits[side] = bits;
            relay_use[side] = out.uses;
        }

        let x_s = [to_vec(x_s_bits[0].clone()), to_vec(x_s_bits[1].clone())];
        let x_r = [to_vec(x_r_bits[0].clone()), to_vec(x_r_bits[1].clone())];
        let (y_r1, y_r2) = first_hop(&x_s[0], &x_s[1], &p)?;
        let hop2 = second_hop(&x_r[0], &x_r[1], &p)?;
        let (l_r1, l_r2) = first_hop_levels(&x_s_labels[0], &x_s_labels[1], &p);
        let l2 = second_hop_levels(&x_r_labels[0], &x_r_labels[1], &p);

        let observations: [(NodeId, &GfVec, &Vec<Label>); 6] = [
            (NodeId::R1, &y_r1, &l_r1),
            (NodeId::R2, &y_r2, &l_r2),
            (NodeId::D1, &hop2.y_d1, &l2.y_d1),
            (NodeId::D2, &hop2.y_d2, &l2.y_d2),
            (NodeId::S1, &hop2.y_s1, &l2.y_s1),
            (NodeId::S2, &hop2.y_s2, &l2.y_s2),
        ];
        let mut newly: [Vec<Var>; 2] = Default::default();
        for (id, values, labels) in observations {
            let node = &mut nodes[id as usize];
            for (k, (label, &value)) in labels.iter().zip(values.bits()).enumerate() {
                if label.is_zero() && !value {
                    continue;
                }
                let outcome = node.know.insert(label, value);
                if outcome.conflict {
                    conflicts.push(Conflict { slot: t, node: id, level: k + 1 });
                }
                for (var, value) in outcome.solved {
                    decodes.push(DecodeEvent { slot: t, node: id, var, value });
                    if id.is_relay() && vars.side_of(var) == id.side() {
                        newly[id.side()].push(var);
                    }
                }
                if !id.is_source() && !id.is_relay() {
                    continue;
                }
                node.heard.insert((t, k + 1), label.clone());
            }
        }
        for side in 0..2 {
            let relay = &mut nodes[2 + side];
            newly[side].sort_unstable();
            for v in newly[side].drain(..) {
                if !proto.forwarded_directly(v) && relay.queued.insert(v) {
                    relay.fifo.push_back(v);
                }
            }
        }

        slots.push(SlotRecord {
            slot: t,
            hop1_phase,
            hop2_phase,
            x_s,
            x_s_labels,
            y_r: [y_r1, y_r2],
            x_r,
            x_r_labels,
            relay_use,
            y_d: [hop2.y_d1, hop2.y_d2],
            y_s: [hop2.y_s1, hop2.y_s2],
        });

        let drained = nodes[2].fifo.is_empty() && nodes[3].fifo.is_empty();
        if (t >= last && drained) || t >= last + DRAIN_LIMIT {
            break;
        }
    }

    let packet_verdicts = verdicts(&vars, &decodes, packets);
    let throughput = throughput(&vars, &payload, &decodes, slots.len() as u32, last, proto.period());
    Ok(SimulationTrace {
        scheme: proto.scheme(),
        params: p,
        seed,
        packets,
        layout: proto.layout(),
        vars,
        payload,
        slots,
        decodes,
        conflicts,
        packet_verdicts,
        throughput,
    })
}

fn verdicts(vars: &VarSpace, decodes: &[DecodeEvent], packets: u32) -> Vec<PacketVerdict> {
    // first decode slot of each variable at its own relay and destination
    let mut at_relay: HashMap<Var, u32> = HashMap::new();
    let mut at_dest: HashMap<Var, u32> = HashMap::new();
    for e in decodes {
        if e.node.side() != vars.side_of(e.var) {
            continue;
        }
        if e.node.is_relay() {
            at_relay.entry(e.var).or_insert(e.slot);
        } else if !e.node.is_source() {
            at_dest.entry(e.var).or_insert(e.slot);
        }
    }
    let done = |map: &HashMap<Var, u32>, side: usize, pk: u32| -> Option<u32> {
        (0..vars.per_packet)
            .map(|i| map.get(&vars.var(side, pk, i)).copied())
            .try_fold(0, |acc, s| s.map(|s| acc.max(s)))
    };
    (0..packets)
        .map(|pk| PacketVerdict {
            packet: pk + 1,
            relay_done: [done(&at_relay, 0, pk), done(&at_relay, 1, pk)],
            destination_done: [done(&at_dest, 0, pk), done(&at_dest, 1, pk)],
        })
        .collect()
}

fn throughput(
    vars: &VarSpace,
    payload: &[bool],
    decodes: &[DecodeEvent],
    slots: u32,
    last: u32,
    period: u32,
) -> Throughput {
    let mut delivered = [0u64; 2];
    let mut per_slot = vec![0u32; slots as usize];
    for e in decodes {
        let side = e.node.side();
        let is_dest = !e.node.is_relay() && !e.node.is_source();
        if is_dest && vars.side_of(e.var) == side && payload[e.var as usize] == e.value {
            delivered[side] += 1;
            per_slot[e.slot as usize - 1] += 1;
        }
    }
    let start = 2 * WARMUP_PACKETS + 1;
    let bound = last.saturating_sub(2 * WARMUP_PACKETS);
    let len = if bound >= start { (bound - start + 1) / period * period } else { 0 };
    let window = if len == 0 { (1, slots) } else { (start, start + len - 1) };
    let in_window: u64 = per_slot[(window.0 - 1) as usize..window.1 as usize].iter().map(|&c| c as u64).sum();
    let total = delivered[0] + delivered[1];
    Throughput {
        slots,
        delivered,
        per_slot,
        window,
        raw_rate: Ratio::new(total, slots.max(1) as u64),
        steady_rate: Ratio::new(in_window, (window.1 - window.0 + 1).max(1) as u64),
    }
}
