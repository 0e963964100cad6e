//! Independent re-check of a finished trace against the true payload.

use std::fmt;

use crate::channel::{first_hop, second_hop};

use super::label::Var;
use super::trace::{NodeId, SimulationTrace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IssueKind {
    /// A transmitted bit differs from the value of the content it claims to carry.
    TransmitMismatch,
    /// A recorded output does not follow from the recorded inputs.
    ChannelMismatch,
    /// A node decoded a payload bit to the wrong value.
    WrongDecode(Var),
    /// A node received contradictory observations.
    Conflict,
    /// A payload bit never reached its destination.
    Undelivered(Var),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub slot: u32,
    pub node: NodeId,
    pub level: Option<usize>,
    pub kind: IssueKind,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "slot {} {}", self.slot, self.node)?;
        if let Some(l) = self.level {
            write!(f, " level {l}")?;
        }
        match &self.kind {
            IssueKind::TransmitMismatch => write!(f, ": transmitted bit does not match its content"),
            IssueKind::ChannelMismatch => write!(f, ": output inconsistent with channel inputs"),
            IssueKind::WrongDecode(v) => write!(f, ": decoded bit #{v} incorrectly"),
            IssueKind::Conflict => write!(f, ": contradictory observation"),
            IssueKind::Undelivered(v) => write!(f, ": bit #{v} never delivered"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    /// Sorted by slot; within a slot transmit mismatches first, then node and level.
    pub issues: Vec<Issue>,
    /// Payload bits delivered correctly to their destinations.
    pub delivered: u64,
    pub expected: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn first_failure(&self) -> Option<&Issue> {
        self.issues.first()
    }
}

fn first_diff(a: &[bool], b: &[bool]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y).map(|i| i + 1)
}

pub fn verify_trace(trace: &SimulationTrace) -> VerifyReport {
    let p = &trace.params;
    let payload = &trace.payload;
    let mut issues = Vec::new();

    for r in &trace.slots {
        let sent = [
            (NodeId::S1, &r.x_s[0], &r.x_s_labels[0]),
            (NodeId::S2, &r.x_s[1], &r.x_s_labels[1]),
            (NodeId::R1, &r.x_r[0], &r.x_r_labels[0]),
            (NodeId::R2, &r.x_r[1], &r.x_r_labels[1]),
        ];
        for (node, bits, labels) in sent {
            for (k, (&b, l)) in bits.bits().iter().zip(labels).enumerate() {
                if b != l.eval(payload) {
                    issues.push(Issue { slot: r.slot, node, level: Some(k + 1), kind: IssueKind::TransmitMismatch });
                }
            }
        }

        let replay = first_hop(&r.x_s[0], &r.x_s[1], p).ok().zip(second_hop(&r.x_r[0], &r.x_r[1], p).ok());
        let Some(((y_r1, y_r2), h)) = replay else {
            issues.push(Issue { slot: r.slot, node: NodeId::S1, level: None, kind: IssueKind::ChannelMismatch });
            continue;
        };
        let outputs = [
            (NodeId::R1, &y_r1, &r.y_r[0]),
            (NodeId::R2, &y_r2, &r.y_r[1]),
            (NodeId::D1, &h.y_d1, &r.y_d[0]),
            (NodeId::D2, &h.y_d2, &r.y_d[1]),
            (NodeId::S1, &h.y_s1, &r.y_s[0]),
            (NodeId::S2, &h.y_s2, &r.y_s[1]),
        ];
        for (node, want, got) in outputs {
            let level = if want.len() != got.len() { Some(0) } else { first_diff(want.bits(), got.bits()) };
            if let Some(l) = level {
                issues.push(Issue {
                    slot: r.slot,
                    node,
                    level: (l > 0).then_some(l),
                    kind: IssueKind::ChannelMismatch,
                });
            }
        }
    }

    for e in &trace.decodes {
        if payload[e.var as usize] != e.value {
            issues.push(Issue { slot: e.slot, node: e.node, level: None, kind: IssueKind::WrongDecode(e.var) });
        }
    }
    for c in &trace.conflicts {
        issues.push(Issue { slot: c.slot, node: c.node, level: Some(c.level), kind: IssueKind::Conflict });
    }

    let vars = &trace.vars;
    let mut got = vec![false; vars.total()];
    let mut delivered = 0;
    for e in &trace.decodes {
        let dest = e.node == NodeId::destination(vars.side_of(e.var));
        if dest && payload[e.var as usize] == e.value && !got[e.var as usize] {
            got[e.var as usize] = true;
            delivered += 1;
        }
    }
    let end = trace.slots.last().map_or(0, |r| r.slot);
    for (v, ok) in got.iter().enumerate() {
        if !ok {
            let v = v as Var;
            issues.push(Issue {
                slot: end,
                node: NodeId::destination(vars.side_of(v)),
                level: None,
                kind: IssueKind::Undelivered(v),
            });
        }
    }

    // within a slot, a bad transmission is the cause of everything else
    issues.sort_by_key(|i| (i.slot, i.kind != IssueKind::TransmitMismatch, i.node, i.level));
    VerifyReport { issues, delivered, expected: vars.total() as u64 }
}
