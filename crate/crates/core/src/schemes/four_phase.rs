//! The pipelined four-phase feedback schemes.
//!
//! Packet i uses hop 1 at slot 2i-1 (phase 1) and 2i+2 (phase 4) and hop 2 at
//! slots 2i (phase 2) and 2i+1 (phase 3), so consecutive packets overlap and
//! each slot carries one hop-1 and one hop-2 use.

use crate::channel::ChannelParams;
use crate::error::{Error, Result};

use super::allocation::{level_map, BitAllocation, LevelRole, SourcePhase};
use super::engine::{NodeState, Protocol, RelayOut};
use super::label::{Label, Var, VarSpace};
use super::trace::{Layout, LevelUse, PhaseTag};
use super::Scheme;

pub(crate) struct FourPhase {
    p: ChannelParams,
    alloc: BitAllocation,
    vars: VarSpace,
    packets: u32,
    first: Vec<LevelRole>,
    fourth: Vec<LevelRole>,
}

/// Offsets of each bit class inside a packet's per-source variable block.
struct Block {
    noncoop1: u32,
    coop: u32,
    private1: u32,
    noncoop4: u32,
    private4: u32,
}

impl FourPhase {
    pub fn new(p: ChannelParams, alloc: BitAllocation, packets: u32) -> Result<Self> {
        let vars = VarSpace { per_packet: alloc.bits_per_packet(), packets };
        let first = level_map(&alloc, &p, SourcePhase::First)?;
        let fourth = level_map(&alloc, &p, SourcePhase::Fourth)?;
        Ok(FourPhase { p, alloc, vars, packets, first, fourth })
    }

    fn block(&self) -> Block {
        let a = &self.alloc;
        Block {
            noncoop1: 0,
            coop: a.noncoop,
            private1: a.noncoop + a.coop,
            noncoop4: a.noncoop + a.coop + a.private,
            private4: 2 * a.noncoop + a.coop + a.private,
        }
    }

    fn var(&self, side: usize, packet: u32, index: u32) -> Var {
        self.vars.var(side, packet - 1, index)
    }

    fn coop_var(&self, side: usize, packet: u32, j: u32) -> Var {
        self.var(side, packet, self.block().coop + j)
    }

    fn packet_ok(&self, i: u32) -> bool {
        i >= 1 && i <= self.packets
    }

    /// Hop-1 phase at `slot`, if any.
    fn source_phase(&self, slot: u32) -> Option<PhaseTag> {
        let tag = if slot % 2 == 1 {
            PhaseTag { packet: slot.div_ceil(2), phase: 1 }
        } else {
            PhaseTag { packet: (slot / 2).checked_sub(1)?, phase: 4 }
        };
        self.packet_ok(tag.packet).then_some(tag)
    }

    /// Hop-2 phase at `slot`, if any.
    fn relay_phase(&self, slot: u32) -> Option<PhaseTag> {
        let tag = if slot.is_multiple_of(2) {
            PhaseTag { packet: slot / 2, phase: 2 }
        } else {
            PhaseTag { packet: (slot - 1) / 2, phase: 3 }
        };
        self.packet_ok(tag.packet).then_some(tag)
    }

    /// Cooperative indices handled in a relay phase, and the levels they go on.
    fn feedback_plan(&self, tag: PhaseTag) -> Vec<(u32, usize)> {
        let (c2, c3) = self.alloc.coop_split(tag.packet);
        let (first, count) = if tag.phase == 2 { (0, c2) } else { (c2, c3) };
        let f = self.p.f as usize;
        let levels: Vec<usize> = match self.alloc.scheme {
            Scheme::Fbxw => (1..=count as usize).collect(),
            _ => {
                // levels hidden from the destination first, then the top levels
                let hidden = (self.p.nbar as usize).saturating_sub(f).min(count as usize);
                (f + 1..=f + hidden).chain(1..=count as usize - hidden).collect()
            }
        };
        (first..first + count).zip(levels).collect()
    }

    /// Level of relay `side`'s hop-1 output where the other source's phase-1
    /// cooperative bit `j` lands.
    fn cross_coop_level(&self, j: u32) -> usize {
        self.p.q() - self.p.m as usize + (self.alloc.noncoop + j) as usize + 1
    }

    /// What source `side` overheard about the other source's cooperative bit
    /// `j` of `packet`, minus everything it already knows except that bit.
    fn loop_residual(&self, side: usize, packet: u32, j: u32, node: &NodeState) -> Result<Label> {
        let target = self.coop_var(1 - side, packet, j);
        let (slot, level) = self
            .feedback_plan(PhaseTag { packet, phase: 2 })
            .into_iter()
            .map(|(jj, l)| (2 * packet, jj, l))
            .chain(self.feedback_plan(PhaseTag { packet, phase: 3 }).into_iter().map(|(jj, l)| (2 * packet + 1, jj, l)))
            .find(|&(_, jj, _)| jj == j)
            .map(|(s, _, l)| (s, l))
            .ok_or_else(|| Error::Internal(format!("cooperative bit {j} never fed back")))?;
        let seen_at = self.p.qbar() - self.p.nbar as usize + level;
        let heard = node.heard.get(&(slot, seen_at)).cloned().unwrap_or_default();
        if !heard.contains(target) {
            return Err(Error::Internal(format!(
                "{} did not overhear {} at slot {slot}",
                node.id,
                self.vars.name(target)
            )));
        }
        Ok(heard.without(|v| v != target && node.know.is_known(v)))
    }
}

impl Protocol for FourPhase {
    fn scheme(&self) -> Scheme {
        self.alloc.scheme
    }

    fn params(&self) -> &ChannelParams {
        &self.p
    }

    fn vars(&self) -> VarSpace {
        self.vars
    }

    fn layout(&self) -> Layout {
        Layout::FourPhase(self.alloc)
    }

    fn hop1(&self, slot: u32, side: usize, node: &NodeState) -> Result<(Vec<Label>, Option<PhaseTag>)> {
        let q = self.p.q();
        let Some(tag) = self.source_phase(slot) else {
            return Ok((vec![Label::zero(); q], None));
        };
        let b = self.block();
        let i = tag.packet;
        let roles = if tag.phase == 1 { &self.first } else { &self.fourth };
        let mut out = Vec::with_capacity(q);
        for role in roles {
            let label = match (*role, tag.phase) {
                (LevelRole::Zero, _) => Label::zero(),
                (LevelRole::NonCoop(j), 1) => Label::var(self.var(side, i, b.noncoop1 + j)),
                (LevelRole::NonCoop(j), _) => Label::var(self.var(side, i, b.noncoop4 + j)),
                (LevelRole::Coop(j), _) => Label::var(self.var(side, i, b.coop + j)),
                (LevelRole::Private(j), 1) => Label::var(self.var(side, i, b.private1 + j)),
                (LevelRole::Private(j), _) => Label::var(self.var(side, i, b.private4 + j)),
                (LevelRole::OtherCoop(j), _) => Label::var(self.coop_var(1 - side, i, j)),
                (LevelRole::LoopCoop(j), _) => self.loop_residual(side, i, j, node)?,
            };
            out.push(label);
        }
        Ok((out, Some(tag)))
    }

    fn hop2(&self, slot: u32, side: usize, node: &mut NodeState) -> Result<(RelayOut, Option<PhaseTag>)> {
        let mut out = RelayOut::idle(self.p.qbar());
        let tag = self.relay_phase(slot);
        if let Some(tag) = tag {
            let i = tag.packet;
            for (j, level) in self.feedback_plan(tag) {
                match self.alloc.scheme {
                    Scheme::Fbxw => {
                        let own = Label::var(self.coop_var(side, i, j));
                        out.set(level, own, LevelUse::ForwardFeedback)?;
                    }
                    Scheme::Rsw => {
                        let at = (2 * i - 1, self.cross_coop_level(j));
                        let combo = node
                            .heard
                            .get(&at)
                            .cloned()
                            .ok_or_else(|| Error::Internal(format!("{} has no observation at {at:?}", node.id)))?;
                        out.set(level, combo, LevelUse::Feedback)?;
                    }
                    Scheme::Rss => {
                        let other = Label::var(self.coop_var(1 - side, i, j));
                        out.set(level, other, LevelUse::Feedback)?;
                    }
                    Scheme::NofbMid => unreachable!("no feedback phases"),
                }
            }
        }
        out.fill_forward(node, self.p.f as usize);
        Ok((out, tag))
    }

    fn forwarded_directly(&self, var: Var) -> bool {
        if self.alloc.scheme != Scheme::Fbxw {
            return false;
        }
        let idx = self.vars.index_of(var);
        let b = self.block();
        idx >= b.coop && idx < b.coop + self.alloc.coop
    }

    fn last_scheduled_slot(&self) -> u32 {
        2 * self.packets + 2
    }

    fn period(&self) -> u32 {
        2 * self.alloc.superframe
    }
}
