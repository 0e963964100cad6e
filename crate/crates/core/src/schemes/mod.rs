//! Executable achievability schemes over the bit-level channel.

mod allocation;
mod engine;
mod four_phase;
mod label;
mod nofb;
mod solver;
mod trace;
mod verify;

use std::fmt;
use std::str::FromStr;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::rates;

pub use allocation::{allocate_fbxw, allocate_rss, allocate_rsw, level_map, BitAllocation, LevelRole, SourcePhase};
pub use label::{Label, Var, VarSpace};
pub use nofb::{design_nofb_mid, MidDesign};
pub use solver::{InsertOutcome, Knowledge};
pub use trace::{
    Conflict, DecodeEvent, Layout, LevelUse, NodeId, PacketVerdict, PhaseTag, SimulationTrace, SlotRecord, Throughput,
};
pub use verify::{verify_trace, Issue, IssueKind, VerifyReport};

/// Smallest run that fills the pipeline.
pub const MIN_PACKETS: u32 = 4;

/// Slots a run may take beyond two per packet.
pub const SLOT_OVERHEAD: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Cross-link feedback, weak interference.
    Fbxw,
    /// Direct-link feedback with rate splitting, weak interference, mbar = 0.
    Rsw,
    /// Direct-link feedback with rate splitting, strong interference.
    Rss,
    /// One-shot scheme without feedback, mid-range interference.
    NofbMid,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Fbxw, Scheme::Rsw, Scheme::Rss, Scheme::NofbMid];

    /// Closed-form sum rate this scheme achieves at `p`.
    pub fn closed_form_rate(&self, p: &ChannelParams) -> u32 {
        if rates::regime_of(p).is_degenerate() {
            return 0;
        }
        match self {
            Scheme::Fbxw => rates::r_fbxw(p),
            Scheme::Rsw => rates::r_rsw(p),
            Scheme::Rss => rates::r_rss(p),
            Scheme::NofbMid => rates::r_nom(p),
        }
    }

    /// Whether the scheme is defined at `p`.
    pub fn applies_to(&self, p: &ChannelParams) -> bool {
        match self {
            Scheme::Fbxw => allocate_fbxw(p).is_ok(),
            Scheme::Rsw => allocate_rsw(p).is_ok(),
            Scheme::Rss => allocate_rss(p).is_ok(),
            Scheme::NofbMid => {
                let r = rates::regime_of(p);
                r.contains(rates::Regime::Mid) || r.is_degenerate()
            }
        }
    }

    pub fn allocate(&self, p: &ChannelParams) -> Result<BitAllocation> {
        match self {
            Scheme::Fbxw => allocate_fbxw(p),
            Scheme::Rsw => allocate_rsw(p),
            Scheme::Rss => allocate_rss(p),
            Scheme::NofbMid => Err(Error::Domain("the no-feedback scheme has no bit allocation".into())),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Fbxw => "FBXW",
            Scheme::Rsw => "RSW",
            Scheme::Rss => "RSS",
            Scheme::NofbMid => "NOFB_MID",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "fbxw" => Ok(Scheme::Fbxw),
            "rsw" => Ok(Scheme::Rsw),
            "rss" => Ok(Scheme::Rss),
            "nofb_mid" | "nofb" => Ok(Scheme::NofbMid),
            other => Err(Error::Domain(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Single flipped bit on a transmitted level, for negative-control runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fault {
    pub slot: u32,
    /// A source or a relay.
    pub node: NodeId,
    /// 1-based level.
    pub level: usize,
}

fn run(scheme: Scheme, p: &ChannelParams, packets: u32, seed: u64, fault: Option<&Fault>) -> Result<SimulationTrace> {
    if packets < MIN_PACKETS {
        return Err(Error::Domain(format!("need at least {MIN_PACKETS} packets to fill the pipeline, got {packets}")));
    }
    match scheme {
        Scheme::NofbMid => {
            let design = design_nofb_mid(p)?;
            engine::simulate(&nofb::NoFbMid::new(*p, design, packets), packets, seed, fault)
        }
        _ => {
            let alloc = scheme.allocate(p)?;
            engine::simulate(&four_phase::FourPhase::new(*p, alloc, packets)?, packets, seed, fault)
        }
    }
}

/// Runs `scheme` for `packets` packets with payload drawn from `seed`.
pub fn run_scheme(scheme: Scheme, p: &ChannelParams, packets: u32, seed: u64) -> Result<SimulationTrace> {
    run(scheme, p, packets, seed, None)
}

/// Same as [`run_scheme`] but one transmitted bit is flipped on the air.
pub fn run_scheme_with_fault(
    scheme: Scheme,
    p: &ChannelParams,
    packets: u32,
    seed: u64,
    fault: Fault,
) -> Result<SimulationTrace> {
    run(scheme, p, packets, seed, Some(&fault))
}

pub fn run_nofb_mid(p: &ChannelParams, packets: u32, seed: u64) -> Result<SimulationTrace> {
    run_scheme(Scheme::NofbMid, p, packets, seed)
}

impl SimulationTrace {
    /// Whether the run finished within two slots per packet plus a constant.
    pub fn within_slot_budget(&self) -> bool {
        self.throughput.slots <= 2 * self.packets + SLOT_OVERHEAD
    }
}
