//! Per-packet bit budgets of the four-phase schemes and their level layouts.

use std::fmt;

use num_rational::Ratio;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::rates::{self, fmt_half, regime_of, Half, Regime};

use super::Scheme;

/// Bits per packet per source, split by role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitAllocation {
    pub scheme: Scheme,
    /// Common bits both relays decode but the other source never needs.
    pub noncoop: u32,
    /// Common bits the other source must learn through feedback.
    pub coop: u32,
    /// Bits only the direct relay sees.
    pub private: u32,
    /// Cooperative bits fed back in the first and second relay slot of a packet.
    pub per_phase_coop: (u32, u32),
    /// 2 when the cooperative count is odd and the phase split alternates between packets.
    pub superframe: u32,
    /// Feedback budget (f* or f') for the rate-splitting schemes.
    pub feedback_budget: Option<Half>,
}

impl BitAllocation {
    fn new(scheme: Scheme, noncoop: i64, coop: i64, private: i64, budget: Option<Half>) -> Self {
        let coop = coop.max(0) as u32;
        BitAllocation {
            scheme,
            noncoop: noncoop.max(0) as u32,
            coop,
            private: private.max(0) as u32,
            per_phase_coop: (coop.div_ceil(2), coop / 2),
            superframe: if coop % 2 == 1 { 2 } else { 1 },
            feedback_budget: budget,
        }
    }

    /// Fresh bits per source per packet: 2 noncoop + coop + 2 private.
    pub fn bits_per_packet(&self) -> u32 {
        2 * self.noncoop + self.coop + 2 * self.private
    }

    /// Phase split for 1-based `packet`; odd cooperative counts alternate which
    /// relay slot carries the extra bit.
    pub fn coop_split(&self, packet: u32) -> (u32, u32) {
        let (a, b) = self.per_phase_coop;
        if self.superframe == 2 && packet.is_multiple_of(2) {
            (b, a)
        } else {
            (a, b)
        }
    }
}

impl fmt::Display for BitAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "noncoop={} coop={} private={} per_phase_coop={},{} superframe={}",
            self.noncoop, self.coop, self.private, self.per_phase_coop.0, self.per_phase_coop.1, self.superframe
        )?;
        if let Some(b) = self.feedback_budget {
            let name = if self.scheme == Scheme::Rss { "f_prime" } else { "f_star" };
            write!(f, " {name}={}", fmt_half(b))?;
        }
        Ok(())
    }
}

fn ints(p: &ChannelParams) -> (i64, i64, i64, i64) {
    (p.m as i64, p.n as i64, p.nbar as i64, p.f as i64)
}

fn require(p: &ChannelParams, r: Regime, what: &str) -> Result<()> {
    let regimes = regime_of(p);
    if regimes.contains(r) || regimes.is_degenerate() {
        Ok(())
    } else {
        Err(Error::Regime(format!("{what} needs the {r} regime, but {p} is {regimes}")))
    }
}

/// Noncoop and private counts shared by both weak-interference schemes.
fn weak_common_private(p: &ChannelParams) -> (i64, i64) {
    let (m, n, _, f) = ints(p);
    let k0 = (2 * m - n).max(0);
    (k0.min(f), (n - m).min((f - k0).max(0)))
}

pub fn allocate_fbxw(p: &ChannelParams) -> Result<BitAllocation> {
    require(p, Regime::Weak, "the cross-link feedback scheme")?;
    let (m, n, _, f) = ints(p);
    let mx = (n - m).max(m);
    let (k0, kp) = weak_common_private(p);
    let kc = (2 * p.mbar as i64).min(2 * n - m - 2 * mx).min((2 * f - 2 * mx).max(0));
    Ok(BitAllocation::new(Scheme::Fbxw, k0, kc, kp, None))
}

pub fn allocate_rsw(p: &ChannelParams) -> Result<BitAllocation> {
    require(p, Regime::Weak, "the weak rate-splitting scheme")?;
    if p.mbar != 0 {
        return Err(Error::Domain(format!("the weak rate-splitting scheme needs mbar = 0, got {}", p.mbar)));
    }
    let (m, n, nbar, f) = ints(p);
    let mx = (n - m).max(m);
    let fs = rates::f_star(p);
    let (k0, kp) = weak_common_private(p);
    let fb = Ratio::from_integer(2 * (nbar - f).max(0) as u32) + fs * 2;
    let kc = (fb.to_integer() as i64).min(2 * n - m - 2 * mx).min((2 * f - 2 * mx).max(0));
    Ok(BitAllocation::new(Scheme::Rsw, k0, kc, kp, Some(fs)))
}

pub fn allocate_rss(p: &ChannelParams) -> Result<BitAllocation> {
    require(p, Regime::Strong, "the strong rate-splitting scheme")?;
    let (m, n, nbar, f) = ints(p);
    let fp = rates::f_prime(p);
    let fb = Ratio::from_integer(2 * (nbar - f).max(0) as u32) + fp * 2;
    let kc = (fb.to_integer() as i64).min(m - 2 * n).min((2 * f - 2 * n).max(0));
    Ok(BitAllocation::new(Scheme::Rss, n.min(f), kc, 0, Some(fp)))
}

/// What a source puts on one level in a hop-1 phase. Indices are 0-based
/// within their class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelRole {
    Zero,
    NonCoop(u32),
    Coop(u32),
    Private(u32),
    /// The other source's cooperative bit, resent to cancel interference at the own relay.
    OtherCoop(u32),
    /// The other source's cooperative bit as overheard, relayed around the loop
    /// to the cross relay.
    LoopCoop(u32),
}

/// Hop-1 phases of a packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourcePhase {
    First,
    Fourth,
}

/// Level-by-level layout (index 0 = level 1) of a source's hop-1 vector.
pub fn level_map(alloc: &BitAllocation, p: &ChannelParams, phase: SourcePhase) -> Result<Vec<LevelRole>> {
    let q = p.q();
    let mut out = vec![LevelRole::Zero; q];
    let mut place = |start: usize, count: u32, role: fn(u32) -> LevelRole| -> Result<()> {
        if start + count as usize > q {
            return Err(Error::Internal(format!("allocation {alloc} does not fit in {q} levels for {p}")));
        }
        for j in 0..count {
            let slot = &mut out[start + j as usize];
            if *slot != LevelRole::Zero {
                return Err(Error::Internal(format!("level {} assigned twice", start + j as usize + 1)));
            }
            *slot = role(j);
        }
        Ok(())
    };
    let k0 = alloc.noncoop as usize;
    place(0, alloc.noncoop, LevelRole::NonCoop)?;
    match (alloc.scheme, phase) {
        (Scheme::Rss, SourcePhase::First) => place(p.n as usize, alloc.coop, LevelRole::Coop)?,
        (Scheme::Rss, SourcePhase::Fourth) => place(p.n as usize, alloc.coop, LevelRole::LoopCoop)?,
        (_, SourcePhase::First) => {
            place(k0, alloc.coop, LevelRole::Coop)?;
            place(p.m as usize, alloc.private, LevelRole::Private)?;
        }
        (_, SourcePhase::Fourth) => {
            place(k0, alloc.coop, LevelRole::OtherCoop)?;
            place(p.m as usize, alloc.private, LevelRole::Private)?;
        }
    }
    Ok(out)
}
