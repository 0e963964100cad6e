//! One-shot common/private linear scheme for mid-range interference without
//! feedback, with relays forwarding through their backlog.
//!
//! The two sources alternate roles every slot: in even-role slots source 1
//! sends `rates[0]` bits with precoder `columns[0]` and source 2 sends
//! `rates[1]` bits with `columns[1]`; odd-role slots swap the precoders. A
//! packet is one slot of each role, so each source sends rates[0] + rates[1]
//! bits per packet.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::rates::{regime_of, Regime};

use super::engine::{NodeState, Protocol, RelayOut};
use super::label::{Label, Var, VarSpace};
use super::trace::{Layout, PhaseTag};
use super::Scheme;

const SEARCH_SEED: u64 = 0x6d69_645f_6e6f_6662;
const MAX_TRIES: u32 = 200_000;

/// Precoders of the alternating one-shot scheme. Column bit `k - 1` is level `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MidDesign {
    pub rates: [u32; 2],
    pub columns: [Vec<u64>; 2],
    /// Random candidates drawn before a valid design turned up.
    pub tries: u32,
}

impl fmt::Display for MidDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols = |c: &[u64]| c.iter().map(|x| format!("{x:x}")).collect::<Vec<_>>().join(",");
        write!(
            f,
            "rates={},{} columns={};{} tries={}",
            self.rates[0],
            self.rates[1],
            cols(&self.columns[0]),
            cols(&self.columns[1]),
            self.tries
        )
    }
}

/// Image of a column under the shift keeping the top `k` of `q` levels.
fn shifted(col: u64, q: usize, k: usize) -> u64 {
    let keep = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    (col & keep) << (q - k)
}

fn rank(cols: impl IntoIterator<Item = u64>) -> u32 {
    let mut basis: Vec<u64> = Vec::new();
    for mut c in cols {
        for &b in &basis {
            c = c.min(c ^ b);
        }
        if c != 0 {
            basis.push(c);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len() as u32
}

/// Whether the direct relay recovers every column of `own` in the presence of `other`.
fn decodable(own: &[u64], other: &[u64], p: &ChannelParams) -> bool {
    let (q, m, n) = (p.q(), p.m as usize, p.n as usize);
    let direct: Vec<u64> = own.iter().map(|&c| shifted(c, q, n)).collect();
    let cross: Vec<u64> = other.iter().map(|&c| shifted(c, q, m)).collect();
    let joint = rank(direct.iter().chain(&cross).copied());
    joint - rank(cross.iter().copied()) == own.len() as u32
}

/// Searches seeded random common/private precoders achieving
/// min(max(2n - m, m), 2f) per slot.
pub fn design_nofb_mid(p: &ChannelParams) -> Result<MidDesign> {
    let regimes = regime_of(p);
    if !regimes.contains(Regime::Mid) && !regimes.is_degenerate() {
        return Err(Error::Regime(format!("the no-feedback scheme needs the MID regime, but {p} is {regimes}")));
    }
    let q = p.q();
    if q > 64 {
        return Err(Error::Domain(format!("q = {q} exceeds the 64-level precoder limit")));
    }
    let (m, n) = (p.m as i64, p.n as i64);
    let target = ((2 * n - m).max(m).min(2 * p.f as i64)).max(0) as u32;
    let rates = [target.div_ceil(2), target / 2];
    // levels below the cross link's reach
    let hidden = q - p.m as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED ^ ((p.m as u64) << 32 | p.n as u64));
    let draw = |rng: &mut ChaCha8Rng, r: u32| -> Vec<u64> {
        (0..r as usize)
            .map(|j| {
                if j < hidden {
                    rng.gen_range(1..(1u64 << hidden))
                } else {
                    let all = if q == 64 { u64::MAX } else { (1u64 << q) - 1 };
                    rng.gen::<u64>() & all
                }
            })
            .collect()
    };
    for tries in 1..=MAX_TRIES {
        let g0 = draw(&mut rng, rates[0]);
        let g1 = draw(&mut rng, rates[1]);
        if decodable(&g0, &g1, p) && decodable(&g1, &g0, p) {
            return Ok(MidDesign { rates, columns: [g0, g1], tries });
        }
    }
    Err(Error::Internal(format!("no one-shot design found for {p}")))
}

pub(crate) struct NoFbMid {
    p: ChannelParams,
    design: MidDesign,
    vars: VarSpace,
    packets: u32,
}

impl NoFbMid {
    pub fn new(p: ChannelParams, design: MidDesign, packets: u32) -> Self {
        let vars = VarSpace { per_packet: design.rates[0] + design.rates[1], packets };
        NoFbMid { p, design, vars, packets }
    }
}

impl Protocol for NoFbMid {
    fn scheme(&self) -> Scheme {
        Scheme::NofbMid
    }

    fn params(&self) -> &ChannelParams {
        &self.p
    }

    fn vars(&self) -> VarSpace {
        self.vars
    }

    fn layout(&self) -> Layout {
        Layout::NoFeedback(self.design.clone())
    }

    fn hop1(&self, slot: u32, side: usize, _node: &NodeState) -> Result<(Vec<Label>, Option<PhaseTag>)> {
        let q = self.p.q();
        let packet = slot.div_ceil(2);
        if packet > self.packets {
            return Ok((vec![Label::zero(); q], None));
        }
        let role = ((slot + 1) % 2) as usize;
        let cols = &self.design.columns[side ^ role];
        let offset = if role == 0 { 0 } else { self.design.rates[side] };
        let mut out = vec![Label::zero(); q];
        for (c, &col) in cols.iter().enumerate() {
            let v: Var = self.vars.var(side, packet - 1, offset + c as u32);
            for (k, level) in out.iter_mut().enumerate() {
                if col >> k & 1 == 1 {
                    *level = level.xor(&Label::var(v));
                }
            }
        }
        Ok((out, Some(PhaseTag { packet, phase: role as u8 + 1 })))
    }

    fn hop2(&self, _slot: u32, _side: usize, node: &mut NodeState) -> Result<(RelayOut, Option<PhaseTag>)> {
        let mut out = RelayOut::idle(self.p.qbar());
        out.fill_forward(node, self.p.f as usize);
        Ok((out, None))
    }

    fn forwarded_directly(&self, _var: Var) -> bool {
        false
    }

    fn last_scheduled_slot(&self) -> u32 {
        2 * self.packets
    }

    fn period(&self) -> u32 {
        2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(m: u32, n: u32, f: u32) -> ChannelParams {
        ChannelParams { m, n, mbar: 0, nbar: 0, f }
    }

    #[test]
    fn shifted_keeps_top_levels() {
        // levels 1 and 3 set; only level 1 is in the top two and it lands on level 3
        assert_eq!(shifted(0b0101, 4, 2), 0b0100);
        assert_eq!(shifted(0b1111, 4, 4), 0b1111);
        assert_eq!(shifted(0b1111, 4, 0), 0);
    }

    #[test]
    fn rank_over_gf2() {
        assert_eq!(rank([0b011, 0b110, 0b101]), 2);
        assert_eq!(rank([0b001, 0b010, 0b100]), 3);
        assert_eq!(rank([0, 0]), 0);
    }

    #[test]
    fn designs_exist_across_mid_regime() {
        for n in 1..=8u32 {
            for m in 0..=2 * n {
                let p = cp(m, n, 2 * n);
                if !regime_of(&p).contains(Regime::Mid) {
                    continue;
                }
                let d = design_nofb_mid(&p).unwrap();
                let want = (2 * n as i64 - m as i64).max(m as i64) as u32;
                assert_eq!(d.rates[0] + d.rates[1], want, "{p}");
            }
        }
    }

    #[test]
    fn design_is_capped_by_second_hop() {
        let d = design_nofb_mid(&cp(2, 3, 1)).unwrap();
        assert_eq!(d.rates, [1, 1]);
    }

    #[test]
    fn weak_point_is_rejected() {
        assert!(matches!(design_nofb_mid(&cp(1, 4, 3)), Err(Error::Regime(_))));
    }
}
