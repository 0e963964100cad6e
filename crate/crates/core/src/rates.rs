//! Closed-form sum-rate expressions: outer bound, achievable rates, the
//! auxiliary feedback budgets f* and f', and reference curves.
//!
//! Everything is exact integer arithmetic; the only fractional values are the
//! half-integers f* and f'.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};

/// Exact non-negative rational; in practice always a multiple of 1/2.
pub type Half = Ratio<u32>;

fn pos(x: i64) -> i64 {
    x.max(0)
}

fn rate(x: i64) -> u32 {
    pos(x) as u32
}

/// Integer view of the parameters, so differences can go negative.
#[derive(Clone, Copy)]
struct P {
    m: i64,
    n: i64,
    mbar: i64,
    nbar: i64,
    f: i64,
}

impl From<&ChannelParams> for P {
    fn from(p: &ChannelParams) -> Self {
        P { m: p.m as i64, n: p.n as i64, mbar: p.mbar as i64, nbar: p.nbar as i64, f: p.f as i64 }
    }
}

impl P {
    /// max(n - m, m)
    fn mx(&self) -> i64 {
        (self.n - self.m).max(self.m)
    }

    /// (nbar - f)+, the relay levels only the own source can see.
    fn fb_only(&self) -> i64 {
        pos(self.nbar - self.f)
    }
}

/// Interference regime. Boundary points belong to two regimes at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    Weak,
    Mid,
    Strong,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Weak => "WEAK",
            Regime::Mid => "MID",
            Regime::Strong => "STRONG",
        })
    }
}

/// Set of regimes a parameter point belongs to; empty means degenerate (m = n = 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Regimes {
    weak: bool,
    mid: bool,
    strong: bool,
}

impl Regimes {
    pub fn contains(&self, r: Regime) -> bool {
        match r {
            Regime::Weak => self.weak,
            Regime::Mid => self.mid,
            Regime::Strong => self.strong,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.weak || self.mid || self.strong)
    }

    pub fn is_boundary(&self) -> bool {
        self.list().len() > 1
    }

    /// Member regimes in WEAK, MID, STRONG order.
    pub fn list(&self) -> Vec<Regime> {
        [Regime::Weak, Regime::Mid, Regime::Strong].into_iter().filter(|r| self.contains(*r)).collect()
    }

    pub fn primary(&self) -> Option<Regime> {
        self.list().first().copied()
    }
}

impl fmt::Display for Regimes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_degenerate() {
            return f.write_str("DEGENERATE");
        }
        let names: Vec<String> = self.list().iter().map(|r| r.to_string()).collect();
        f.write_str(&names.join("+"))
    }
}

pub fn regime_of(p: &ChannelParams) -> Regimes {
    let (m, n) = (p.m as u64, p.n as u64);
    if m == 0 && n == 0 {
        return Regimes { weak: false, mid: false, strong: false };
    }
    Regimes { weak: 3 * m <= 2 * n, mid: 2 * n <= 3 * m && m <= 2 * n, strong: m >= 2 * n }
}

/// Achievable rate of the cross-link feedback scheme (weak interference).
pub fn r_fbxw(p: &ChannelParams) -> u32 {
    let q = P::from(p);
    let mx = q.mx();
    rate((2 * mx + 2 * q.mbar).min(2 * q.n - q.m).min(2 * q.f))
}

/// Achievable rate of the rate-splitting scheme for strong interference.
pub fn r_rss(p: &ChannelParams) -> u32 {
    let q = P::from(p);
    rate((q.n + q.f + q.fb_only()).min(2 * q.n + 2 * q.nbar).min(q.m).min(2 * q.f))
}

/// No-feedback rate for mid-range interference.
pub fn r_nom(p: &ChannelParams) -> u32 {
    let q = P::from(p);
    rate((2 * q.n - q.m).max(q.m).min(2 * q.f))
}

/// Achievable rate of the rate-splitting scheme for weak interference without
/// a backward cross link.
pub fn r_rsw(p: &ChannelParams) -> u32 {
    let q = P::from(p);
    let mx = q.mx();
    rate((q.f + mx + q.fb_only()).min(2 * mx + 2 * q.nbar).min(2 * q.n - q.m).min(2 * q.f))
}

/// Extra outer bound available when there is no backward cross link.
fn no_cross_feedback_bound(q: &P) -> i64 {
    q.f + q.mx() + q.fb_only()
}

/// Outer-bound piece of one regime (before the mbar = 0 refinement).
fn outer_piece(q: &P, r: Regime) -> i64 {
    match r {
        Regime::Weak => (2 * q.mx() + 2 * q.nbar.max(q.mbar)).min(2 * q.n - q.m).min(2 * q.f),
        Regime::Mid => (2 * q.n - q.m).max(q.m).min(2 * q.f),
        Regime::Strong => (q.n + q.f + q.fb_only()).min(2 * q.n + 2 * q.nbar).min(q.m).min(2 * q.f),
    }
}

fn outer_for(p: &ChannelParams, r: Regime) -> u32 {
    let q = P::from(p);
    let mut v = outer_piece(&q, r);
    if q.mbar == 0 {
        v = v.min(no_cross_feedback_bound(&q));
    }
    rate(v)
}

fn inner_for(p: &ChannelParams, r: Regime) -> u32 {
    match r {
        Regime::Weak if p.mbar == 0 => r_fbxw(p).max(r_rsw(p)),
        Regime::Weak => r_fbxw(p),
        Regime::Mid => r_nom(p),
        Regime::Strong => r_rss(p),
    }
}

/// Sum-rate outer bound; at a regime boundary the lower regime's piece is used.
pub fn outer_bound(p: &ChannelParams) -> u32 {
    regime_of(p).primary().map_or(0, |r| outer_for(p, r))
}

/// Best achievable sum rate; at a regime boundary the lower regime's piece is used.
pub fn inner_bound(p: &ChannelParams) -> u32 {
    regime_of(p).primary().map_or(0, |r| inner_for(p, r))
}

/// Sum capacity when the backward cross link is absent.
pub fn capacity_mbar0(p: &ChannelParams) -> Result<u32> {
    if p.mbar != 0 {
        return Err(Error::Domain(format!("capacity without backward cross link needs mbar = 0, got {}", p.mbar)));
    }
    Ok(match regime_of(p).primary() {
        None => 0,
        Some(Regime::Weak) => r_rsw(p),
        Some(Regime::Mid) => r_nom(p),
        Some(Regime::Strong) => r_rss(p),
    })
}

/// The six general outer bounds, regime-free. Their minimum reproduces
/// [`outer_bound`] everywhere, which makes a handy cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneralBounds {
    /// n + f + (nbar - f)+
    pub ob1: u32,
    /// 2n + 2nbar
    pub ob2: u32,
    /// 2max(n-m,m) + 2max(nbar,mbar)
    pub ob3: u32,
    /// max(n,m) + (n-m)+
    pub ob4: u32,
    /// 2f
    pub ob5: u32,
    /// f + max(n-m,m) + (nbar-f)+, only valid when mbar = 0
    pub ob6: Option<u32>,
}

impl GeneralBounds {
    pub fn min(&self) -> u32 {
        let base = self.ob1.min(self.ob2).min(self.ob3).min(self.ob4).min(self.ob5);
        self.ob6.map_or(base, |b| base.min(b))
    }
}

pub fn general_bounds(p: &ChannelParams) -> GeneralBounds {
    let q = P::from(p);
    GeneralBounds {
        ob1: rate(q.n + q.f + q.fb_only()),
        ob2: rate(2 * q.n + 2 * q.nbar),
        ob3: rate(2 * q.mx() + 2 * q.nbar.max(q.mbar)),
        ob4: rate(q.n.max(q.m) + pos(q.n - q.m)),
        ob5: rate(2 * q.f),
        ob6: (q.mbar == 0).then(|| rate(no_cross_feedback_bound(&q))),
    }
}

/// Feedback budget of the weak-interference rate-splitting scheme.
pub fn f_star(p: &ChannelParams) -> Half {
    let q = P::from(p);
    feedback_budget(&q, q.mx())
}

/// Feedback budget of the strong-interference rate-splitting scheme.
pub fn f_prime(p: &ChannelParams) -> Half {
    let q = P::from(p);
    feedback_budget(&q, q.n)
}

fn feedback_budget(q: &P, used: i64) -> Half {
    let d = q.fb_only();
    let half = Ratio::new(pos(q.f - used - d) as u32, 2);
    let cap = (q.nbar - d).min(q.f) as u32;
    half.min(Ratio::from_integer(cap))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxQuantities {
    pub f_star: Half,
    pub f_prime: Half,
    /// max(n-m,m) + (nbar-f)+
    pub delta0: u32,
}

pub fn aux_quantities(p: &ChannelParams) -> AuxQuantities {
    let q = P::from(p);
    AuxQuantities { f_star: f_star(p), f_prime: f_prime(p), delta0: rate(q.mx() + q.fb_only()) }
}

/// Reference envelope for dedicated (non-overheard) feedback.
pub fn dfb_reference(p: &ChannelParams) -> u32 {
    let q = P::from(p);
    rate(
        (2 * q.f).min(2 * q.mx() + 2 * q.nbar.max(q.mbar)).min(q.n.max(q.m) + pos(q.n - q.m)).min(2 * q.n + 2 * q.nbar),
    )
}

/// Reference envelope without feedback.
pub fn nofb_reference(p: &ChannelParams) -> u32 {
    let q = P::from(p);
    rate((2 * q.f).min(2 * q.n).min(2 * q.mx()).min((2 * q.n - q.m).max(q.m)))
}

/// Renders a half-integer as "3" or "3.5".
pub fn fmt_half(x: Half) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        debug_assert_eq!(*x.denom(), 2);
        format!("{}.5", x.numer() / 2)
    }
}

/// Every rate quantity for one parameter point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateBundle {
    pub params: ChannelParams,
    pub regimes: Regimes,
    pub outer: u32,
    pub inner: u32,
    /// Value of every min-term and scheme rate that applies at this point.
    pub components: BTreeMap<String, u32>,
    pub matches: bool,
    pub open_regime: bool,
    /// At a boundary point, whether all adjacent pieces agree (trivially true elsewhere).
    pub boundary_consistent: bool,
    pub capacity_mbar0: Option<u32>,
    pub dfb_reference: u32,
    pub nofb_reference: u32,
    pub aux: AuxQuantities,
}

impl RateBundle {
    pub fn gap(&self) -> u32 {
        self.outer - self.inner.min(self.outer)
    }
}

fn add_terms(map: &mut BTreeMap<String, u32>, q: &P, r: Regime) {
    let mx = q.mx();
    let mut put = |k: &str, v: i64| {
        map.insert(k.to_string(), rate(v));
    };
    put("2f", 2 * q.f);
    match r {
        Regime::Weak => {
            put("2max(n-m,m)+2max(nbar,mbar)", 2 * mx + 2 * q.nbar.max(q.mbar));
            put("2n-m", 2 * q.n - q.m);
            put("2max(n-m,m)+2mbar", 2 * mx + 2 * q.mbar);
            if q.mbar == 0 {
                put("2max(n-m,m)+2nbar", 2 * mx + 2 * q.nbar);
            }
        }
        Regime::Mid => put("max(2n-m,m)", (2 * q.n - q.m).max(q.m)),
        Regime::Strong => {
            put("n+f+(nbar-f)+", q.n + q.f + q.fb_only());
            put("2n+2nbar", 2 * q.n + 2 * q.nbar);
            put("m", q.m);
        }
    }
    if q.mbar == 0 {
        put("f+max(n-m,m)+(nbar-f)+", no_cross_feedback_bound(q));
    }
}

pub fn rate_bundle(p: &ChannelParams) -> RateBundle {
    let regimes = regime_of(p);
    let q = P::from(p);
    let mut components = BTreeMap::new();
    let mut outers = Vec::new();
    let mut inners = Vec::new();
    for r in regimes.list() {
        add_terms(&mut components, &q, r);
        match r {
            Regime::Weak => {
                components.insert("R_FBXw".into(), r_fbxw(p));
                if p.mbar == 0 {
                    components.insert("R_RSw".into(), r_rsw(p));
                }
            }
            Regime::Mid => {
                components.insert("R_NOm".into(), r_nom(p));
            }
            Regime::Strong => {
                components.insert("R_RSs".into(), r_rss(p));
            }
        }
        outers.push(outer_for(p, r));
        inners.push(inner_for(p, r));
    }
    let outer = outers.first().copied().unwrap_or(0);
    let inner = inners.first().copied().unwrap_or(0);
    let boundary_consistent = outers.iter().all(|&v| v == outer) && inners.iter().all(|&v| v == inner);
    RateBundle {
        params: *p,
        regimes,
        outer,
        inner,
        components,
        matches: inner == outer,
        open_regime: 3 * (p.m as u64) < 2 * (p.n as u64) && p.mbar < p.nbar,
        boundary_consistent,
        capacity_mbar0: capacity_mbar0(p).ok(),
        dfb_reference: dfb_reference(p),
        nofb_reference: nofb_reference(p),
        aux: aux_quantities(p),
    }
}

/// Rates of every regime piece at `p`, for boundary-continuity checks.
pub fn pieces_at(p: &ChannelParams) -> Vec<(Regime, u32, u32)> {
    regime_of(p).list().into_iter().map(|r| (r, outer_for(p, r), inner_for(p, r))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(m: u32, n: u32, f: u32, mbar: u32, nbar: u32) -> ChannelParams {
        ChannelParams { m, n, mbar, nbar, f }
    }

    #[test]
    fn regimes_of_examples() {
        assert_eq!(regime_of(&cp(2, 4, 0, 0, 0)).list(), vec![Regime::Weak]);
        assert_eq!(regime_of(&cp(4, 1, 0, 0, 0)).list(), vec![Regime::Strong]);
        assert_eq!(regime_of(&cp(2, 3, 0, 0, 0)).list(), vec![Regime::Weak, Regime::Mid]);
        assert_eq!(regime_of(&cp(2, 1, 0, 0, 0)).list(), vec![Regime::Mid, Regime::Strong]);
        assert_eq!(regime_of(&cp(3, 0, 0, 0, 0)).list(), vec![Regime::Strong]);
        assert!(regime_of(&cp(0, 0, 5, 0, 0)).is_degenerate());
        assert_eq!(regime_of(&cp(2, 3, 0, 0, 0)).to_string(), "WEAK+MID");
    }

    #[test]
    fn outer_bound_examples() {
        assert_eq!(outer_bound(&cp(2, 4, 3, 1, 1)), 6);
        assert_eq!(outer_bound(&cp(4, 1, 2, 1, 3)), 4);
        assert_eq!(outer_bound(&cp(5, 3, 0, 4, 2)), 0);
    }

    #[test]
    fn inner_bound_examples() {
        assert_eq!(inner_bound(&cp(2, 4, 3, 1, 1)), 6);
        assert_eq!(inner_bound(&cp(2, 4, 3, 0, 1)), 5);
        assert_eq!(inner_bound(&cp(4, 1, 2, 1, 1)), 3);
    }

    #[test]
    fn scheme_rate_examples() {
        assert_eq!(r_rsw(&cp(4, 7, 5, 0, 1)), 9);
        assert_eq!(r_fbxw(&cp(0, 4, 10, 0, 0)), 8);
        assert_eq!(r_rss(&cp(4, 1, 2, 1, 3)), 4);
    }

    #[test]
    fn feedback_budgets() {
        assert_eq!(f_star(&cp(2, 4, 3, 0, 1)), Ratio::new(1, 2));
        assert_eq!(f_prime(&cp(4, 1, 2, 1, 3)), Ratio::from_integer(0));
        assert_eq!(f_star(&cp(2, 4, 0, 0, 3)), Ratio::from_integer(0));
        assert_eq!(aux_quantities(&cp(2, 4, 3, 0, 4)).delta0, 3);
    }

    #[test]
    fn capacity_without_cross_feedback() {
        assert_eq!(capacity_mbar0(&cp(2, 4, 3, 0, 1)), Ok(5));
        assert_eq!(capacity_mbar0(&cp(2, 4, 3, 0, 4)), Ok(6));
        assert_eq!(capacity_mbar0(&cp(0, 0, 3, 0, 4)), Ok(0));
        assert!(matches!(capacity_mbar0(&cp(2, 4, 3, 1, 1)), Err(Error::Domain(_))));
    }

    #[test]
    fn reference_curves() {
        assert_eq!(dfb_reference(&cp(2, 4, 3, 1, 1)), 6);
        assert_eq!(dfb_reference(&cp(2, 4, 0, 1, 1)), 0);
        assert_eq!(nofb_reference(&cp(2, 4, 10, 0, 0)), 4);
        assert_eq!(nofb_reference(&cp(0, 3, 2, 0, 0)), 4);
    }

    #[test]
    fn bundle_flags() {
        let b = rate_bundle(&cp(2, 4, 3, 0, 1));
        assert_eq!((b.outer, b.inner, b.matches), (5, 5, true));

        let b = rate_bundle(&cp(2, 4, 3, 0, 2));
        assert!(b.open_regime);

        let b = rate_bundle(&cp(0, 0, 5, 0, 0));
        assert_eq!((b.outer, b.inner, b.matches), (0, 0, true));
        assert!(b.regimes.is_degenerate());
        assert_eq!(b.regimes.to_string(), "DEGENERATE");
    }

    #[test]
    fn half_rendering() {
        assert_eq!(fmt_half(Ratio::new(7, 2)), "3.5");
        assert_eq!(fmt_half(Ratio::new(1, 2)), "0.5");
        assert_eq!(fmt_half(Ratio::from_integer(4)), "4");
    }

    #[test]
    fn boundary_pieces_agree() {
        for p in [cp(2, 3, 4, 1, 2), cp(4, 2, 3, 0, 1), cp(6, 9, 5, 0, 3)] {
            assert!(rate_bundle(&p).boundary_consistent, "{p}");
        }
    }
}
