//! Grid sweeps that check the closed forms and the schemes against each other,
//! plus the comparison-curve and listening-choice reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::rates::{self, fmt_half, rate_bundle, RateBundle, Regime};
use crate::schemes::{run_scheme, verify_trace, Scheme};

/// Inclusive integer interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange {
    pub lo: u32,
    pub hi: u32,
}

impl IntRange {
    pub fn new(lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("empty range {lo}..{hi}")));
        }
        Ok(IntRange { lo, hi })
    }

    pub fn single(v: u32) -> Self {
        IntRange { lo: v, hi: v }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + Clone {
        self.lo..=self.hi
    }
}

impl FromStr for IntRange {
    type Err = Error;

    /// Accepts `3` or `0..8` (inclusive).
    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| t.trim().parse::<u32>().map_err(|_| Error::Domain(format!("bad range bound {t:?}")));
        match s.split_once("..") {
            Some((a, b)) => IntRange::new(num(a)?, num(b.trim_start_matches('='))?),
            None => Ok(IntRange::single(num(s)?)),
        }
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// Box of parameter points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub m: IntRange,
    pub n: IntRange,
    pub mbar: IntRange,
    pub nbar: IntRange,
    pub f: IntRange,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            m: IntRange { lo: 0, hi: 8 },
            n: IntRange { lo: 0, hi: 8 },
            mbar: IntRange { lo: 0, hi: 4 },
            nbar: IntRange { lo: 0, hi: 4 },
            f: IntRange { lo: 0, hi: 8 },
        }
    }
}

impl Grid {
    pub fn point(p: &ChannelParams) -> Grid {
        Grid {
            m: IntRange::single(p.m),
            n: IntRange::single(p.n),
            mbar: IntRange::single(p.mbar),
            nbar: IntRange::single(p.nbar),
            f: IntRange::single(p.f),
        }
    }

    /// All points in lexicographic (m, n, mbar, nbar, f) order.
    pub fn points(&self) -> Vec<ChannelParams> {
        let mut out = Vec::new();
        for m in self.m.iter() {
            for n in self.n.iter() {
                for mbar in self.mbar.iter() {
                    for nbar in self.nbar.iter() {
                        for f in self.f.iter() {
                            out.push(ChannelParams { m, n, mbar, nbar, f });
                        }
                    }
                }
            }
        }
        out
    }

    /// Sets one axis from `name=range`, e.g. `nbar=0..4`.
    pub fn set(&mut self, name: &str, range: IntRange) -> Result<()> {
        let slot = match name.trim() {
            "m" => &mut self.m,
            "n" => &mut self.n,
            "mbar" => &mut self.mbar,
            "nbar" => &mut self.nbar,
            "f" => &mut self.f,
            other => return Err(Error::Domain(format!("unknown grid axis {other:?}"))),
        };
        *slot = range;
        Ok(())
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// Comma-separated axis ranges over the default grid, e.g. `m=0..4,f=2`.
    fn from_str(s: &str) -> Result<Self> {
        let mut g = Grid::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) =
                part.split_once('=').ok_or_else(|| Error::Domain(format!("grid entry {part:?} is not axis=range")))?;
            g.set(k, v.parse()?)?;
        }
        Ok(g)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={},n={},mbar={},nbar={},f={}", self.m, self.n, self.mbar, self.nbar, self.f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    /// inner <= outer everywhere.
    InnerLeOuter,
    /// inner == outer outside {3m < 2n, mbar < nbar}.
    BoundsMatch,
    /// capacity_mbar0 == outer at mbar = 0.
    NoCrossCapacity,
    /// Adjacent regime pieces agree at 3m = 2n and m = 2n.
    BoundaryContinuity,
    /// 2 noncoop + 2 private + coop equals the closed-form rate.
    AllocationIdentities,
    /// inner == dedicated-feedback reference in WEAK with mbar >= nbar, and never above it.
    OfbEqDfbWeak,
    /// Cross-link listening wins in WEAK, direct-link listening in STRONG.
    FrequencyChoice,
    /// Simulated steady-state rate equals the closed form and the trace verifies.
    SchemeVsFormula,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::InnerLeOuter,
        Check::BoundsMatch,
        Check::NoCrossCapacity,
        Check::BoundaryContinuity,
        Check::AllocationIdentities,
        Check::OfbEqDfbWeak,
        Check::FrequencyChoice,
        Check::SchemeVsFormula,
    ];

    /// Every check that only evaluates formulas.
    pub fn formula_checks() -> BTreeSet<Check> {
        Check::ALL.into_iter().filter(|c| *c != Check::SchemeVsFormula).collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Check::InnerLeOuter => "INNER_LE_OUTER",
            Check::BoundsMatch => "COROLLARY1",
            Check::NoCrossCapacity => "THEOREM3",
            Check::BoundaryContinuity => "BOUNDARY_CONTINUITY",
            Check::AllocationIdentities => "APPENDIX_IDENTITIES",
            Check::OfbEqDfbWeak => "OFB_EQ_DFB_WEAK",
            Check::FrequencyChoice => "FREQUENCY_CHOICE",
            Check::SchemeVsFormula => "SCHEME_VS_FORMULA",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let want = s.trim().to_ascii_uppercase().replace('-', "_");
        Check::ALL.into_iter().find(|c| c.name() == want).ok_or_else(|| Error::Domain(format!("unknown check {s:?}")))
    }
}

/// Random subsample for the expensive simulation check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sample {
    pub size: usize,
    pub seed: u64,
}

pub const DEFAULT_SAMPLE_SEED: u64 = 2024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub grid: Grid,
    pub checks: BTreeSet<Check>,
    /// Packets per simulation run.
    pub scheme_packets: u32,
    /// Per-scheme subsample for simulations; `None` simulates every in-regime point.
    pub sample: Option<Sample>,
    /// Payload seed for simulations.
    pub seed: u64,
    /// Largest listening strength tried by the frequency-choice check.
    pub theta_max: u32,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            grid: Grid::default(),
            checks: Check::formula_checks(),
            scheme_packets: 16,
            sample: Some(Sample { size: 200, seed: DEFAULT_SAMPLE_SEED }),
            seed: 1,
            theta_max: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CheckStats {
    pub passed: u64,
    pub failed: u64,
}

impl CheckStats {
    pub fn evaluated(&self) -> u64 {
        self.passed + self.failed
    }
}

/// A failed check with both sides of the comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub check: Check,
    pub params: ChannelParams,
    pub lhs: String,
    pub rhs: String,
    /// Command line that reproduces the failing evaluation.
    pub replay: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {} vs {}\n  replay: {}", self.check, self.params, self.lhs, self.rhs, self.replay)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SweepReport {
    pub points: u64,
    pub stats: BTreeMap<Check, CheckStats>,
    /// Sorted by check, then parameter tuple.
    pub counterexamples: Vec<Counterexample>,
    /// Open-regime points per outer - inner gap.
    pub gap_histogram: BTreeMap<u32, u64>,
    /// STRONG points with nbar > 0 where overheard feedback stays strictly
    /// below the dedicated-feedback reference although neither 2f nor m binds.
    pub strong_feedback_loss: Vec<ChannelParams>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "points evaluated: {}", self.points)?;
        for (check, s) in &self.stats {
            writeln!(f, "{check}: {} passed, {} failed", s.passed, s.failed)?;
        }
        if !self.gap_histogram.is_empty() {
            let parts: Vec<String> = self.gap_histogram.iter().map(|(g, c)| format!("{g}:{c}")).collect();
            writeln!(f, "open-regime gap histogram (gap:count): {}", parts.join(" "))?;
        }
        if let Some(p) = self.strong_feedback_loss.first() {
            writeln!(f, "strong-regime feedback loss points: {} (first: {p})", self.strong_feedback_loss.len())?;
        }
        writeln!(f, "{} counterexamples", self.counterexamples.len())?;
        for c in &self.counterexamples {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

fn flags(p: &ChannelParams) -> String {
    format!("--m {} --n {} --mbar {} --nbar {} --f {}", p.m, p.n, p.mbar, p.nbar, p.f)
}

fn rates_replay(p: &ChannelParams) -> String {
    format!("overhear rates {}", flags(p))
}

/// Outcome of one check at one point.
struct Outcome {
    check: Check,
    failure: Option<Counterexample>,
}

fn outcome(check: Check, p: &ChannelParams, ok: bool, lhs: String, rhs: String, replay: String) -> Outcome {
    Outcome { check, failure: (!ok).then_some(Counterexample { check, params: *p, lhs, rhs, replay }) }
}

fn formula_outcomes(p: &ChannelParams, b: &RateBundle, spec: &SweepSpec) -> Vec<Outcome> {
    let mut out = Vec::new();
    let on = |c: Check| spec.checks.contains(&c);
    let replay = rates_replay(p);
    let weak = b.regimes.contains(Regime::Weak);
    let strong = b.regimes.contains(Regime::Strong);

    if on(Check::InnerLeOuter) {
        out.push(outcome(
            Check::InnerLeOuter,
            p,
            b.inner <= b.outer,
            format!("inner {}", b.inner),
            format!("outer {}", b.outer),
            replay.clone(),
        ));
    }
    if on(Check::BoundsMatch) && !b.open_regime {
        out.push(outcome(
            Check::BoundsMatch,
            p,
            b.inner == b.outer,
            format!("inner {}", b.inner),
            format!("outer {}", b.outer),
            replay.clone(),
        ));
    }
    if on(Check::NoCrossCapacity) {
        if let Some(c) = b.capacity_mbar0 {
            out.push(outcome(
                Check::NoCrossCapacity,
                p,
                c == b.outer,
                format!("capacity {c}"),
                format!("outer {}", b.outer),
                replay.clone(),
            ));
        }
    }
    if on(Check::BoundaryContinuity) && b.regimes.is_boundary() {
        let pieces = rates::pieces_at(p);
        let show = pieces.iter().map(|(r, o, i)| format!("{r}: outer {o} inner {i}")).collect::<Vec<_>>();
        out.push(outcome(
            Check::BoundaryContinuity,
            p,
            b.boundary_consistent,
            show[0].clone(),
            show[1..].join(", "),
            replay.clone(),
        ));
    }
    if on(Check::AllocationIdentities) {
        for scheme in [Scheme::Fbxw, Scheme::Rsw, Scheme::Rss] {
            if let Ok(a) = scheme.allocate(p) {
                let want = scheme.closed_form_rate(p);
                out.push(outcome(
                    Check::AllocationIdentities,
                    p,
                    a.bits_per_packet() == want,
                    format!("{scheme} 2*noncoop+2*private+coop {}", a.bits_per_packet()),
                    format!("rate {want}"),
                    replay.clone(),
                ));
            }
        }
    }
    if on(Check::OfbEqDfbWeak) {
        let ok = b.inner <= b.dfb_reference && (!weak || p.mbar < p.nbar || b.inner == b.dfb_reference);
        out.push(outcome(
            Check::OfbEqDfbWeak,
            p,
            ok,
            format!("inner {}", b.inner),
            format!("dfb {}", b.dfb_reference),
            replay.clone(),
        ));
    }
    if on(Check::FrequencyChoice) && p.mbar == spec.grid.mbar.lo && p.nbar == spec.grid.nbar.lo && (weak || strong) {
        for theta in 0..=spec.theta_max {
            let r = frequency_choice_report(theta, p.m, p.n, p.f);
            let (ok, lhs, rhs) = if weak {
                (r.cross.inner >= r.direct.inner, "cross", "direct")
            } else {
                (r.direct.inner >= r.cross.inner, "direct", "cross")
            };
            let value = |w: &str| if w == "cross" { r.cross.inner } else { r.direct.inner };
            out.push(outcome(
                Check::FrequencyChoice,
                p,
                ok,
                format!("theta {theta} {lhs} {}", value(lhs)),
                format!("{rhs} {}", value(rhs)),
                format!("overhear freq-choice --theta {theta} --m {} --n {} --f {}", p.m, p.n, p.f),
            ));
        }
    }
    out
}

/// Whether overheard feedback loses against dedicated feedback at a STRONG
/// point for a reason other than the 2f or m terms.
fn strong_loss(b: &RateBundle) -> bool {
    let p = &b.params;
    b.regimes.contains(Regime::Strong) && p.nbar > 0 && b.inner < b.dfb_reference && b.inner < 2 * p.f && b.inner < p.m
}

fn simulation_outcome(scheme: Scheme, p: &ChannelParams, spec: &SweepSpec) -> Outcome {
    let want = scheme.closed_form_rate(p);
    let replay = format!(
        "overhear simulate --scheme {} {} --packets {} --seed {}",
        scheme.to_string().to_ascii_lowercase(),
        flags(p),
        spec.scheme_packets,
        spec.seed
    );
    let (ok, lhs) = match run_scheme(scheme, p, spec.scheme_packets, spec.seed) {
        Ok(t) => {
            let v = verify_trace(&t);
            let rate = t.steady_state_rate();
            let ok = v.passed() && rate == Ratio::from_integer(want as u64) && t.within_slot_budget();
            let verdict = match v.first_failure() {
                Some(i) => format!("verify failed ({i})"),
                None => "verify passed".to_string(),
            };
            (ok, format!("{scheme} steady rate {rate}, {} slots, {verdict}", t.throughput.slots))
        }
        Err(e) => (false, format!("{scheme} error: {e}")),
    };
    outcome(Check::SchemeVsFormula, p, ok, lhs, format!("closed form {want}"), replay)
}

/// In-regime points for `scheme`, subsampled if requested.
fn scheme_points(scheme: Scheme, points: &[ChannelParams], sample: Option<Sample>) -> Vec<ChannelParams> {
    let mut pts: Vec<ChannelParams> = points.iter().copied().filter(|p| scheme.applies_to(p)).collect();
    if let Some(s) = sample {
        if s.size < pts.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ scheme as u64);
            pts = pts.choose_multiple(&mut rng, s.size).copied().collect();
            pts.sort();
        }
    }
    pts
}

pub fn sweep(spec: &SweepSpec) -> Result<SweepReport> {
    if spec.checks.contains(&Check::SchemeVsFormula) && spec.scheme_packets < 8 {
        return Err(Error::Domain(format!("simulation checks need at least 8 packets, got {}", spec.scheme_packets)));
    }
    let points = spec.grid.points();
    let per_point: Vec<(Vec<Outcome>, Option<u32>, bool)> = points
        .par_iter()
        .map(|p| {
            let b = rate_bundle(p);
            let gap = b.open_regime.then(|| b.gap());
            (formula_outcomes(p, &b, spec), gap, strong_loss(&b))
        })
        .collect();

    let mut report = SweepReport { points: points.len() as u64, ..Default::default() };
    for c in &spec.checks {
        report.stats.insert(*c, CheckStats::default());
    }
    let mut outcomes = Vec::new();
    for (p, (o, gap, loss)) in points.iter().zip(per_point) {
        outcomes.extend(o);
        if let Some(g) = gap {
            *report.gap_histogram.entry(g).or_default() += 1;
        }
        if loss {
            report.strong_feedback_loss.push(*p);
        }
    }

    if spec.checks.contains(&Check::SchemeVsFormula) {
        let jobs: Vec<(Scheme, ChannelParams)> = Scheme::ALL
            .into_iter()
            .flat_map(|s| scheme_points(s, &points, spec.sample).into_iter().map(move |p| (s, p)))
            .collect();
        let sims: Vec<Outcome> = jobs.par_iter().map(|(s, p)| simulation_outcome(*s, p, spec)).collect();
        outcomes.extend(sims);
    }

    for o in outcomes {
        let s = report.stats.entry(o.check).or_default();
        match o.failure {
            None => s.passed += 1,
            Some(c) => {
                s.failed += 1;
                report.counterexamples.push(c);
            }
        }
    }
    report.counterexamples.sort_by_key(|a| (a.check, a.params));
    Ok(report)
}

/// One grid point as a CSV row.
pub fn grid_csv(grid: &Grid) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record([
        "m",
        "n",
        "mbar",
        "nbar",
        "f",
        "regime",
        "outer",
        "inner",
        "gap",
        "matches",
        "open_regime",
        "capacity_mbar0",
        "dfb_reference",
        "nofb_reference",
        "f_star",
        "f_prime",
        "delta0",
    ])
    .map_err(csv_err)?;
    for p in grid.points() {
        let b = rate_bundle(&p);
        w.write_record([
            p.m.to_string(),
            p.n.to_string(),
            p.mbar.to_string(),
            p.nbar.to_string(),
            p.f.to_string(),
            b.regimes.to_string(),
            b.outer.to_string(),
            b.inner.to_string(),
            b.gap().to_string(),
            b.matches.to_string(),
            b.open_regime.to_string(),
            b.capacity_mbar0.map_or(String::new(), |c| c.to_string()),
            b.dfb_reference.to_string(),
            b.nofb_reference.to_string(),
            fmt_half(b.aux.f_star),
            fmt_half(b.aux.f_prime),
            b.aux.delta0.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// One sample of the feedback comparison curves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveRow {
    pub alpha: Ratio<u32>,
    pub m: u32,
    pub regimes: rates::Regimes,
    pub ofb_inner: u32,
    pub ofb_outer: u32,
    pub dfb: u32,
    pub nofb: u32,
}

impl CurveRow {
    pub fn ofb_eq_dfb(&self) -> bool {
        self.ofb_inner == self.dfb
    }

    /// All three curves coincide.
    pub fn all_equal(&self) -> bool {
        self.ofb_inner == self.dfb && self.dfb == self.nofb
    }
}

/// alpha = k/n for k = 0..=3n, covering all three regimes on the integer grid.
pub fn default_alpha_grid(n: u32) -> Vec<Ratio<u32>> {
    (0..=3 * n).map(|k| Ratio::new(k, n.max(1))).collect()
}

/// Overheard vs dedicated vs no feedback along alpha, with m = alpha*n rounded
/// half up to an integer.
pub fn compare_curves(n: u32, mbar: u32, nbar: u32, f: u32, alphas: &[Ratio<u32>]) -> Result<Vec<CurveRow>> {
    if n == 0 {
        return Err(Error::Domain("comparison curves need n > 0".into()));
    }
    Ok(alphas
        .iter()
        .map(|&alpha| {
            let scaled = alpha * n;
            let m = (scaled + Ratio::new(1, 2)).floor().to_integer();
            let p = ChannelParams { m, n, mbar, nbar, f };
            let b = rate_bundle(&p);
            CurveRow {
                alpha,
                m,
                regimes: b.regimes,
                ofb_inner: b.inner,
                ofb_outer: b.outer,
                dfb: b.dfb_reference,
                nofb: b.nofb_reference,
            }
        })
        .collect())
}

pub fn curves_csv(rows: &[CurveRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record([
        "alpha",
        "alpha_approx",
        "m",
        "regime",
        "ofb_inner",
        "ofb_outer",
        "dfb_reference",
        "nofb_reference",
        "ofb_eq_dfb",
        "all_equal",
    ])
    .map_err(csv_err)?;
    for r in rows {
        let approx = *r.alpha.numer() as f64 / *r.alpha.denom() as f64;
        w.write_record([
            r.alpha.to_string(),
            format!("{approx:.4}"),
            r.m.to_string(),
            r.regimes.to_string(),
            r.ofb_inner.to_string(),
            r.ofb_outer.to_string(),
            r.dfb.to_string(),
            r.nofb.to_string(),
            r.ofb_eq_dfb().to_string(),
            r.all_equal().to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    Cross,
    Direct,
    Equal,
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preference::Cross => "cross-link listening is better",
            Preference::Direct => "direct-link listening is better",
            Preference::Equal => "both choices are equal",
        })
    }
}

/// Listening to the other relay (mbar = theta) vs the own relay (nbar = theta).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyChoice {
    pub theta: u32,
    pub cross: RateBundle,
    pub direct: RateBundle,
    pub preference: Preference,
    /// Whether the expected dominance holds: cross >= direct in WEAK, direct >= cross
    /// in STRONG; `None` in MID or degenerate points.
    pub expected_dominance: Option<bool>,
}

pub fn frequency_choice_report(theta: u32, m: u32, n: u32, f: u32) -> FrequencyChoice {
    let cross = rate_bundle(&ChannelParams { m, n, mbar: theta, nbar: 0, f });
    let direct = rate_bundle(&ChannelParams { m, n, mbar: 0, nbar: theta, f });
    let preference = match cross.inner.cmp(&direct.inner) {
        std::cmp::Ordering::Greater => Preference::Cross,
        std::cmp::Ordering::Less => Preference::Direct,
        std::cmp::Ordering::Equal => Preference::Equal,
    };
    let expected_dominance = if cross.regimes.contains(Regime::Weak) {
        Some(cross.inner >= direct.inner)
    } else if cross.regimes.contains(Regime::Strong) {
        Some(direct.inner >= cross.inner)
    } else {
        None
    };
    FrequencyChoice { theta, cross, direct, preference, expected_dominance }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!("0..8".parse::<IntRange>().unwrap(), IntRange { lo: 0, hi: 8 });
        assert_eq!("3".parse::<IntRange>().unwrap(), IntRange::single(3));
        assert_eq!("2..=5".parse::<IntRange>().unwrap(), IntRange { lo: 2, hi: 5 });
        assert!("5..2".parse::<IntRange>().is_err());
        assert!("x".parse::<IntRange>().is_err());
    }

    #[test]
    fn grid_parsing_overrides_defaults() {
        let g: Grid = "m=1..2, f=3".parse().unwrap();
        assert_eq!(g.m, IntRange { lo: 1, hi: 2 });
        assert_eq!(g.f, IntRange::single(3));
        assert_eq!(g.n, Grid::default().n);
        assert!("q=1".parse::<Grid>().is_err());
        assert!("m".parse::<Grid>().is_err());
    }

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
        }
        assert_eq!("corollary1".parse::<Check>().unwrap(), Check::BoundsMatch);
    }

    #[test]
    fn single_point_sweep_evaluates_one_tuple() {
        let p = ChannelParams { m: 2, n: 4, mbar: 1, nbar: 1, f: 3 };
        let spec = SweepSpec { grid: Grid::point(&p), ..SweepSpec::default() };
        let r = sweep(&spec).unwrap();
        assert_eq!(r.points, 1);
        assert!(r.passed());
    }

    #[test]
    fn rounding_alpha_to_grid() {
        let rows = compare_curves(3, 0, 0, 9, &[Ratio::new(1, 2), Ratio::new(1, 3)]).unwrap();
        assert_eq!(rows[0].m, 2);
        assert_eq!(rows[1].m, 1);
        assert!(compare_curves(0, 0, 0, 1, &[Ratio::new(1, 1)]).is_err());
    }

    #[test]
    fn frequency_choice_examples() {
        let w = frequency_choice_report(1, 2, 4, 10);
        assert_eq!(w.expected_dominance, Some(true));
        assert!(w.cross.inner >= w.direct.inner);
        let s = frequency_choice_report(1, 4, 1, 10);
        assert_eq!(s.expected_dominance, Some(true));
        assert!(s.direct.inner >= s.cross.inner);
        let z = frequency_choice_report(0, 2, 4, 10);
        assert_eq!(z.preference, Preference::Equal);
    }
}
