use std::collections::BTreeSet;

use num_rational::Ratio;
use overhear::sweep::*;
use overhear::{ChannelParams, Error, Regime};

fn cp(m: u32, n: u32, f: u32, mbar: u32, nbar: u32) -> ChannelParams {
    ChannelParams { m, n, mbar, nbar, f }
}

#[test]
fn curves_show_a_weak_region_where_overheard_matches_dedicated() {
    let rows = compare_curves(4, 2, 2, 12, &default_alpha_grid(4)).unwrap();
    assert_eq!(rows.len(), 13);
    let hits: Vec<_> =
        rows.iter().filter(|r| r.regimes.contains(Regime::Weak) && r.ofb_eq_dfb() && r.dfb > r.nofb).collect();
    assert!(!hits.is_empty());
    // m = 1, n = 4: without feedback the sum is 2(n - m) = 6, with it 2n - m = 7
    let r = rows.iter().find(|r| r.m == 1).unwrap();
    assert_eq!((r.ofb_inner, r.dfb, r.nofb), (7, 7, 6));
    let r = rows.iter().find(|r| r.m == 2).unwrap();
    assert_eq!((r.ofb_inner, r.dfb), (6, 6));
    assert!(r.nofb < 6);
}

#[test]
fn small_relay_link_makes_all_curves_coincide() {
    let rows = compare_curves(4, 2, 2, 1, &default_alpha_grid(4)).unwrap();
    for r in rows.iter().filter(|r| r.m > 0) {
        assert!(r.all_equal(), "{r:?}");
        assert_eq!(r.ofb_inner, 2);
    }
}

#[test]
fn zero_interference_point() {
    for (n, f) in [(4, 12), (4, 3), (3, 1)] {
        let rows = compare_curves(n, 1, 1, f, &[Ratio::from_integer(0)]).unwrap();
        assert_eq!(rows[0].m, 0);
        assert_eq!(rows[0].ofb_inner, (2 * n).min(2 * f));
        assert_eq!(rows[0].ofb_outer, rows[0].ofb_inner);
    }
}

#[test]
fn alpha_rounds_half_up() {
    let rows = compare_curves(4, 1, 1, 8, &[Ratio::new(3, 8), Ratio::new(5, 8), Ratio::new(1, 3)]).unwrap();
    assert_eq!(rows.iter().map(|r| r.m).collect::<Vec<_>>(), vec![2, 3, 1]);
    assert!(matches!(compare_curves(0, 1, 1, 8, &[Ratio::from_integer(1)]), Err(Error::Domain(_))));
}

#[test]
fn curves_csv_layout() {
    let rows = compare_curves(3, 1, 1, 4, &default_alpha_grid(3)).unwrap();
    let text = curves_csv(&rows).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha,alpha_approx,m,regime,ofb_inner,ofb_outer,dfb_reference,nofb_reference,ofb_eq_dfb,all_equal"
    );
    assert_eq!(lines.clone().count(), 10);
    assert!(lines.next().unwrap().starts_with("0,0.0000,0,WEAK,"));
    assert!(text.contains("\n2/3,0.6667,2,WEAK+MID,"));
}

#[test]
fn grid_csv_single_point() {
    let text = grid_csv(&Grid::point(&cp(2, 4, 3, 0, 4))).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("m,n,mbar,nbar,f,regime,outer,inner,gap"));
    assert!(lines[1].starts_with("2,4,0,4,3,WEAK,6,6,0,true,"));
}

#[test]
fn listening_choice_follows_the_regime() {
    let weak = frequency_choice_report(1, 2, 4, 3);
    assert_eq!((weak.cross.inner, weak.direct.inner), (6, 5));
    assert_eq!(weak.preference, Preference::Cross);
    assert_eq!(weak.expected_dominance, Some(true));

    let strong = frequency_choice_report(1, 4, 1, 2);
    assert_eq!((strong.cross.inner, strong.direct.inner), (2, 3));
    assert_eq!(strong.preference, Preference::Direct);
    assert_eq!(strong.expected_dominance, Some(true));

    let none = frequency_choice_report(0, 4, 1, 2);
    assert_eq!(none.preference, Preference::Equal);
    assert_eq!(frequency_choice_report(1, 3, 3, 4).expected_dominance, None);
}

#[test]
fn sweep_is_deterministic() {
    let spec = SweepSpec {
        grid: "m=0..4,n=0..4,mbar=0..2,nbar=0..2,f=0..4".parse().unwrap(),
        checks: Check::ALL.into_iter().collect(),
        scheme_packets: 8,
        sample: Some(Sample { size: 10, seed: 3 }),
        ..SweepSpec::default()
    };
    let a = sweep(&spec).unwrap();
    let b = sweep(&spec).unwrap();
    assert_eq!(a, b);
    assert!(a.passed());
    assert_eq!(a.points, 5 * 5 * 3 * 3 * 5);
    assert!(a.to_string().ends_with("0 counterexamples\n") || a.to_string().ends_with("0 counterexamples"));
}

#[test]
fn simulation_checks_need_enough_packets() {
    let spec = SweepSpec {
        grid: Grid::point(&cp(2, 4, 3, 1, 1)),
        checks: BTreeSet::from([Check::SchemeVsFormula]),
        scheme_packets: 7,
        ..SweepSpec::default()
    };
    assert!(matches!(sweep(&spec), Err(Error::Domain(_))));
}

#[test]
fn counterexample_lines_carry_a_replay_command() {
    let c = Counterexample {
        check: Check::InnerLeOuter,
        params: cp(1, 2, 3, 0, 1),
        lhs: "inner=5".into(),
        rhs: "outer=4".into(),
        replay: "overhear rates --m 1 --n 2 --mbar 0 --nbar 1 --f 3".into(),
    };
    assert_eq!(
        c.to_string(),
        "INNER_LE_OUTER at m=1 n=2 mbar=0 nbar=1 f=3: inner=5 vs outer=4\n  replay: overhear rates --m 1 --n 2 --mbar 0 --nbar 1 --f 3"
    );
}

#[test]
fn open_regime_gaps_are_histogrammed() {
    let spec = SweepSpec { grid: "m=0..3,n=4..6,mbar=0..2,nbar=0..4".parse().unwrap(), ..SweepSpec::default() };
    let r = sweep(&spec).unwrap();
    assert!(r.passed());
    let open: u64 = r.gap_histogram.values().sum();
    assert!(open > 0);
    assert!(r.gap_histogram.keys().any(|g| *g > 0));
}
