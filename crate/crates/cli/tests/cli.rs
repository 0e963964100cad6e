use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn overhear(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_overhear"))
        .args(args)
        .env_remove("OVERHEAR_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compare stdout with a golden file; `OVERHEAR_UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str], code: i32) {
    let out = overhear(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let path = golden_path(name);
    if std::env::var_os("OVERHEAR_UPDATE_GOLDEN").is_some() {
        fs::write(&path, &text).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(text, want, "output of {args:?} differs from {name}");
}

#[test]
fn rates_weak_example() {
    golden("rates_weak.txt", &["rates", "--m", "2", "--n", "4", "--mbar", "1", "--nbar", "1", "--f", "3"], 0);
}

#[test]
fn rates_degenerate() {
    golden("rates_degenerate.txt", &["rates", "--m", "0", "--n", "0", "--f", "5"], 0);
}

#[test]
fn rates_open_regime_without_cross_link() {
    golden("rates_open_mbar0.txt", &["rates", "--m", "2", "--n", "4", "--mbar", "0", "--nbar", "2", "--f", "9"], 0);
}

#[test]
fn rates_open_regime_with_cross_link() {
    golden("rates_open_mbar1.txt", &["rates", "--m", "2", "--n", "4", "--mbar", "1", "--nbar", "2", "--f", "9"], 0);
}

#[test]
fn rates_csv() {
    golden(
        "rates_strong.csv",
        &["rates", "--m", "4", "--n", "1", "--mbar", "1", "--nbar", "3", "--f", "2", "--format", "csv"],
        0,
    );
}

#[test]
fn simulate_weak_feedback() {
    golden(
        "simulate_fbxw.txt",
        &[
            "simulate",
            "--scheme",
            "fbxw",
            "--m",
            "2",
            "--n",
            "4",
            "--mbar",
            "1",
            "--nbar",
            "1",
            "--f",
            "3",
            "--packets",
            "100",
        ],
        0,
    );
}

#[test]
fn simulate_strong_rate_splitting() {
    golden(
        "simulate_rss.txt",
        &[
            "simulate",
            "--scheme",
            "rss",
            "--m",
            "4",
            "--n",
            "1",
            "--mbar",
            "1",
            "--nbar",
            "3",
            "--f",
            "2",
            "--packets",
            "100",
        ],
        0,
    );
}

#[test]
fn simulate_no_feedback() {
    golden(
        "simulate_nofb.txt",
        &["simulate", "--scheme", "nofb_mid", "--m", "3", "--n", "3", "--f", "10", "--packets", "20"],
        0,
    );
}

#[test]
fn simulate_trace_export() {
    golden(
        "trace_rsw.txt",
        &[
            "simulate",
            "--scheme",
            "rsw",
            "--m",
            "2",
            "--n",
            "4",
            "--nbar",
            "1",
            "--f",
            "3",
            "--packets",
            "8",
            "--format",
            "trace",
        ],
        0,
    );
}

#[test]
fn simulate_injected_fault_fails_verification() {
    golden(
        "simulate_fault.txt",
        &[
            "simulate",
            "--scheme",
            "fbxw",
            "--m",
            "2",
            "--n",
            "4",
            "--mbar",
            "1",
            "--nbar",
            "1",
            "--f",
            "3",
            "--packets",
            "12",
            "--inject-fault",
            "10:R1:2",
        ],
        1,
    );
}

#[test]
fn sweep_default_grid() {
    golden("sweep_default.txt", &["sweep"], 0);
}

#[test]
fn sweep_with_simulations() {
    golden(
        "sweep_small.txt",
        &[
            "sweep",
            "--grid",
            "m=0..4,n=0..4,mbar=0..2,nbar=0..2,f=0..4",
            "--checks",
            "all",
            "--packets",
            "8",
            "--sample",
            "10",
        ],
        0,
    );
}

#[test]
fn sweep_csv() {
    golden("sweep_point.csv", &["sweep", "--grid", "m=2,n=4,mbar=0..1,nbar=1,f=3", "--format", "csv"], 0);
}

#[test]
fn compare_wide_relay_link() {
    golden("compare_f12.csv", &["compare", "--n", "4", "--f", "12", "--mbar", "2", "--nbar", "2"], 0);
}

#[test]
fn compare_narrow_relay_link() {
    golden(
        "compare_f1.txt",
        &["compare", "--n", "4", "--f", "1", "--mbar", "2", "--nbar", "2", "--format", "human"],
        0,
    );
}

#[test]
fn freq_choice_weak_and_strong() {
    golden("freq_weak.txt", &["freq-choice", "--theta", "2", "--m", "2", "--n", "4", "--f", "3"], 0);
    golden("freq_strong.txt", &["freq-choice", "--theta", "1", "--m", "4", "--n", "1", "--f", "2"], 0);
}

#[test]
fn exit_codes() {
    assert_eq!(overhear(&["rates", "--m", "x"]).status.code(), Some(2));
    assert_eq!(overhear(&["bogus"]).status.code(), Some(2));
    assert_eq!(overhear(&["simulate", "--m", "2"]).status.code(), Some(2));
    assert_eq!(overhear(&["sweep", "--checks", "NOPE"]).status.code(), Some(2));
    assert_eq!(overhear(&["rates", "--format", "trace"]).status.code(), Some(2));
    let regime = overhear(&["simulate", "--scheme", "rss", "--m", "2", "--n", "4", "--f", "3"]);
    assert_eq!(regime.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&regime.stderr).contains("STRONG"));
    assert_eq!(
        overhear(&["simulate", "--scheme", "fbxw", "--m", "2", "--n", "4", "--f", "3", "--packets", "2"]).status.code(),
        Some(3)
    );
    assert_eq!(overhear(&["compare", "--n", "0"]).status.code(), Some(3));
    assert_eq!(overhear(&["sweep", "--checks", "SCHEME_VS_FORMULA", "--packets", "4"]).status.code(), Some(3));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "simulate",
        "--scheme",
        "rss",
        "--m",
        "5",
        "--n",
        "1",
        "--mbar",
        "2",
        "--nbar",
        "3",
        "--f",
        "4",
        "--packets",
        "10",
        "--seed",
        "5",
        "--format",
        "trace",
    ];
    assert_eq!(overhear(&args).stdout, overhear(&args).stdout);
    let other = [
        "simulate",
        "--scheme",
        "rss",
        "--m",
        "5",
        "--n",
        "1",
        "--mbar",
        "2",
        "--nbar",
        "3",
        "--f",
        "4",
        "--packets",
        "10",
        "--seed",
        "6",
        "--format",
        "trace",
    ];
    assert_ne!(overhear(&args).stdout, overhear(&other).stdout);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("point.conf");
    fs::write(&cfg, "# weak example\nm = 2\nn = 4\nmbar = 1\nnbar = 1\nf = 3\n").unwrap();
    let from_file = overhear(&["rates", "--config", cfg.to_str().unwrap()]);
    assert_eq!(from_file.stdout, fs::read(golden_path("rates_weak.txt")).unwrap());
    let overridden = overhear(&["rates", "--config", cfg.to_str().unwrap(), "--mbar", "0"]);
    assert!(String::from_utf8_lossy(&overridden.stdout).contains("params: m=2 n=4 mbar=0 nbar=1 f=3"));

    let grid = dir.path().join("grid.conf");
    fs::write(&grid, "m = 0..3\nn = 2..4\nf = 1..2\nchecks = formula\n").unwrap();
    let out = overhear(&["sweep", "--config", grid.to_str().unwrap(), "--grid", "f=3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("grid: m=0..3,n=2..4,mbar=0..4,nbar=0..4,f=3..3\n"), "{text}");

    fs::write(&grid, "packets = 12\n").unwrap();
    assert_eq!(overhear(&["rates", "--config", grid.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_overhear")).args(args).env("OVERHEAR_OUT_DIR", dir.path()).output().unwrap()
    };
    let out = run(&[
        "simulate",
        "--scheme",
        "fbxw",
        "--m",
        "2",
        "--n",
        "4",
        "--mbar",
        "1",
        "--nbar",
        "1",
        "--f",
        "3",
        "--packets",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let trace = dir.path().join("fbxw_m2_n4_mbar1_nbar1_f3_p8_seed1.trace");
    let text = fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("# scheme FBXW\n"));
    assert!(String::from_utf8_lossy(&out.stdout).contains(&format!("trace: {}", trace.display())));

    let out = run(&["compare", "--n", "2", "--f", "2", "--out", "curves/c.csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(fs::read_to_string(dir.path().join("curves/c.csv")).unwrap().starts_with("alpha,"));
}
