//! `overhear`: rates, simulations, sweeps and comparison curves for the
//! two-hop interference network with overheard feedback.

mod config;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use overhear::rates::fmt_half;
use overhear::schemes::{run_scheme, run_scheme_with_fault, verify_trace, Fault, NodeId, Scheme};
use overhear::sweep::{
    compare_curves, curves_csv, default_alpha_grid, frequency_choice_report, grid_csv, sweep, Check, CurveRow,
    FrequencyChoice, Grid, IntRange, Sample, SweepSpec, DEFAULT_SAMPLE_SEED,
};
use overhear::{rate_bundle, ChannelParams, RateBundle};

use config::Config;

/// Payload seed used when `--seed` is not given.
const DEFAULT_SEED: u64 = 1;
const DEFAULT_PACKETS: u32 = 100;
const DEFAULT_SWEEP_PACKETS: u32 = 16;
const DEFAULT_SAMPLE_SIZE: usize = 200;
const DEFAULT_THETA_MAX: u32 = 4;
const OUT_DIR_ENV: &str = "OVERHEAR_OUT_DIR";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Model(overhear::Error),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(overhear::Error::Domain(_) | overhear::Error::Regime(_)) => 3,
            CliError::Model(overhear::Error::Internal(_)) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<overhear::Error> for CliError {
    fn from(e: overhear::Error) -> Self {
        CliError::Model(e)
    }
}

#[derive(Parser)]
#[command(
    name = "overhear",
    version,
    about = "Sum-rate bounds and scheme simulations for two-hop interference networks with overheard feedback"
)]
struct Cli {
    /// File of `key = value` lines; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outer bound, inner bound, every min-term and the reference curves at one point.
    Rates {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scheme bit by bit, verify the trace and compare the rate with its closed form.
    Simulate {
        /// fbxw, rsw, rss or nofb_mid.
        #[arg(long)]
        scheme: Option<Scheme>,
        #[command(flatten)]
        params: ParamArgs,
        /// Packets per source (default 100, at least 4).
        #[arg(long)]
        packets: Option<u32>,
        /// Payload seed (default 1).
        #[arg(long)]
        seed: Option<u64>,
        /// Trace file; defaults to a generated name under $OVERHEAR_OUT_DIR when that is set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `human` prints a summary, `trace` prints the full trace.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Flip one transmitted bit, given as SLOT:NODE:LEVEL (e.g. 10:R1:2).
        #[arg(long, value_parser = parse_fault)]
        inject_fault: Option<Fault>,
    },
    /// Evaluate checks over a parameter grid and report counterexamples.
    Sweep {
        /// Ranges such as `m=0..8,nbar=2,f=1..=4`; unnamed parameters keep their defaults.
        #[arg(long)]
        grid: Option<String>,
        /// Comma-separated check names, `formula` or `all`.
        #[arg(long)]
        checks: Option<String>,
        /// Packets per simulation for SCHEME_VS_FORMULA.
        #[arg(long)]
        packets: Option<u32>,
        /// Payload seed for simulations.
        #[arg(long)]
        seed: Option<u64>,
        /// In-regime points simulated per scheme; 0 simulates all of them.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long)]
        sample_seed: Option<u64>,
        /// Largest listening strength for FREQUENCY_CHOICE.
        #[arg(long)]
        theta: Option<u32>,
        /// `human` prints the report, `csv` prints one row per grid point (report on stderr).
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Overheard vs dedicated vs no feedback along alpha = m/n.
    Compare {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        mbar: Option<u32>,
        #[arg(long)]
        nbar: Option<u32>,
        #[arg(long)]
        f: Option<u32>,
        /// Comma-separated alphas like `0,1/2,2/3`; defaults to k/n for k = 0..=3n.
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Whether sources should listen to the cross relay or the direct relay.
    FreqChoice {
        #[arg(long)]
        theta: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        f: Option<u32>,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Cross-link levels in the first hop.
    #[arg(long)]
    m: Option<u32>,
    /// Direct-link levels in the first hop.
    #[arg(long)]
    n: Option<u32>,
    /// Levels a source overhears from the other relay.
    #[arg(long)]
    mbar: Option<u32>,
    /// Levels a source overhears from its own relay.
    #[arg(long)]
    nbar: Option<u32>,
    /// Relay-to-destination levels.
    #[arg(long)]
    f: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Csv,
    Trace,
}

const PARAM_KEYS: [&str; 5] = ["m", "n", "mbar", "nbar", "f"];

fn parse_fault(s: &str) -> Result<Fault, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [slot, node, level] = parts[..] else {
        return Err("expected SLOT:NODE:LEVEL".into());
    };
    let node = match node.to_ascii_uppercase().as_str() {
        "S1" => NodeId::S1,
        "S2" => NodeId::S2,
        "R1" => NodeId::R1,
        "R2" => NodeId::R2,
        other => return Err(format!("node {other:?} is not a transmitter (S1, S2, R1, R2)")),
    };
    let slot = slot.parse().map_err(|e| format!("slot: {e}"))?;
    let level = level.parse().map_err(|e| format!("level: {e}"))?;
    Ok(Fault { slot, node, level })
}

fn params(args: &ParamArgs, cfg: &Config) -> Result<ChannelParams, CliError> {
    let get = |flag: Option<u32>, key| cfg.pick(flag, key).map(|v| v.unwrap_or(0));
    Ok(ChannelParams {
        m: get(args.m, "m")?,
        n: get(args.n, "n")?,
        mbar: get(args.mbar, "mbar")?,
        nbar: get(args.nbar, "nbar")?,
        f: get(args.f, "f")?,
    })
}

fn format(flag: Option<Format>, cfg: &Config, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let fmt = match flag {
        Some(f) => f,
        None => match cfg.raw("format") {
            Some(v) => Format::from_str(v, true).map_err(|e| CliError::Usage(format!("config key format: {e}")))?,
            None => default,
        },
    };
    if !allowed.contains(&fmt) {
        let name = fmt.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        return Err(CliError::Usage(format!("--format {name} is not available for this command")));
    }
    Ok(fmt)
}

/// Relative paths land under $OVERHEAR_OUT_DIR when it is set.
fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Print to stdout, or write to `out` and say so.
fn emit(text: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let path = resolve_out(&path);
            write_file(&path, text)?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn render_bundle(b: &RateBundle) -> String {
    let mut s = String::new();
    let yes_no = |v: bool| if v { "yes" } else { "no" };
    let _ = writeln!(s, "params: {}", b.params);
    let _ = writeln!(s, "regime: {}", b.regimes);
    let _ = writeln!(s, "outer bound: {}", b.outer);
    let _ = writeln!(s, "inner bound: {}", b.inner);
    let _ = writeln!(s, "gap: {}", b.gap());
    let _ = writeln!(s, "matches: {}", yes_no(b.matches));
    let _ = writeln!(s, "open regime: {}", yes_no(b.open_regime));
    match b.capacity_mbar0 {
        Some(c) => {
            let _ = writeln!(s, "capacity (mbar = 0): {c}");
        }
        None => {
            let _ = writeln!(s, "capacity (mbar = 0): not applicable");
        }
    }
    let _ = writeln!(
        s,
        "aux: f_star={} f_prime={} delta0={}",
        fmt_half(b.aux.f_star),
        fmt_half(b.aux.f_prime),
        b.aux.delta0
    );
    let _ =
        writeln!(s, "reference envelopes: dedicated feedback {}, no feedback {}", b.dfb_reference, b.nofb_reference);
    let _ = writeln!(s, "terms:");
    let width = b.components.keys().map(String::len).max().unwrap_or(0);
    for (name, v) in &b.components {
        let _ = writeln!(s, "  {name:<width$} = {v}");
    }
    s
}

fn cmd_rates(args: ParamArgs, fmt: Option<Format>, out: Option<PathBuf>, cfg: &Config) -> Result<ExitCode, CliError> {
    let p = params(&args, cfg)?;
    let text = match format(fmt, cfg, Format::Human, &[Format::Human, Format::Csv])? {
        Format::Csv => grid_csv(&Grid::point(&p))?,
        _ => render_bundle(&rate_bundle(&p)),
    };
    emit(&text, cfg.pick(out, "out")?)?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    scheme: Option<Scheme>,
    args: ParamArgs,
    packets: Option<u32>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    fmt: Option<Format>,
    fault: Option<Fault>,
    cfg: &Config,
) -> Result<ExitCode, CliError> {
    let scheme = cfg
        .pick(scheme, "scheme")?
        .ok_or_else(|| CliError::Usage("--scheme is required (fbxw, rsw, rss, nofb_mid)".into()))?;
    let p = params(&args, cfg)?;
    let packets = cfg.pick(packets, "packets")?.unwrap_or(DEFAULT_PACKETS);
    let seed = cfg.pick(seed, "seed")?.unwrap_or(DEFAULT_SEED);
    let fmt = format(fmt, cfg, Format::Human, &[Format::Human, Format::Trace])?;

    let trace = match fault {
        Some(fl) => run_scheme_with_fault(scheme, &p, packets, seed, fl)?,
        None => run_scheme(scheme, &p, packets, seed)?,
    };
    let report = verify_trace(&trace);
    let formula = scheme.closed_form_rate(&p);
    let steady = trace.steady_state_rate();
    let rate_ok = steady == Ratio::from_integer(u64::from(formula));
    let ok = report.passed() && rate_ok;

    let out = match cfg.pick(out, "out")? {
        Some(path) => Some(resolve_out(&path)),
        None => std::env::var_os(OUT_DIR_ENV).map(|dir| {
            let name = format!(
                "{}_m{}_n{}_mbar{}_nbar{}_f{}_p{packets}_seed{seed}.trace",
                scheme.to_string().to_ascii_lowercase(),
                p.m,
                p.n,
                p.mbar,
                p.nbar,
                p.f
            );
            Path::new(&dir).join(name)
        }),
    };
    if let Some(path) = &out {
        write_file(path, &trace.export())?;
    }

    if fmt == Format::Trace {
        print!("{}", trace.export());
        return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
    }
    let th = &trace.throughput;
    println!("scheme: {scheme}");
    println!("params: {p}");
    println!("layout: {}", trace.layout);
    println!("packets: {packets}, seed: {seed}, slots: {} (budget {})", th.slots, 2 * packets + 4);
    println!("delivered: d1={} d2={}", th.delivered[0], th.delivered[1]);
    println!("raw rate: {}", th.raw_rate);
    println!("steady-state rate: {steady} over slots {}..{}", th.window.0, th.window.1);
    println!("formula rate: {formula} ({})", if rate_ok { "equal" } else { "differs" });
    match report.first_failure() {
        None => println!("verify: pass"),
        Some(first) => {
            println!("verify: FAIL ({} issues)", report.issues.len());
            println!("first failure: {first}");
        }
    }
    if let Some(path) = &out {
        println!("trace: {}", path.display());
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_checks(s: &str) -> Result<BTreeSet<Check>, CliError> {
    match s.trim() {
        "all" => Ok(Check::ALL.into_iter().collect()),
        "formula" => Ok(Check::formula_checks()),
        list => list.split(',').map(|c| c.parse::<Check>().map_err(|e| CliError::Usage(e.to_string()))).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    grid: Option<String>,
    checks: Option<String>,
    packets: Option<u32>,
    seed: Option<u64>,
    sample: Option<usize>,
    sample_seed: Option<u64>,
    theta: Option<u32>,
    fmt: Option<Format>,
    out: Option<PathBuf>,
    cfg: &Config,
) -> Result<ExitCode, CliError> {
    let usage = |e: overhear::Error| CliError::Usage(e.to_string());
    let mut g = Grid::default();
    for key in PARAM_KEYS {
        if let Some(v) = cfg.raw(key) {
            g.set(key, v.parse::<IntRange>().map_err(usage)?).map_err(usage)?;
        }
    }
    for text in [cfg.raw("grid").map(str::to_string), grid].into_iter().flatten() {
        for part in text.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("grid entry {part:?} is not name=range")))?;
            g.set(k.trim(), v.trim().parse().map_err(usage)?).map_err(usage)?;
        }
    }
    let checks = match cfg.pick(checks, "checks")? {
        Some(c) => parse_checks(&c)?,
        None => Check::formula_checks(),
    };
    let size = cfg.pick(sample, "sample")?.unwrap_or(DEFAULT_SAMPLE_SIZE);
    let spec = SweepSpec {
        grid: g,
        checks,
        scheme_packets: cfg.pick(packets, "packets")?.unwrap_or(DEFAULT_SWEEP_PACKETS),
        sample: (size > 0)
            .then(|| -> Result<Sample, CliError> {
                Ok(Sample { size, seed: cfg.pick(sample_seed, "sample_seed")?.unwrap_or(DEFAULT_SAMPLE_SEED) })
            })
            .transpose()?,
        seed: cfg.pick(seed, "seed")?.unwrap_or(DEFAULT_SEED),
        theta_max: cfg.pick(theta, "theta")?.unwrap_or(DEFAULT_THETA_MAX),
    };
    let fmt = format(fmt, cfg, Format::Human, &[Format::Human, Format::Csv])?;
    let report = sweep(&spec)?;
    let summary = format!("grid: {}\n{report}", spec.grid);
    match fmt {
        Format::Csv => {
            eprint!("{summary}");
            emit(&grid_csv(&spec.grid)?, cfg.pick(out, "out")?)?;
        }
        _ => emit(&summary, cfg.pick(out, "out")?)?,
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_alpha(s: &str) -> Result<Ratio<u32>, CliError> {
    let bad = || CliError::Usage(format!("alpha {s:?} is not a non-negative fraction"));
    let (num, den) = s.trim().split_once('/').unwrap_or((s.trim(), "1"));
    let num: u32 = num.trim().parse().map_err(|_| bad())?;
    let den: u32 = den.trim().parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(num, den))
}

fn curves_table(rows: &[CurveRow]) -> String {
    let mut s = format!(
        "{:>6} {:>3} {:<11} {:>9} {:>9} {:>4} {:>5}  notes\n",
        "alpha", "m", "regime", "ofb_inner", "ofb_outer", "dfb", "nofb"
    );
    for r in rows {
        let note = if r.all_equal() {
            "all equal"
        } else if r.ofb_eq_dfb() {
            "ofb = dfb"
        } else {
            ""
        };
        let _ = writeln!(
            s,
            "{:>6} {:>3} {:<11} {:>9} {:>9} {:>4} {:>5}  {note}",
            r.alpha.to_string(),
            r.m,
            r.regimes.to_string(),
            r.ofb_inner,
            r.ofb_outer,
            r.dfb,
            r.nofb
        );
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn cmd_compare(
    n: Option<u32>,
    mbar: Option<u32>,
    nbar: Option<u32>,
    f: Option<u32>,
    alphas: Option<String>,
    fmt: Option<Format>,
    out: Option<PathBuf>,
    cfg: &Config,
) -> Result<ExitCode, CliError> {
    let n = cfg.pick(n, "n")?.ok_or_else(|| CliError::Usage("--n is required".into()))?;
    let get = |flag: Option<u32>, key| cfg.pick(flag, key).map(|v| v.unwrap_or(0));
    let (mbar, nbar, f) = (get(mbar, "mbar")?, get(nbar, "nbar")?, get(f, "f")?);
    let alphas = match cfg.pick(alphas, "alphas")? {
        Some(list) => list.split(',').map(parse_alpha).collect::<Result<Vec<_>, _>>()?,
        None => default_alpha_grid(n),
    };
    let rows = compare_curves(n, mbar, nbar, f, &alphas)?;
    let text = match format(fmt, cfg, Format::Csv, &[Format::Human, Format::Csv])? {
        Format::Human => curves_table(&rows),
        _ => curves_csv(&rows)?,
    };
    emit(&text, cfg.pick(out, "out")?)?;
    Ok(ExitCode::SUCCESS)
}

fn render_choice(c: &FrequencyChoice) -> String {
    let p = &c.cross.params;
    let mut s = String::new();
    let _ = writeln!(s, "channel: m={} n={} f={} regime {}", p.m, p.n, p.f, c.cross.regimes);
    let _ = writeln!(
        s,
        "listen to cross relay (mbar={}, nbar=0): inner {}, outer {}",
        c.theta, c.cross.inner, c.cross.outer
    );
    let _ = writeln!(
        s,
        "listen to direct relay (mbar=0, nbar={}): inner {}, outer {}",
        c.theta, c.direct.inner, c.direct.outer
    );
    let _ = writeln!(s, "choice: {}", c.preference);
    let _ = writeln!(
        s,
        "expected dominance: {}",
        match c.expected_dominance {
            Some(true) => "holds",
            Some(false) => "VIOLATED",
            None => "not asserted in this regime",
        }
    );
    s
}

fn cmd_freq_choice(
    theta: Option<u32>,
    m: Option<u32>,
    n: Option<u32>,
    f: Option<u32>,
    cfg: &Config,
) -> Result<ExitCode, CliError> {
    let get = |flag: Option<u32>, key| cfg.pick(flag, key).map(|v| v.unwrap_or(0));
    let c = frequency_choice_report(get(theta, "theta")?, get(m, "m")?, get(n, "n")?, get(f, "f")?);
    print!("{}", render_choice(&c));
    Ok(if c.expected_dominance == Some(false) { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let path = cli.config.as_deref();
    match cli.command {
        Command::Rates { params, format, out } => {
            let cfg = Config::load(path, &["m", "n", "mbar", "nbar", "f", "format", "out"])?;
            cmd_rates(params, format, out, &cfg)
        }
        Command::Simulate { scheme, params, packets, seed, out, format, inject_fault } => {
            let cfg =
                Config::load(path, &["scheme", "m", "n", "mbar", "nbar", "f", "packets", "seed", "out", "format"])?;
            cmd_simulate(scheme, params, packets, seed, out, format, inject_fault, &cfg)
        }
        Command::Sweep { grid, checks, packets, seed, sample, sample_seed, theta, format, out } => {
            let cfg = Config::load(
                path,
                &[
                    "grid",
                    "m",
                    "n",
                    "mbar",
                    "nbar",
                    "f",
                    "checks",
                    "packets",
                    "seed",
                    "sample",
                    "sample_seed",
                    "theta",
                    "format",
                    "out",
                ],
            )?;
            cmd_sweep(grid, checks, packets, seed, sample, sample_seed, theta, format, out, &cfg)
        }
        Command::Compare { n, mbar, nbar, f, alphas, format, out } => {
            let cfg = Config::load(path, &["n", "mbar", "nbar", "f", "alphas", "format", "out"])?;
            cmd_compare(n, mbar, nbar, f, alphas, format, out, &cfg)
        }
        Command::FreqChoice { theta, m, n, f } => {
            let cfg = Config::load(path, &["theta", "m", "n", "f"])?;
            cmd_freq_choice(theta, m, n, f, &cfg)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
