//! `lowdeg`: Remez certificates, BH scans, learners and L2DI checks.
//!
//! Exit codes: 0 success, 1 a guarantee or assertion was violated, 2 usage
//! error (including arguments the library rejects).

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use lowdeg::bh::{self, BhSetting};
use lowdeg::cyclic_fourier::{random_low_degree, SampleSet};
use lowdeg::l2di::{self, MuSpec};
use lowdeg::learn::{self, LearnerConfig};
use lowdeg::linalg::{self, CMatrix};
use lowdeg::qudit_algebra::{random_gm_observable, BasisKind, GellMannIndex, HWIndex, Observable};
use lowdeg::remez;
use lowdeg::rng;

#[derive(Parser, Debug, Serialize)]
#[command(name = "lowdeg", version, about = "Low-degree learning, Remez certificates and BH scans on Z_K^n and qudits")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write report.json (and report.csv with --csv) plus manifest.json here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Export tabular results as CSV.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
enum Command {
    /// Learning algorithms.
    #[command(subcommand)]
    Learn(LearnCmd),
    /// Remez machinery and certificates.
    #[command(subcommand)]
    Remez(RemezCmd),
    /// Bohnenblust–Hille scans.
    #[command(subcommand)]
    Bh(BhCmd),
    /// Twirl and truncation checks.
    #[command(subcommand)]
    L2di(L2diCmd),
    /// Print a single-qudit operator basis.
    Basis(BasisArgs),
}

#[derive(Subcommand, Debug, Serialize)]
enum LearnCmd {
    /// Learn a degree-d function on Z_K^n.
    Cyclic(CyclicArgs),
    /// Learn a degree-d observable from GM product-state expectations.
    Qudit(QuditArgs),
    /// Learn an arbitrary observable up to mean-squared error over L2DI states.
    Arbitrary(QuditArgs),
}

#[derive(Args, Debug, Serialize, Clone)]
struct CommonLearn {
    #[arg(long)]
    n: usize,
    #[arg(long = "K")]
    k: usize,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    delta: f64,
    /// BH-constant stand-in.
    #[arg(long = "B", default_value_t = 1.0)]
    b: f64,
    /// Override the sample budget.
    #[arg(long)]
    samples: Option<u64>,
    /// Override eta.
    #[arg(long)]
    eta: Option<f64>,
    /// Use a seeded random ground truth.
    #[arg(long, conflicts_with = "oracle")]
    synthetic: bool,
    /// Oracle file: samples (JSON lines) for cyclic, an observable (JSON) for qudit.
    #[arg(long)]
    oracle: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CyclicArgs {
    #[command(flatten)]
    common: CommonLearn,
}

#[derive(Args, Debug, Serialize)]
struct QuditArgs {
    #[command(flatten)]
    common: CommonLearn,
    /// Promised bound on the operator norm.
    #[arg(long, default_value_t = 1.0)]
    op_norm_bound: f64,
    /// Haar product states used to check the learned observable (arbitrary only).
    #[arg(long, default_value_t = 10_000)]
    check_trials: u64,
}

#[derive(Subcommand, Debug, Serialize)]
enum RemezCmd {
    /// Compare the torus and Omega_K^n sup norms of a random polynomial.
    Certify {
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Grid points for the torus search.
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        /// Number of random polynomials.
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Interpolation weights of z = exp(i theta).
    Weights {
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        theta: f64,
    },
    /// Vandermonde weights a_1..a_d.
    Vandermonde {
        #[arg(long)]
        d: usize,
    },
}

#[derive(Subcommand, Debug, Serialize)]
enum BhCmd {
    /// Max BH ratio over random degree-d instances.
    Scan {
        #[arg(long, value_enum)]
        setting: SettingArg,
        #[arg(long)]
        n: usize,
        #[arg(long = "K", default_value_t = 2)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[value(rename_all = "UPPER")]
enum SettingArg {
    Cube,
    Cyclic,
    Gm,
    Hw,
}

impl From<SettingArg> for BhSetting {
    fn from(s: SettingArg) -> Self {
        match s {
            SettingArg::Cube => BhSetting::Cube,
            SettingArg::Cyclic => BhSetting::Cyclic,
            SettingArg::Gm => BhSetting::Gm,
            SettingArg::Hw => BhSetting::Hw,
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
enum L2diCmd {
    /// Closed-form twirl against a Haar Monte-Carlo average.
    CheckTwirl {
        #[arg(long = "K")]
        k: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Random traceless Hermitian pairs.
        #[arg(long, default_value_t = 1)]
        pairs: usize,
    },
    /// Truncation error over Haar product states.
    Truncation {
        #[arg(long)]
        n: usize,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Observable JSON; a random Hermitian observable otherwise.
        #[arg(long)]
        observable: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Serialize)]
struct BasisArgs {
    #[arg(long = "K")]
    k: usize,
    #[arg(long, value_enum, default_value = "gm")]
    kind: KindArg,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
enum KindArg {
    Gm,
    Hw,
}

/// A finished run: the report, optional CSV, and whether every checked
/// guarantee held.
struct Run {
    report: Value,
    csv: Option<String>,
    ok: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl From<lowdeg::Error> for Failure {
    fn from(e: lowdeg::Error) -> Self {
        match e {
            lowdeg::Error::Io(e) => Failure::Io(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn to_value<T: Serialize>(t: &T) -> Result<Value, Failure> {
    Ok(serde_json::to_value(t)?)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = chrono::Utc::now();
    let clock = std::time::Instant::now();
    let run = match dispatch(&cli) {
        Ok(run) => run,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let text = serde_json::to_string_pretty(&run.report).expect("report serializes") + "\n";
    let emitted = match &cli.out {
        Some(dir) => write_outputs(dir, &cli, &argv, &run, &text, start, clock.elapsed().as_secs_f64()),
        None => {
            match (&run.csv, cli.csv) {
                (Some(csv), true) => print!("{csv}"),
                _ => print!("{text}"),
            }
            Ok(())
        }
    };
    if let Err(e) = emitted {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if run.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("guarantee violated; see report");
        ExitCode::from(1)
    }
}

fn write_outputs(
    dir: &Path,
    cli: &Cli,
    argv: &[String],
    run: &Run,
    text: &str,
    start: chrono::DateTime<chrono::Utc>,
    wall: f64,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let report = dir.join("report.json");
    std::fs::write(&report, text)?;
    let mut outputs = vec![report];
    if let (Some(csv), true) = (&run.csv, cli.csv) {
        let path = dir.join("report.csv");
        std::fs::write(&path, csv)?;
        outputs.push(path);
    }
    let m = manifest::RunManifest::new(cli_subcommand(&cli.command), argv, to_value(cli).unwrap_or(Value::Null), cli.seed, start, wall, &outputs);
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n")
}

fn cli_subcommand(c: &Command) -> String {
    match c {
        Command::Learn(LearnCmd::Cyclic(_)) => "learn cyclic",
        Command::Learn(LearnCmd::Qudit(_)) => "learn qudit",
        Command::Learn(LearnCmd::Arbitrary(_)) => "learn arbitrary",
        Command::Remez(RemezCmd::Certify { .. }) => "remez certify",
        Command::Remez(RemezCmd::Weights { .. }) => "remez weights",
        Command::Remez(RemezCmd::Vandermonde { .. }) => "remez vandermonde",
        Command::Bh(BhCmd::Scan { .. }) => "bh scan",
        Command::L2di(L2diCmd::CheckTwirl { .. }) => "l2di check-twirl",
        Command::L2di(L2diCmd::Truncation { .. }) => "l2di truncation",
        Command::Basis(_) => "basis",
    }
    .to_string()
}

fn dispatch(cli: &Cli) -> Result<Run, Failure> {
    let seed = cli.seed;
    match &cli.command {
        Command::Learn(cmd) => run_learn(cmd, seed),
        Command::Remez(cmd) => run_remez(cmd, seed),
        Command::Bh(BhCmd::Scan { setting, n, k, d, count }) => {
            let rep = bh::bh_scan((*setting).into(), *n, *k, *d, *count, seed)?;
            let mut buf = Vec::new();
            rep.write_csv(&mut buf)?;
            Ok(Run { ok: rep.within, report: to_value(&rep)?, csv: Some(String::from_utf8(buf).expect("csv is utf-8")) })
        }
        Command::L2di(cmd) => run_l2di(cmd, seed),
        Command::Basis(args) => run_basis(args),
    }
}

fn config_from(common: &CommonLearn, seed: u64, d: usize) -> LearnerConfig {
    let mut c = LearnerConfig::new(common.n, common.k, d, common.eps, common.delta, seed);
    c.bh_bound = common.b;
    c.samples = common.samples;
    c.eta = common.eta;
    c
}

fn require_source(common: &CommonLearn) -> Result<(), Failure> {
    if !common.synthetic && common.oracle.is_none() {
        return Err(Failure::Usage("one of --synthetic or --oracle is required".into()));
    }
    Ok(())
}

fn require_degree(common: &CommonLearn) -> Result<usize, Failure> {
    common.d.ok_or_else(|| Failure::Usage("--d is required".into()))
}

fn read_observable(path: &Path) -> Result<Observable, Failure> {
    let text = std::fs::read_to_string(path)?;
    let mut obs: Observable = serde_json::from_str(&text)?;
    obs.expand_cached(BasisKind::Gm);
    Ok(obs)
}

fn run_learn(cmd: &LearnCmd, seed: u64) -> Result<Run, Failure> {
    match cmd {
        LearnCmd::Cyclic(CyclicArgs { common }) => {
            require_source(common)?;
            let config = config_from(common, seed, require_degree(common)?);
            let out = if let Some(path) = &common.oracle {
                let file = std::io::BufReader::new(std::fs::File::open(path)?);
                let samples = SampleSet::read_jsonl(file, common.k)?;
                learn::learn_cyclic_from_samples(&config, &samples, None)?
            } else {
                let truth = random_low_degree(common.n, common.k, config.d, rng::derive_seed(seed, 1), true)?;
                learn::learn_cyclic(&config, &truth, Some(&truth))?
            };
            let ok = out.succeeded().unwrap_or(true);
            Ok(Run { report: to_value(&out)?, csv: None, ok })
        }
        LearnCmd::Qudit(args) => {
            let common = &args.common;
            require_source(common)?;
            let mut config = config_from(common, seed, require_degree(common)?);
            config.op_norm_bound = args.op_norm_bound;
            let out = if let Some(path) = &common.oracle {
                learn::learn_qudit(&config, &read_observable(path)?, None)?
            } else {
                let mut r = rng::substream(seed, 1);
                let mut truth = random_gm_observable(common.n, common.k, config.d, Some(args.op_norm_bound), &mut r)?;
                truth.expand_cached(BasisKind::Gm);
                learn::learn_qudit(&config, &truth, Some(&truth))?
            };
            let ok = out.succeeded().unwrap_or(true);
            Ok(Run { report: to_value(&out)?, csv: None, ok })
        }
        LearnCmd::Arbitrary(args) => {
            let common = &args.common;
            require_source(common)?;
            let mut config = config_from(common, seed, 1);
            config.op_norm_bound = args.op_norm_bound;
            let truncation_degree = learn::arbitrary_degree(common.k, common.eps);
            let truth = match &common.oracle {
                Some(path) => read_observable(path)?,
                None => {
                    let mut r = rng::substream(seed, 1);
                    let mut t = random_gm_observable(common.n, common.k, common.n, Some(args.op_norm_bound), &mut r)?;
                    t.expand_cached(BasisKind::Gm);
                    t
                }
            };
            let known = common.synthetic.then_some(&truth);
            let out = learn::learn_arbitrary(&config, &truth, known)?;
            let learned = learn::synthesize(common.n, common.k, &out.coeff_map())?;
            let (mse, ok) = match known {
                Some(a) => {
                    let est = l2di::mean_squared_deviation(a, &learned, MuSpec::HaarProduct, args.check_trials, rng::derive_seed(seed, 2))?;
                    (Some(est), est.mean <= common.eps + 3.0 * est.std_error)
                }
                None => (None, true),
            };
            #[derive(Serialize)]
            struct ArbitraryReport<'a> {
                truncation_degree: usize,
                outcome: &'a learn::LearnOutcome<Vec<usize>>,
                haar_product_mse: Option<l2di::Estimate>,
            }
            let report = ArbitraryReport { truncation_degree, outcome: &out, haar_product_mse: mse };
            Ok(Run { report: to_value(&report)?, csv: None, ok })
        }
    }
}

fn run_remez(cmd: &RemezCmd, seed: u64) -> Result<Run, Failure> {
    match cmd {
        RemezCmd::Certify { k, n, d, budget, count } => {
            let mut certs = Vec::with_capacity(*count);
            for i in 0..*count as u64 {
                let s = if *count == 1 { seed } else { rng::derive_seed(seed, i) };
                let f = random_low_degree(*n, *k, *d, s, true)?;
                certs.push(remez::remez_certificate(&f, *budget, Some(s))?);
            }
            let ok = certs.iter().all(|c| !c.violation);
            let report = if certs.len() == 1 { to_value(&certs[0])? } else { to_value(&certs)? };
            Ok(Run { report, csv: None, ok })
        }
        RemezCmd::Weights { k, theta } => {
            let w = remez::interpolation_weights(Complex64::from_polar(1.0, *theta), *k)?;
            let split = remez::split_weights(&w);
            #[derive(Serialize)]
            struct WeightsReport {
                #[serde(rename = "K")]
                k: usize,
                theta: f64,
                c: Vec<[f64; 2]>,
                l1_norm: f64,
                bound: f64,
                reconstruction_error: f64,
                split: remez::SplitWeights,
            }
            let bound = remez::weight_budget(*k);
            let report = WeightsReport {
                k: *k,
                theta: *theta,
                c: w.c.iter().map(|c| [c.re, c.im]).collect(),
                l1_norm: w.l1_norm(),
                bound,
                reconstruction_error: w.max_reconstruction_error(),
                split,
            };
            let ok = report.l1_norm <= bound && report.reconstruction_error < 1e-9;
            Ok(Run { report: to_value(&report)?, csv: None, ok })
        }
        RemezCmd::Vandermonde { d } => {
            let v = remez::vandermonde_weights(*d)?;
            let moments: Vec<f64> = (0..*d).map(|t| v.moment(t)).collect();
            let report = serde_json::json!({ "d": d, "a": v.a, "moments": moments });
            Ok(Run { report, csv: None, ok: true })
        }
    }
}

fn traceless_hermitian(k: usize, r: &mut rng::Rng) -> CMatrix {
    let h = linalg::random_hermitian(k, r);
    let tr = linalg::trace(&h) / k as f64;
    h - CMatrix::identity(k, k) * tr
}

fn run_l2di(cmd: &L2diCmd, seed: u64) -> Result<Run, Failure> {
    match cmd {
        L2diCmd::CheckTwirl { k, trials, pairs } => {
            if *k < 2 {
                return Err(Failure::Usage("K must be at least 2".into()));
            }
            let mut r = rng::stream(seed);
            let mut rows = Vec::new();
            let mut ok = true;
            for i in 0..*pairs as u64 {
                let m = traceless_hermitian(*k, &mut r);
                let n = traceless_hermitian(*k, &mut r);
                let res = l2di::twirl_pair(&m, &n, *trials, rng::derive_seed(seed, i + 1))?;
                let scale = linalg::op_norm(&m) * linalg::op_norm(&n);
                let tolerance = 5.0 / (*trials as f64).sqrt() * scale;
                ok &= res.distance <= tolerance;
                rows.push(serde_json::json!({
                    "pair": i,
                    "distance": res.distance,
                    "norm_product": scale,
                    "tolerance": tolerance,
                    "trace_closed_form": linalg::trace(&res.closed_form).re,
                }));
            }
            let report = serde_json::json!({ "K": k, "trials": trials, "seed": seed, "pairs": rows });
            Ok(Run { report, csv: None, ok })
        }
        L2diCmd::Truncation { n, k, d, trials, observable } => {
            let a = match observable {
                Some(path) => read_observable(path)?,
                None => {
                    let dim = k.checked_pow(*n as u32).ok_or_else(|| Failure::Usage("dimension overflow".into()))?;
                    if dim > lowdeg::config::dense_cap() {
                        return Err(lowdeg::Error::DenseCap { dim, cap: lowdeg::config::dense_cap() }.into());
                    }
                    let mut r = rng::substream(seed, 1);
                    Observable::new(*n, *k, linalg::random_hermitian(dim, &mut r))?
                }
            };
            let rep = l2di::truncation_error(&a, *d, MuSpec::HaarProduct, *trials, seed)?;
            let report = serde_json::json!({ "n": a.n(), "K": a.modulus(), "mu": MuSpec::HaarProduct, "trials": trials, "seed": seed, "truncation": rep });
            Ok(Run { report, csv: None, ok: rep.within })
        }
    }
}

fn run_basis(args: &BasisArgs) -> Result<Run, Failure> {
    let k = args.k;
    if k < 2 {
        return Err(Failure::Usage("K must be at least 2".into()));
    }
    let (labels, mats): (Vec<String>, Vec<CMatrix>) = match args.kind {
        KindArg::Gm => GellMannIndex::all(k).iter().map(|g| (format!("{g:?}"), g.matrix(k))).unzip(),
        KindArg::Hw => HWIndex::all(k).iter().map(|h| (format!("X^{}Z^{}", h.l, h.m), h.matrix(k))).unzip(),
    };
    let mut worst: f64 = 0.0;
    for (i, a) in mats.iter().enumerate() {
        for (j, b) in mats.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((linalg::normalized_inner(a, b) - Complex64::new(want, 0.0)).norm());
        }
    }
    let elements: Vec<Value> = labels
        .iter()
        .zip(&mats)
        .map(|(label, m)| {
            let rows: Vec<Vec<[f64; 2]>> = (0..k).map(|r| (0..k).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect();
            serde_json::json!({ "label": label, "matrix": rows })
        })
        .collect();
    let kind = match args.kind {
        KindArg::Gm => "GM",
        KindArg::Hw => "HW",
    };
    let report = serde_json::json!({ "K": k, "kind": kind, "orthonormality_error": worst, "elements": elements });
    Ok(Run { report, csv: None, ok: worst < lowdeg::config::tolerance() })
}
