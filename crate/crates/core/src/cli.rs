//! Command-line front end: `simulate`, `estimate`, `score`, `test`, `bench`.
//!
//! Configuration comes from one JSON document (design keys at the top level,
//! plus `estimation`, `procedures`, `n_trials`, `k`, `threads`,
//! `fixed_placement`); command-line flags override it.

use std::fmt;
use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bench::{
    format_table, raw_csv_string, run_benchmark, scatter_svg, summary_csv_string, BenchConfig,
    Procedure,
};
use crate::error::Error;
use crate::estimation::{fit, EstimationOptions, W0Method, W0Source};
use crate::model::{simulate_series, AutocovSeq, ModelParams, Series, SimDesign};
use crate::output::write_atomic;
use crate::posterior::posterior_scores;
use crate::procedures::{
    approximate_bayes, bh_adaptive, cutoff_running_mean, empirical_bayes, normal_p_values,
};
use crate::rng::{labels, substream};

#[derive(Debug, Parser)]
#[command(
    name = "ebfdr",
    version,
    about = "False discovery rate control for dependent Gaussian series"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON configuration file, or `-` for standard input.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<String>,
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, value_name = "F")]
    pub alpha: Option<f64>,
    /// Window half-width.
    #[arg(long, global = true, value_name = "INT")]
    pub k: Option<usize>,
    /// Worker cap for `bench`.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one series; writes series.csv and truth.csv.
    Simulate,
    /// Fit the nuisance parameters; writes params.json.
    Estimate {
        #[arg(long, value_name = "PATH")]
        series: PathBuf,
        /// `fourier`, `bootstrap` or `true:<value>`.
        #[arg(long, default_value = "fourier")]
        w0: W0Source,
    },
    /// Windowed posterior null probabilities; writes scores.csv.
    Score {
        #[arg(long, value_name = "PATH")]
        series: PathBuf,
        /// Parameter JSON as written by `estimate`; defaults to the design's true values.
        #[arg(long, value_name = "PATH")]
        params: Option<PathBuf>,
    },
    /// Run one rejection rule; writes decision.csv.
    Test {
        #[arg(long, value_name = "PATH")]
        series: PathBuf,
        #[arg(long, value_name = "PATH")]
        params: Option<PathBuf>,
        /// One of bh, approx-bayes, eb-true, eb-fourier, eb-bootstrap.
        #[arg(long, default_value = "eb-true")]
        procedure: Procedure,
    },
    /// Monte Carlo comparison; writes raw.csv, summary.csv, scatter.svg, table.txt.
    Bench {
        /// Comma-separated procedure ids.
        #[arg(long, value_delimiter = ',')]
        procedures: Option<Vec<Procedure>>,
        #[arg(long)]
        n_trials: Option<usize>,
    },
}

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Config,
    Numerical,
    Io,
}

impl FailureKind {
    pub fn code(self) -> u8 {
        match self {
            FailureKind::Config => 2,
            FailureKind::Numerical => 3,
            FailureKind::Io => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            FailureKind::Config => "config",
            FailureKind::Numerical => "numerical",
            FailureKind::Io => "io",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: FailureKind,
    pub message: String,
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        CliError {
            kind: FailureKind::Config,
            message: msg.into(),
        }
    }

    /// Single-line JSON for stderr.
    pub fn to_line(&self) -> String {
        json!({"error": self.kind.name(), "code": self.kind.code(), "message": self.message})
            .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind.name(), self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Io { .. } => FailureKind::Io,
            e if e.is_numerical() => FailureKind::Numerical,
            _ => FailureKind::Config,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Everything a subcommand needs after merging file and flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub design: SimDesign,
    pub estimation: EstimationOptions,
    pub procedures: Vec<Procedure>,
    pub n_trials: usize,
    pub k: usize,
    pub threads: Option<usize>,
    pub fixed_placement: bool,
}

const DESIGN_KEYS: [&str; 6] = ["m", "alpha", "seed", "gamma", "signal", "signal_indices"];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunKeys {
    estimation: Option<EstimationOptions>,
    procedures: Option<Vec<String>>,
    n_trials: Option<usize>,
    k: Option<usize>,
    threads: Option<usize>,
    fixed_placement: Option<bool>,
}

/// Merges a JSON config document over the built-in defaults.
pub fn settings_from_json(text: Option<&str>) -> CliResult<Settings> {
    let doc: Map<String, Value> = match text {
        None => Map::new(),
        Some(t) => match serde_json::from_str(t) {
            Ok(Value::Object(map)) => map,
            Ok(_) => return Err(CliError::config("config must be a JSON object")),
            Err(e) => return Err(CliError::config(format!("config: {e}"))),
        },
    };
    let Value::Object(mut design_doc) =
        serde_json::to_value(SimDesign::default()).expect("design serializes")
    else {
        unreachable!("design serializes to an object")
    };
    let mut rest = Map::new();
    for (key, value) in doc {
        if DESIGN_KEYS.contains(&key.as_str()) {
            design_doc.insert(key, value);
        } else {
            rest.insert(key, value);
        }
    }
    let design: SimDesign = serde_json::from_value(Value::Object(design_doc))
        .map_err(|e| CliError::config(format!("config: {e}")))?;
    let run: RunKeys = serde_json::from_value(Value::Object(rest))
        .map_err(|e| CliError::config(format!("config: {e}")))?;

    let procedures = match run.procedures {
        None => Procedure::ALL.to_vec(),
        Some(ids) => ids
            .iter()
            .map(|s| s.parse::<Procedure>().map_err(CliError::from))
            .collect::<CliResult<_>>()?,
    };
    let defaults = BenchConfig::default();
    let k = run.k.unwrap_or(defaults.k);
    Ok(Settings {
        design,
        estimation: run.estimation.unwrap_or_default(),
        procedures,
        n_trials: run.n_trials.unwrap_or(defaults.n_trials),
        k,
        threads: run.threads,
        fixed_placement: run.fixed_placement.unwrap_or(false),
    })
}

fn read_config(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::from(Error::io("<stdin>", e)))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Error::io(path, e).into())
    }
}

impl Settings {
    fn load(common: &Common) -> CliResult<Self> {
        let text = common.config.as_deref().map(read_config).transpose()?;
        let mut s = settings_from_json(text.as_deref())?;
        if let Some(seed) = common.seed {
            s.design.seed = seed;
        }
        if let Some(alpha) = common.alpha {
            s.design.alpha = alpha;
        }
        if let Some(k) = common.k {
            s.k = k;
        }
        if common.threads.is_some() {
            s.threads = common.threads;
        }
        s.estimation.k = s.k;
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> CliResult<()> {
        self.design.validate()?;
        self.estimation.validate()?;
        if self.threads == Some(0) {
            return Err(CliError::config("threads must be positive"));
        }
        if self.n_trials == 0 {
            return Err(CliError::config("n_trials must be positive"));
        }
        if self.procedures.is_empty() {
            return Err(CliError::config("procedure list is empty"));
        }
        Ok(())
    }

    fn bench_config(&self) -> BenchConfig {
        BenchConfig {
            procedures: self.procedures.clone(),
            k: self.k,
            estimation: self.estimation.clone(),
            n_trials: self.n_trials,
            base_seed: self.design.seed,
            threads: self.threads,
            fixed_placement: self.fixed_placement,
        }
    }
}

/// Reads the `x` column of a CSV file.
pub fn read_series(path: &Path) -> CliResult<Series> {
    let bad = |msg: String| CliError::config(format!("{}: {msg}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_failure(path, e))?;
    let col = rdr
        .headers()
        .map_err(|e| csv_failure(path, e))?
        .iter()
        .position(|h| h.trim() == "x")
        .ok_or_else(|| bad("no column named 'x'".into()))?;
    let mut x = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_failure(path, e))?;
        let field = rec.get(col).unwrap_or("");
        x.push(
            field
                .trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("row {}: '{field}' is not a number", row + 1)))?,
        );
    }
    Series::new(x).map_err(|e| bad(e.to_string()))
}

fn csv_failure(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io).into(),
        other => CliError::config(format!("{}: {other:?}", path.display())),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum W0Field {
    Plain(f64),
    Reported { value: f64 },
}

#[derive(Deserialize)]
struct ParamsFile {
    eta: f64,
    tau2: f64,
    w0: W0Field,
    gamma: Vec<f64>,
}

/// Reads a parameter file in the format `estimate` writes.
pub fn read_params(path: &Path) -> CliResult<ModelParams> {
    let text = fs::read_to_string(path).map_err(|e| CliError::from(Error::io(path, e)))?;
    let p: ParamsFile = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let w0 = match p.w0 {
        W0Field::Plain(v) | W0Field::Reported { value: v } => v,
    };
    Ok(ModelParams::new(
        p.eta,
        p.tau2,
        w0,
        AutocovSeq::new(p.gamma)?,
    )?)
}

fn params_or_truth(path: Option<&Path>, s: &Settings) -> CliResult<ModelParams> {
    match path {
        Some(p) => read_params(p),
        None => Ok(s.design.true_params()?),
    }
}

fn write_out(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::from(Error::io(dir, e)))?;
    let path = dir.join(name);
    write_atomic(&path, bytes)?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

fn cmd_simulate(s: &Settings, out: &Path) -> CliResult<()> {
    let (x, truth) = simulate_series(&s.design, &mut substream(s.design.seed, labels::SERIES))?;
    let mut series = String::from("index,x\n");
    let mut truth_csv = String::from("index,theta,mu\n");
    for (i, v) in x.values().iter().enumerate() {
        series.push_str(&format!("{},{v}\n", i + 1));
        truth_csv.push_str(&format!(
            "{},{},{}\n",
            i + 1,
            u8::from(truth.theta[i]),
            truth.mu[i]
        ));
    }
    write_out(out, "series.csv", series.as_bytes())?;
    write_out(out, "truth.csv", truth_csv.as_bytes())?;
    Ok(())
}

fn method_name(m: W0Method) -> &'static str {
    match m {
        W0Method::TrueValue => "true-value",
        W0Method::Fourier => "fourier",
        W0Method::Bootstrap => "bootstrap",
    }
}

fn cmd_estimate(s: &Settings, out: &Path, series: &Path, w0: W0Source) -> CliResult<Value> {
    let x = read_series(series)?;
    let mut rng = substream(s.design.seed, labels::PROCEDURE_BASE);
    let f = fit(x.values(), w0, &s.estimation, &mut rng)?;
    let doc = json!({
        "eta": f.params.eta,
        "tau2": f.params.tau2,
        "w0": {"value": f.w0.value, "raw": f.w0.raw, "method": method_name(f.w0.method)},
        "gamma": f.params.gamma.values(),
        "repairs": {
            "tau2_raw": f.tau2_raw,
            "tau2_clamped": f.tau2_raw != f.params.tau2,
            "w0_clamped": f.w0.raw != f.w0.value,
            "gamma_raw": f.gamma_raw,
            "gamma_shrink": f.gamma_shrink,
            "fourier_stage": f.fourier_stage.map(|e| json!({"value": e.value, "raw": e.raw})),
        },
    });
    let text = serde_json::to_string_pretty(&doc).expect("json") + "\n";
    write_out(out, "params.json", text.as_bytes())?;
    print!("{text}");
    Ok(doc)
}

fn cmd_score(s: &Settings, out: &Path, series: &Path, params: Option<&Path>) -> CliResult<()> {
    let x = read_series(series)?;
    let p = params_or_truth(params, s)?;
    let scores = posterior_scores(&x, &p, s.k)?;
    let mut csv = String::from("index,x,pi_hat\n");
    for (i, (v, pi)) in x.values().iter().zip(scores.pi()).enumerate() {
        csv.push_str(&format!("{},{v},{pi}\n", i + 1));
    }
    write_out(out, "scores.csv", csv.as_bytes())?;
    Ok(())
}

fn cmd_test(
    s: &Settings,
    out: &Path,
    series: &Path,
    params: Option<&Path>,
    procedure: Procedure,
) -> CliResult<usize> {
    let x = read_series(series)?;
    let alpha = s.design.alpha;
    let eb = |source: W0Source| -> CliResult<_> {
        let mut rng = substream(s.design.seed, labels::PROCEDURE_BASE);
        Ok(empirical_bayes(&x, alpha, s.k, source, &s.estimation, &mut rng)?.0)
    };
    let decision = match procedure {
        Procedure::Bh => {
            let w0 = params_or_truth(params, s)?.w0;
            bh_adaptive(&normal_p_values(&x), alpha, w0)?
        }
        Procedure::ApproxBayes => approximate_bayes(&x, &params_or_truth(params, s)?, s.k, alpha)?,
        Procedure::EbTrue => match params {
            Some(p) => cutoff_running_mean(&posterior_scores(&x, &read_params(p)?, s.k)?, alpha)?,
            None => eb(W0Source::True(s.design.true_w0()))?,
        },
        Procedure::EbFourier => eb(W0Source::Fourier)?,
        Procedure::EbBootstrap => eb(W0Source::Bootstrap)?,
    };
    let mask = decision.rejection_mask();
    let mut csv = String::from("index,x,score,rejected\n");
    for (i, v) in x.values().iter().enumerate() {
        csv.push_str(&format!(
            "{},{v},{},{}\n",
            i + 1,
            decision.scores[i],
            u8::from(mask[i])
        ));
    }
    write_out(out, "decision.csv", csv.as_bytes())?;
    println!(
        "procedure={} alpha={alpha} m={} k_hat={}",
        procedure.id(),
        x.len(),
        decision.k_hat
    );
    Ok(decision.k_hat)
}

fn cmd_bench(s: &Settings, out: &Path) -> CliResult<()> {
    let cfg = s.bench_config();
    let rep = run_benchmark(&s.design, &cfg)?;
    for (trial, p, msg) in &rep.failures {
        log::warn!("trial {trial} {}: {msg}", p.id());
    }
    let table = format_table(&rep.summaries);
    write_out(out, "raw.csv", raw_csv_string(&rep.raw).as_bytes())?;
    write_out(
        out,
        "summary.csv",
        summary_csv_string(&rep.summaries).as_bytes(),
    )?;
    if !rep.raw.is_empty() {
        write_out(
            out,
            "scatter.svg",
            scatter_svg(&rep.raw, s.design.alpha)?.as_bytes(),
        )?;
    }
    write_out(out, "table.txt", table.as_bytes())?;
    print!("{table}");
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    let mut s = Settings::load(&cli.common)?;
    let out = cli.common.out.as_path();
    match cli.command {
        Command::Simulate => cmd_simulate(&s, out),
        Command::Estimate { series, w0 } => cmd_estimate(&s, out, &series, w0).map(drop),
        Command::Score { series, params } => cmd_score(&s, out, &series, params.as_deref()),
        Command::Test {
            series,
            params,
            procedure,
        } => cmd_test(&s, out, &series, params.as_deref(), procedure).map(drop),
        Command::Bench {
            procedures,
            n_trials,
        } => {
            if let Some(p) = procedures {
                s.procedures = p;
            }
            if let Some(n) = n_trials {
                s.n_trials = n;
            }
            s.validate()?;
            cmd_bench(&s, out)
        }
    }
}

/// Entry point used by the binary: parse, run, map failures to exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("bad arguments");
            eprintln!(
                "{}",
                CliError::config(first.trim_start_matches("error: ")).to_line()
            );
            return ExitCode::from(FailureKind::Config.code());
        }
    };
    let level = match cli.common.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_line());
            ExitCode::from(e.kind.code())
        }
    }
}
