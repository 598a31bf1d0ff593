//! Monte Carlo harness: simulate, apply each procedure to the same series,
//! score against the truth, aggregate.

mod report;
mod svg;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{EstimationOptions, W0Source};
use crate::model::{
    fixed_truth, simulate_series_with, GroundTruth, NoiseSampler, Placement, SignalMode, SimDesign,
};
use crate::procedures::{
    approximate_bayes, bh_adaptive, empirical_bayes, normal_p_values, Decision,
};
use crate::rng::{derive_seed, labels, rng_from_seed, substream};

pub use report::{
    format_table, raw_csv_string, read_raw_csv, summary_csv_string, write_raw_csv,
    write_summary_csv, RAW_HEADER, SUMMARY_HEADER,
};
pub use svg::{figure_panels, scatter_svg, write_scatter_svg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Procedure {
    Bh,
    ApproxBayes,
    EbTrue,
    EbFourier,
    EbBootstrap,
}

impl Procedure {
    pub const ALL: [Procedure; 5] = [
        Procedure::Bh,
        Procedure::ApproxBayes,
        Procedure::EbTrue,
        Procedure::EbFourier,
        Procedure::EbBootstrap,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Procedure::Bh => "bh",
            Procedure::ApproxBayes => "approx-bayes",
            Procedure::EbTrue => "eb-true",
            Procedure::EbFourier => "eb-fourier",
            Procedure::EbBootstrap => "eb-bootstrap",
        }
    }

    /// Display name used in tables and figures.
    pub fn label(self) -> &'static str {
        match self {
            Procedure::Bh => "BH-w0",
            Procedure::ApproxBayes => "Approximate Bayes",
            Procedure::EbTrue => "EB-w0",
            Procedure::EbFourier => "EB-Fourier",
            Procedure::EbBootstrap => "EB-bootstrap",
        }
    }

    fn stream(self) -> u64 {
        labels::PROCEDURE_BASE + self as u64
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Procedure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Procedure::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::invalid(format!("unknown procedure '{s}'")))
    }
}

/// Outcome of one procedure on one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    pub r: usize,
    pub v: usize,
    pub fdp: f64,
    /// `1 − V/R`, only when `R > 0`.
    pub ppv: Option<f64>,
}

impl TrialMetrics {
    pub fn from_counts(r: usize, v: usize) -> Self {
        assert!(v <= r, "false rejections exceed rejections");
        if r == 0 {
            Self {
                r,
                v,
                fdp: 0.0,
                ppv: None,
            }
        } else {
            let fdp = v as f64 / r as f64;
            Self {
                r,
                v,
                fdp,
                ppv: Some(1.0 - fdp),
            }
        }
    }
}

pub fn score_decisions(decision: &Decision, truth: &GroundTruth) -> Result<TrialMetrics> {
    if decision.scores.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: decision.scores.len(),
        });
    }
    if let Some(&i) = decision.rejected.iter().find(|&&i| i >= truth.len()) {
        return Err(Error::invalid(format!("rejected index {i} out of range")));
    }
    let v = decision
        .rejected
        .iter()
        .filter(|&&i| !truth.theta[i])
        .count();
    Ok(TrialMetrics::from_counts(decision.rejected.len(), v))
}

/// Everything a benchmark run needs besides the design.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub procedures: Vec<Procedure>,
    pub k: usize,
    pub estimation: EstimationOptions,
    pub n_trials: usize,
    pub base_seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Draw the signal placement once and reuse it for every trial.
    pub fixed_placement: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            procedures: Procedure::ALL.to_vec(),
            k: 2,
            estimation: EstimationOptions::default(),
            n_trials: 200,
            base_seed: 20_070_101,
            threads: None,
            fixed_placement: false,
        }
    }
}

/// Per-procedure result of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcedureOutcome {
    pub procedure: Procedure,
    pub result: std::result::Result<TrialMetrics, String>,
}

/// Seed of trial `t`: `derive_seed(base_seed, t)`.
pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    derive_seed(base_seed, trial as u64)
}

fn apply(
    procedure: Procedure,
    design: &SimDesign,
    x: &crate::model::Series,
    cfg: &BenchConfig,
    trial_seed: u64,
) -> Result<Decision> {
    let alpha = design.alpha;
    match procedure {
        Procedure::Bh => bh_adaptive(&normal_p_values(x), alpha, design.true_w0()),
        Procedure::ApproxBayes => approximate_bayes(x, &design.true_params()?, cfg.k, alpha),
        Procedure::EbTrue | Procedure::EbFourier | Procedure::EbBootstrap => {
            let source = match procedure {
                Procedure::EbTrue => W0Source::True(design.true_w0()),
                Procedure::EbFourier => W0Source::Fourier,
                _ => W0Source::Bootstrap,
            };
            let mut rng = substream(trial_seed, procedure.stream());
            Ok(empirical_bayes(x, alpha, cfg.k, source, &cfg.estimation, &mut rng)?.0)
        }
    }
}

/// One simulated series, every requested procedure applied to it.
pub fn run_trial(
    design: &SimDesign,
    cfg: &BenchConfig,
    trial_seed: u64,
) -> Result<Vec<ProcedureOutcome>> {
    let sampler = NoiseSampler::new(&design.gamma, design.m)?;
    run_trial_with(design, &sampler, cfg, trial_seed)
}

fn run_trial_with(
    design: &SimDesign,
    sampler: &NoiseSampler,
    cfg: &BenchConfig,
    trial_seed: u64,
) -> Result<Vec<ProcedureOutcome>> {
    let mut rng = substream(trial_seed, labels::SERIES);
    let (x, truth) = simulate_series_with(design, sampler, &mut rng)?;
    Ok(cfg
        .procedures
        .iter()
        .map(|&procedure| ProcedureOutcome {
            procedure,
            result: apply(procedure, design, &x, cfg, trial_seed)
                .and_then(|d| score_decisions(&d, &truth))
                .map_err(|e| e.to_string()),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub trial: usize,
    pub procedure: Procedure,
    pub r: usize,
    pub v: usize,
    pub fdp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    /// Sample mean and standard deviation (divisor `n − 1`; 0 when `n < 2`),
    /// summed in slice order.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                sd: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Self { mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcedureSummary {
    pub procedure: Procedure,
    pub n: usize,
    pub fdp: MeanSd,
    pub r: MeanSd,
    pub v: MeanSd,
    /// PPV over trials with `R > 0`.
    pub ppv: Option<MeanSd>,
    pub ppv_n: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub raw: Vec<RawRow>,
    pub summaries: Vec<ProcedureSummary>,
    /// `(trial, procedure, message)` for every failed procedure run.
    pub failures: Vec<(usize, Procedure, String)>,
}

impl BenchReport {
    pub fn summary(&self, p: Procedure) -> Option<&ProcedureSummary> {
        self.summaries.iter().find(|s| s.procedure == p)
    }
}

/// Aggregates raw rows per procedure in trial order.
pub fn summarize(
    raw: &[RawRow],
    procedures: &[Procedure],
    failures: &[(usize, Procedure, String)],
) -> Vec<ProcedureSummary> {
    procedures
        .iter()
        .map(|&p| {
            let rows: Vec<&RawRow> = raw.iter().filter(|r| r.procedure == p).collect();
            let fdp: Vec<f64> = rows.iter().map(|r| r.fdp).collect();
            let r: Vec<f64> = rows.iter().map(|r| r.r as f64).collect();
            let v: Vec<f64> = rows.iter().map(|r| r.v as f64).collect();
            let ppv: Vec<f64> = rows
                .iter()
                .filter(|r| r.r > 0)
                .map(|r| 1.0 - r.fdp)
                .collect();
            ProcedureSummary {
                procedure: p,
                n: rows.len(),
                fdp: MeanSd::of(&fdp),
                r: MeanSd::of(&r),
                v: MeanSd::of(&v),
                ppv: (!ppv.is_empty()).then(|| MeanSd::of(&ppv)),
                ppv_n: ppv.len(),
                failures: failures.iter().filter(|f| f.1 == p).count(),
            }
        })
        .collect()
}

/// Runs `cfg.n_trials` independent trials. Trial `t` is seeded with
/// [`trial_seed`]`(cfg.base_seed, t)`; results are collected in trial order,
/// so the report does not depend on the thread count.
pub fn run_benchmark(design: &SimDesign, cfg: &BenchConfig) -> Result<BenchReport> {
    design.validate()?;
    cfg.estimation.validate()?;
    if cfg.n_trials < 2 {
        return Err(Error::invalid("n_trials must be at least 2"));
    }
    if cfg.procedures.is_empty() {
        return Err(Error::invalid("no procedures requested"));
    }
    let design = if cfg.fixed_placement {
        fix_placement(design, cfg.base_seed)?
    } else {
        design.clone()
    };
    let sampler = NoiseSampler::new(&design.gamma, design.m)?;

    let work = |t: usize| run_trial_with(&design, &sampler, cfg, trial_seed(cfg.base_seed, t));
    let trials: Vec<Result<Vec<ProcedureOutcome>>> = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(|| (0..cfg.n_trials).into_par_iter().map(work).collect()),
        None => (0..cfg.n_trials).into_par_iter().map(work).collect(),
    };

    let mut raw = Vec::new();
    let mut failures = Vec::new();
    for (trial, outcome) in trials.into_iter().enumerate() {
        for o in outcome? {
            match o.result {
                Ok(m) => raw.push(RawRow {
                    trial,
                    procedure: o.procedure,
                    r: m.r,
                    v: m.v,
                    fdp: m.fdp,
                }),
                Err(e) => failures.push((trial, o.procedure, e)),
            }
        }
    }
    let summaries = summarize(&raw, &cfg.procedures, &failures);
    Ok(BenchReport {
        raw,
        summaries,
        failures,
    })
}

fn fix_placement(design: &SimDesign, base_seed: u64) -> Result<SimDesign> {
    let mut d = design.clone();
    if let SignalMode::Fixed {
        count,
        value,
        placement: placement @ Placement::Random,
    } = &mut d.signal
    {
        let mut rng = rng_from_seed(derive_seed(base_seed, labels::PLACEMENT));
        let truth = fixed_truth(design.m, *count, *value, &Placement::Random, &mut rng)?;
        let idx = (0..design.m).filter(|&i| truth.theta[i]).collect();
        *placement = Placement::Indices(idx);
    }
    Ok(d)
}
