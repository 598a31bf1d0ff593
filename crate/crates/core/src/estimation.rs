//! Estimating the nuisance vector `(η, τ², w0, γ(1..L))` from one series.
//!
//! Moment estimators for `η`, `τ²` and the autocovariances take `w0` as
//! given. `w0` itself comes from the Fourier-kernel estimator, optionally
//! bias-corrected with a parametric bootstrap.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::BandedCholesky;
use crate::model::{draw_mixture_truth, AutocovSeq, ModelParams, NoiseSampler};
use crate::quadrature::gauss_legendre_on;
use crate::rng::{substream, SimRng};

/// How the distant-pair sum is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairNormalization {
    /// `(1 − ρ)² m² / 2`.
    #[default]
    Literal,
    /// The number of qualifying pairs.
    ExactCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimationOptions {
    /// Distant-pair gap fraction: pairs with `j − i > ρ m` estimate `(E X)²`.
    pub rho: f64,
    /// Fourier bandwidth constant, `h_m = (κ log m)^(-1/2)`.
    pub kappa: f64,
    /// Bootstrap replicates.
    #[serde(rename = "bootstrap_B", alias = "bootstrap_b")]
    pub bootstrap_b: usize,
    /// Posterior window half-width.
    pub k: usize,
    /// Number of autocovariance lags to estimate. `None` means `2k`, the
    /// largest lag inside a window of width `2k + 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acov_lags: Option<usize>,
    pub w0_clamp: [f64; 2],
    pub quadrature_nodes: usize,
    pub pair_normalization: PairNormalization,
}

impl Default for EstimationOptions {
    fn default() -> Self {
        Self {
            rho: 0.1,
            kappa: 0.5,
            bootstrap_b: 100,
            k: 2,
            acov_lags: None,
            w0_clamp: [0.01, 0.99],
            quadrature_nodes: 64,
            pair_normalization: PairNormalization::Literal,
        }
    }
}

impl EstimationOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::invalid(format!(
                "rho must lie in (0, 1), got {}",
                self.rho
            )));
        }
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(Error::invalid(format!(
                "kappa must lie in (0, 1], got {}",
                self.kappa
            )));
        }
        if self.bootstrap_b == 0 {
            return Err(Error::invalid("bootstrap_B must be positive"));
        }
        let [lo, hi] = self.w0_clamp;
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return Err(Error::invalid(format!(
                "w0_clamp must satisfy 0 < lo < hi < 1, got [{lo}, {hi}]"
            )));
        }
        if self.quadrature_nodes == 0 {
            return Err(Error::invalid("quadrature_nodes must be positive"));
        }
        Ok(())
    }

    pub fn lags(&self) -> usize {
        self.acov_lags.unwrap_or(2 * self.k)
    }

    fn clamp_w0(&self, raw: f64) -> f64 {
        raw.clamp(self.w0_clamp[0], self.w0_clamp[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum W0Method {
    TrueValue,
    Fourier,
    Bootstrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct W0Estimate {
    pub value: f64,
    pub raw: f64,
    pub method: W0Method,
}

/// Where `w0` comes from in [`fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum W0Source {
    True(f64),
    Fourier,
    Bootstrap,
}

impl fmt::Display for W0Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            W0Source::True(v) => write!(f, "true:{v}"),
            W0Source::Fourier => f.write_str("fourier"),
            W0Source::Bootstrap => f.write_str("bootstrap"),
        }
    }
}

impl FromStr for W0Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fourier" => Ok(W0Source::Fourier),
            "bootstrap" => Ok(W0Source::Bootstrap),
            _ => {
                let v = s
                    .strip_prefix("true:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::invalid(format!(
                            "unknown w0 source '{s}' (fourier | bootstrap | true:<w0>)"
                        ))
                    })?;
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::invalid(format!(
                        "true w0 must lie in (0, 1), got {v}"
                    )));
                }
                Ok(W0Source::True(v))
            }
        }
    }
}

/// A variance estimate clipped at zero, with the unclipped value kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Clamped {
    pub value: f64,
    pub raw: f64,
}

fn check_w0(w0: f64) -> Result<()> {
    if w0 > 0.0 && w0 < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("w0 must lie in (0, 1), got {w0}")))
    }
}

/// Smallest gap `g` with `g > ρ m`.
fn min_gap(m: usize, rho: f64) -> usize {
    let bound = rho * m as f64;
    let mut g = bound.floor() as usize;
    while g as f64 <= bound {
        g += 1;
    }
    g
}

/// Average of `x_i x_j` over pairs `i < j` with `j − i > ρ m`, an estimate
/// of `(E X)²` that avoids short-lag correlation.
pub fn distant_pair_mean(x: &[f64], rho: f64) -> Result<f64> {
    distant_pair_mean_with(x, rho, PairNormalization::Literal)
}

pub fn distant_pair_mean_with(x: &[f64], rho: f64, norm: PairNormalization) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::invalid(format!("rho must lie in (0, 1), got {rho}")));
    }
    let m = x.len();
    let g = min_gap(m, rho);
    if m == 0 || g >= m {
        return Err(Error::NoDistantPairs { m, rho });
    }
    // suffix[j] = Σ_{l >= j} x_l
    let mut suffix = vec![0.0; m + 1];
    for j in (0..m).rev() {
        suffix[j] = suffix[j + 1] + x[j];
    }
    let sum: f64 = (0..m - g).map(|i| x[i] * suffix[i + g]).sum();
    let denom = match norm {
        PairNormalization::Literal => (1.0 - rho).powi(2) * (m as f64).powi(2) / 2.0,
        PairNormalization::ExactCount => {
            let n = m - g;
            (n * (n + 1) / 2) as f64
        }
    };
    Ok(sum / denom)
}

/// `η̂ = mean(x) / (1 − w0)`.
pub fn estimate_eta(x: &[f64], w0: f64) -> Result<f64> {
    check_w0(w0)?;
    if x.is_empty() {
        return Err(Error::invalid("empty series"));
    }
    Ok(mean(x) / (1.0 - w0))
}

pub fn estimate_tau2(x: &[f64], w0: f64, rho: f64) -> Result<Clamped> {
    estimate_tau2_with(x, w0, rho, PairNormalization::Literal)
}

pub fn estimate_tau2_with(
    x: &[f64],
    w0: f64,
    rho: f64,
    norm: PairNormalization,
) -> Result<Clamped> {
    check_w0(w0)?;
    let dpm = distant_pair_mean_with(x, rho, norm)?;
    let second = x.iter().map(|v| v * v - 1.0).sum::<f64>() / x.len() as f64;
    let raw = second / (1.0 - w0) - dpm / (1.0 - w0).powi(2);
    Ok(Clamped {
        value: raw.max(0.0),
        raw,
    })
}

/// `γ̂(j) = Σ x_i x_{i+j} / (m − j) − distant_pair_mean`.
pub fn estimate_acov(x: &[f64], j: usize, rho: f64) -> Result<f64> {
    estimate_acov_with(x, j, rho, PairNormalization::Literal)
}

pub fn estimate_acov_with(x: &[f64], j: usize, rho: f64, norm: PairNormalization) -> Result<f64> {
    let m = x.len();
    if j == 0 || (j as f64) >= m as f64 * (1.0 - rho) {
        return Err(Error::invalid(format!(
            "lag {j} out of range for m = {m}, rho = {rho}"
        )));
    }
    let dpm = distant_pair_mean_with(x, rho, norm)?;
    Ok(lagged_mean(x, j) - dpm)
}

fn lagged_mean(x: &[f64], j: usize) -> f64 {
    let m = x.len();
    x[..m - j]
        .iter()
        .zip(&x[j..])
        .map(|(a, b)| a * b)
        .sum::<f64>()
        / (m - j) as f64
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Fourier bandwidth `h_m = (κ log m)^(-1/2)`.
pub fn bandwidth(m: usize, kappa: f64) -> f64 {
    (kappa * (m as f64).ln()).powf(-0.5)
}

/// `ψ(z; h)` for the uniform kernel on `[-1, 1]`, tabulated on a fixed
/// Gauss–Legendre grid: `ψ(z; h) = ∫_0^1 exp(s² / 2h²) cos(z s / h) ds`.
#[derive(Debug, Clone)]
pub struct FourierKernel {
    h: f64,
    // (s / h, weight · exp(s² / 2h²))
    nodes: Vec<(f64, f64)>,
}

impl FourierKernel {
    pub fn new(h: f64, nodes: usize) -> Result<Self> {
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::invalid(format!(
                "bandwidth must be positive, got {h}"
            )));
        }
        if nodes == 0 {
            return Err(Error::invalid("quadrature_nodes must be positive"));
        }
        let (s, w) = gauss_legendre_on(nodes, 0.0, 1.0);
        let nodes = s
            .iter()
            .zip(&w)
            .map(|(s, w)| (s / h, w * (s * s / (2.0 * h * h)).exp()))
            .collect();
        Ok(Self { h, nodes })
    }

    pub fn for_series(m: usize, opts: &EstimationOptions) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("Fourier estimator needs m >= 2"));
        }
        Self::new(bandwidth(m, opts.kappa), opts.quadrature_nodes)
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.nodes.iter().map(|(t, w)| w * (z * t).cos()).sum()
    }

    /// Mean of `ψ(x_i; h)` (unclamped).
    pub fn mean(&self, x: &[f64]) -> f64 {
        x.iter().map(|&z| self.eval(z)).sum::<f64>() / x.len() as f64
    }
}

pub fn psi(z: f64, h: f64, nodes: usize) -> Result<f64> {
    Ok(FourierKernel::new(h, nodes)?.eval(z))
}

pub fn estimate_w0_fourier(x: &[f64], opts: &EstimationOptions) -> Result<W0Estimate> {
    let kernel = FourierKernel::for_series(x.len(), opts)?;
    let raw = kernel.mean(x);
    Ok(W0Estimate {
        value: opts.clamp_w0(raw),
        raw,
        method: W0Method::Fourier,
    })
}

/// Parametric bootstrap correction `2 ŵ0(x) − mean_b ŵ0(x*_b)`, with the
/// replicates `x*_b` drawn under `xi_hat`. Replicate `b` uses its own
/// substream of a seed taken from `rng`.
pub fn estimate_w0_bootstrap(
    x: &[f64],
    xi_hat: &ModelParams,
    opts: &EstimationOptions,
    rng: &mut SimRng,
) -> Result<W0Estimate> {
    xi_hat.validate()?;
    let m = x.len();
    let sampler = NoiseSampler::new(&xi_hat.gamma, m)?;
    let base: u64 = rng.random();
    estimate_w0_bootstrap_with(x, opts, |b| {
        let mut r = substream(base, b as u64);
        let truth = draw_mixture_truth(xi_hat.w0, xi_hat.eta, xi_hat.tau2, m, &mut r)?;
        let noise = sampler.sample(&mut r);
        Ok(truth.mu.iter().zip(noise).map(|(mu, e)| mu + e).collect())
    })
}

/// Bootstrap correction with caller-supplied replicate series.
pub fn estimate_w0_bootstrap_with<F>(
    x: &[f64],
    opts: &EstimationOptions,
    mut draw: F,
) -> Result<W0Estimate>
where
    F: FnMut(usize) -> Result<Vec<f64>>,
{
    opts.validate()?;
    let kernel = FourierKernel::for_series(x.len(), opts)?;
    let original = kernel.mean(x);
    let mut total = 0.0;
    for b in 0..opts.bootstrap_b {
        let replicate = draw(b)?;
        if replicate.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: replicate.len(),
            });
        }
        total += kernel.mean(&replicate);
    }
    let raw = 2.0 * original - total / opts.bootstrap_b as f64;
    Ok(W0Estimate {
        value: opts.clamp_w0(raw),
        raw,
        method: W0Method::Bootstrap,
    })
}

/// Fitted parameters plus what happened on the way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fit {
    pub params: ModelParams,
    pub w0: W0Estimate,
    /// First-stage Fourier estimate on the bootstrap path.
    pub fourier_stage: Option<W0Estimate>,
    pub tau2_raw: f64,
    /// Moment estimates of `γ(1..L)` before any repair.
    pub gamma_raw: Vec<f64>,
    /// Shrink factor applied to `γ̂(1..L)` to restore positive definiteness.
    pub gamma_shrink: Option<f64>,
}

const SHRINK_STEP: f64 = 0.05;

/// Scales `γ̂(1..L)` by the largest `c ∈ {1, 0.95, 0.90, …, 0.05}` whose
/// `n × n` Toeplitz matrix factors.
pub fn repair_acov(lags: &[f64], n: usize) -> Result<(AutocovSeq, Option<f64>)> {
    let steps = (1.0 / SHRINK_STEP).round() as usize;
    for s in 0..steps {
        let c = 1.0 - s as f64 * SHRINK_STEP;
        let mut v = Vec::with_capacity(lags.len() + 1);
        v.push(1.0);
        v.extend(lags.iter().map(|g| c * g));
        if v.iter().all(|g| g.abs() <= 1.0) && BandedCholesky::toeplitz(&v, n).is_ok() {
            return Ok((AutocovSeq::new(v)?, (s > 0).then_some(c)));
        }
    }
    Err(Error::RepairFailed)
}

/// Moment estimates of `(η, τ², γ(1..L))` for a given `w0`.
pub fn moment_fit(x: &[f64], w0: W0Estimate, opts: &EstimationOptions) -> Result<Fit> {
    let eta = estimate_eta(x, w0.value)?;
    let tau2 = estimate_tau2_with(x, w0.value, opts.rho, opts.pair_normalization)?;
    let dpm = distant_pair_mean_with(x, opts.rho, opts.pair_normalization)?;
    let m = x.len();
    let lags = opts.lags();
    if lags > 0 && (lags as f64) >= m as f64 * (1.0 - opts.rho) {
        return Err(Error::invalid(format!(
            "cannot estimate {lags} autocovariance lags from m = {m} (rho = {})",
            opts.rho
        )));
    }
    let gamma_raw: Vec<f64> = (1..=lags).map(|j| lagged_mean(x, j) - dpm).collect();
    let (gamma, gamma_shrink) = repair_acov(&gamma_raw, m)?;
    Ok(Fit {
        params: ModelParams::new(eta, tau2.value, w0.value, gamma)?,
        w0,
        fourier_stage: None,
        tau2_raw: tau2.raw,
        gamma_raw,
        gamma_shrink,
    })
}

/// Full estimation pipeline.
///
/// For `Bootstrap`: Fourier `w0` → moments → bootstrap `w0` under those
/// moments → moments again with the corrected `w0`.
pub fn fit(x: &[f64], source: W0Source, opts: &EstimationOptions, rng: &mut SimRng) -> Result<Fit> {
    opts.validate()?;
    if x.is_empty() {
        return Err(Error::invalid("empty series"));
    }
    match source {
        W0Source::True(v) => {
            check_w0(v)?;
            let w0 = W0Estimate {
                value: v,
                raw: v,
                method: W0Method::TrueValue,
            };
            moment_fit(x, w0, opts)
        }
        W0Source::Fourier => moment_fit(x, estimate_w0_fourier(x, opts)?, opts),
        W0Source::Bootstrap => {
            let fourier = estimate_w0_fourier(x, opts)?;
            let first = moment_fit(x, fourier, opts)?;
            let boot = estimate_w0_bootstrap(x, &first.params, opts, rng)?;
            let mut out = moment_fit(x, boot, opts)?;
            out.fourier_stage = Some(fourier);
            Ok(out)
        }
    }
}
