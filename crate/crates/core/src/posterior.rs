//! Windowed posterior null probabilities.
//!
//! For hypothesis `i` the window `T_i = (x_j : |j − i| ≤ k)` is, given the
//! local configuration `t ∈ {0,1}^d`, normal with mean `η t` and covariance
//! `Γ_d + τ² diag(t)`. The null probability is the prior-weighted density
//! mass of configurations with `t_i = 0` over the total mass. All sums run
//! in log space.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{log_sum_exp, Cholesky, Matrix};
use crate::model::{ModelParams, Series};

/// Largest window dimension for which a configuration table is built.
pub const MAX_WINDOW_DIM: usize = 16;
/// Largest `m` accepted by [`exact_posterior`].
pub const MAX_EXACT_M: usize = 15;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Contiguous index window around `center`, 0-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub center: usize,
    pub start: usize,
    pub end: usize,
}

impl Window {
    pub fn dim(&self) -> usize {
        self.end - self.start + 1
    }

    /// Position of the center inside the window.
    pub fn offset(&self) -> usize {
        self.center - self.start
    }

    pub fn range(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

/// `{j : |j − i| ≤ k}` clipped to `0..m`.
pub fn window_of(i: usize, m: usize, k: usize) -> Result<Window> {
    if i >= m {
        return Err(Error::invalid(format!(
            "index {i} out of range for m = {m}"
        )));
    }
    Ok(Window {
        center: i,
        start: i.saturating_sub(k),
        end: (i + k).min(m - 1),
    })
}

/// Precomputed factor and prior weight of one local configuration.
#[derive(Debug, Clone)]
pub struct ConfigEntry {
    /// Bit `p` is `θ` at window position `p`.
    pub config: u32,
    pub signals: usize,
    pub factor: Cholesky,
    pub log_det: f64,
    pub log_weight: f64,
}

/// All `2^d` configurations for one window dimension.
#[derive(Debug, Clone)]
pub struct ConfigTable {
    d: usize,
    eta: f64,
    entries: Vec<ConfigEntry>,
}

pub fn build_config_table(params: &ModelParams, d: usize) -> Result<ConfigTable> {
    params.validate()?;
    if d == 0 || d > MAX_WINDOW_DIM {
        return Err(Error::TooLarge {
            size: d,
            limit: MAX_WINDOW_DIM,
        });
    }
    let (lw0, lw1) = (params.w0.ln(), (1.0 - params.w0).ln());
    let mut entries = Vec::with_capacity(1 << d);
    for config in 0..(1u32 << d) {
        let cov = Matrix::from_fn(d, |a, b| {
            let base = params.gamma.lag(a.abs_diff(b));
            if a == b && config >> a & 1 == 1 {
                base + params.tau2
            } else {
                base
            }
        });
        let factor = Cholesky::factor(&cov).map_err(|_| Error::ConfigFactorization {
            config: config_label(config, d),
            dim: d,
        })?;
        let signals = config.count_ones() as usize;
        entries.push(ConfigEntry {
            config,
            signals,
            log_det: factor.log_det(),
            factor,
            log_weight: (d - signals) as f64 * lw0 + signals as f64 * lw1,
        });
    }
    Ok(ConfigTable {
        d,
        eta: params.eta,
        entries,
    })
}

fn config_label(config: u32, d: usize) -> String {
    (0..d)
        .map(|p| if config >> p & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl ConfigTable {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[ConfigEntry] {
        &self.entries
    }

    pub fn mean_of(&self, entry: &ConfigEntry) -> Vec<f64> {
        (0..self.d)
            .map(|p| {
                if entry.config >> p & 1 == 1 {
                    self.eta
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Log prior-weighted masses of `θ_pos = 0` and `θ_pos = 1`.
    pub fn window_masses(&self, v: &[f64], pos: usize) -> Result<WindowMasses> {
        if v.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: v.len(),
            });
        }
        if pos >= self.d {
            return Err(Error::invalid(format!(
                "window position {pos} out of range"
            )));
        }
        let half = 1usize << (self.d - 1);
        let mut null = Vec::with_capacity(half);
        let mut alt = Vec::with_capacity(half);
        let mut buf = vec![0.0; self.d];
        for e in &self.entries {
            for (p, b) in buf.iter_mut().enumerate() {
                *b = v[p]
                    - if e.config >> p & 1 == 1 {
                        self.eta
                    } else {
                        0.0
                    };
            }
            let term = gaussian_log_density(&mut buf, e) + e.log_weight;
            if e.config >> pos & 1 == 1 {
                alt.push(term);
            } else {
                null.push(term);
            }
        }
        Ok(WindowMasses {
            log_null: log_sum_exp(&null),
            log_alt: log_sum_exp(&alt),
        })
    }
}

/// `resid` is overwritten with `L⁻¹ resid`.
fn gaussian_log_density(resid: &mut [f64], e: &ConfigEntry) -> f64 {
    e.factor.solve_lower_in_place(resid);
    let q: f64 = resid.iter().map(|r| r * r).sum();
    -0.5 * (q + e.log_det + resid.len() as f64 * LN_2PI)
}

/// Log multivariate normal density from a Cholesky factor of the covariance.
pub fn log_mvn(v: &[f64], mean: &[f64], factor: &Cholesky) -> Result<f64> {
    let d = factor.dim();
    for len in [v.len(), mean.len()] {
        if len != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: len,
            });
        }
    }
    let mut r: Vec<f64> = v.iter().zip(mean).map(|(a, b)| a - b).collect();
    factor.solve_lower_in_place(&mut r);
    let q: f64 = r.iter().map(|r| r * r).sum();
    Ok(-0.5 * (q + factor.log_det() + d as f64 * (2.0 * PI).ln()))
}

/// Log masses of the null and alternative states of one hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowMasses {
    pub log_null: f64,
    pub log_alt: f64,
}

impl WindowMasses {
    pub fn null_probability(&self) -> f64 {
        logistic(self.log_null - self.log_alt)
    }

    pub fn alt_probability(&self) -> f64 {
        logistic(self.log_alt - self.log_null)
    }
}

/// `1 / (1 + e^{-t})` without overflow.
fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn window_values<'a>(x: &'a Series, w: &Window) -> &'a [f64] {
    &x.values()[w.start..=w.end]
}

pub fn window_masses(x: &Series, i: usize, params: &ModelParams, k: usize) -> Result<WindowMasses> {
    let w = window_of(i, x.len(), k)?;
    let table = build_config_table(params, w.dim())?;
    table.window_masses(window_values(x, &w), w.offset())
}

/// Windowed posterior null probability of hypothesis `i` (0-based).
pub fn posterior_one(x: &Series, i: usize, params: &ModelParams, k: usize) -> Result<f64> {
    Ok(window_masses(x, i, params, k)?.null_probability())
}

/// Scores with their ascending order (ties by index).
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorScores {
    pi: Vec<f64>,
    order: Vec<usize>,
}

impl PosteriorScores {
    pub fn new(pi: Vec<f64>) -> Result<Self> {
        if let Some(i) = pi.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::invalid(format!(
                "score {i} = {} outside [0, 1]",
                pi[i]
            )));
        }
        let mut order: Vec<usize> = (0..pi.len()).collect();
        order.sort_by(|&a, &b| pi[a].total_cmp(&pi[b]).then(a.cmp(&b)));
        Ok(Self { pi, order })
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// Scores in ascending order.
    pub fn sorted(&self) -> impl Iterator<Item = f64> + '_ {
        self.order.iter().map(|&i| self.pi[i])
    }
}

/// Windowed posterior for every hypothesis. One table per window dimension
/// is built and shared: interior windows all have dimension `2k + 1`, and the
/// boundary windows on both ends reuse the same smaller tables because the
/// Toeplitz covariance only depends on the dimension.
pub fn posterior_scores(x: &Series, params: &ModelParams, k: usize) -> Result<PosteriorScores> {
    let m = x.len();
    let mut tables: HashMap<usize, ConfigTable> = HashMap::new();
    let mut pi = Vec::with_capacity(m);
    for i in 0..m {
        let w = window_of(i, m, k)?;
        let d = w.dim();
        let table = match tables.entry(d) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(build_config_table(params, d)?),
        };
        let masses = table.window_masses(window_values(x, &w), w.offset())?;
        pi.push(masses.null_probability());
    }
    PosteriorScores::new(pi)
}

/// Exact `P(θ_i = 0 | X)` by enumerating all `2^m` configurations with the
/// full `m × m` covariance. Reference implementation for small `m` only.
pub fn exact_posterior(x: &Series, params: &ModelParams) -> Result<Vec<f64>> {
    params.validate()?;
    let m = x.len();
    if m > MAX_EXACT_M {
        return Err(Error::TooLarge {
            size: m,
            limit: MAX_EXACT_M,
        });
    }
    let v = x.values();
    let (lw0, lw1) = (params.w0.ln(), (1.0 - params.w0).ln());
    let n = 1usize << m;
    let mut terms = Vec::with_capacity(n);
    for config in 0..n {
        let on = |a: usize| config >> a & 1 == 1;
        let cov = Matrix::from_fn(m, |a, b| {
            params.gamma.lag(a.abs_diff(b)) + if a == b && on(a) { params.tau2 } else { 0.0 }
        });
        let factor = Cholesky::factor(&cov).map_err(|_| Error::ConfigFactorization {
            config: config_label(config as u32, m),
            dim: m,
        })?;
        let mean: Vec<f64> = (0..m)
            .map(|a| if on(a) { params.eta } else { 0.0 })
            .collect();
        let s = config.count_ones() as f64;
        terms.push(log_mvn(v, &mean, &factor)? + (m as f64 - s) * lw0 + s * lw1);
    }
    let total = log_sum_exp(&terms);
    Ok((0..m)
        .map(|i| {
            let null: Vec<f64> = (0..n)
                .filter(|c| c >> i & 1 == 0)
                .map(|c| terms[c])
                .collect();
            (log_sum_exp(&null) - total).exp().min(1.0)
        })
        .collect())
}

/// Two-component local posterior `w0 φ(x) / (w0 φ(x) + (1 − w0) φ_{η, 1+τ²}(x))`
/// for independent observations.
pub fn independent_posterior(x: f64, params: &ModelParams) -> f64 {
    let var1 = 1.0 + params.tau2;
    let l0 = params.w0.ln() - 0.5 * (x * x + LN_2PI);
    let l1 = (1.0 - params.w0).ln() - 0.5 * ((x - params.eta).powi(2) / var1 + var1.ln() + LN_2PI);
    logistic(l0 - l1)
}
