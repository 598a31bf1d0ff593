//! Observation model: `X_i = μ_i + ε_i` with stationary Gaussian noise and
//! sparse or mixture signal means.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BandedCholesky, Matrix};

/// Truncated autocovariance sequence `γ(0), …, γ(L)`, normalized so
/// `γ(0) = 1`. Lags past `L` are zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AutocovSeq(Vec<f64>);

impl AutocovSeq {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        match values.first() {
            None => return Err(Error::invalid("autocovariance sequence is empty")),
            Some(&g0) if g0 != 1.0 => {
                return Err(Error::invalid(format!("gamma[0] must be 1, got {g0}")))
            }
            _ => {}
        }
        if let Some((j, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || v.abs() > 1.0)
        {
            return Err(Error::invalid(format!(
                "|gamma[{j}]| must be <= 1, got {v}"
            )));
        }
        Ok(Self(values))
    }

    /// Construct and require the `max_m × max_m` Toeplitz matrix to factor.
    pub fn with_pd_check(values: Vec<f64>, max_m: usize) -> Result<Self> {
        let seq = Self::new(values)?;
        seq.factor(max_m)?;
        Ok(seq)
    }

    pub fn white_noise() -> Self {
        Self(vec![1.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Largest stored lag `L`.
    pub fn max_lag(&self) -> usize {
        self.0.len() - 1
    }

    pub fn lag(&self, j: usize) -> f64 {
        self.0.get(j).copied().unwrap_or(0.0)
    }

    /// Keeps lags `0..=k`.
    pub fn truncated(&self, k: usize) -> Self {
        Self(self.0[..=k.min(self.max_lag())].to_vec())
    }

    pub fn factor(&self, n: usize) -> Result<BandedCholesky> {
        BandedCholesky::toeplitz(&self.0, n)
    }

    pub fn is_positive_definite(&self, n: usize) -> bool {
        self.factor(n).is_ok()
    }
}

impl<'de> Deserialize<'de> for AutocovSeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(d)?;
        AutocovSeq::new(values).map_err(serde::de::Error::custom)
    }
}

/// Entry `(a, b)` is `γ(|a − b|)`.
pub fn build_toeplitz(gamma: &AutocovSeq, n: usize) -> Matrix {
    Matrix::from_fn(n, |a, b| gamma.lag(a.abs_diff(b)))
}

/// Nuisance parameters of the nominal mixture model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub eta: f64,
    pub tau2: f64,
    pub w0: f64,
    pub gamma: AutocovSeq,
}

impl ModelParams {
    pub fn new(eta: f64, tau2: f64, w0: f64, gamma: AutocovSeq) -> Result<Self> {
        let p = Self {
            eta,
            tau2,
            w0,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w0 > 0.0 && self.w0 < 1.0) {
            return Err(Error::invalid(format!(
                "w0 must lie in (0, 1), got {}",
                self.w0
            )));
        }
        if !self.tau2.is_finite() || self.tau2 < 0.0 {
            return Err(Error::invalid(format!(
                "tau2 must be >= 0, got {}",
                self.tau2
            )));
        }
        if !self.eta.is_finite() {
            return Err(Error::invalid("eta must be finite"));
        }
        Ok(())
    }
}

/// Simulation truth: `theta[i]` is true when hypothesis `i` is false.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub theta: Vec<bool>,
    pub mu: Vec<f64>,
}

impl GroundTruth {
    pub fn new(theta: Vec<bool>, mu: Vec<f64>) -> Result<Self> {
        if theta.len() != mu.len() {
            return Err(Error::DimensionMismatch {
                expected: theta.len(),
                got: mu.len(),
            });
        }
        if let Some(i) = (0..theta.len()).find(|&i| !theta[i] && mu[i] != 0.0) {
            return Err(Error::invalid(format!(
                "null hypothesis {i} has nonzero mean"
            )));
        }
        Ok(Self { theta, mu })
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn signal_count(&self) -> usize {
        self.theta.iter().filter(|&&t| t).count()
    }
}

/// Observed series.
#[derive(Debug, Clone, PartialEq)]
pub struct Series(Vec<f64>);

impl Series {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::invalid("series must have at least one observation"));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("observation {i} is not finite")));
        }
        Ok(Self(x))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Where the nonnull means of a fixed-count design go.
#[derive(Debug, Clone, PartialEq)]
pub enum Placement {
    /// Fresh uniform subset on every draw.
    Random,
    /// Explicit 0-based indices.
    Indices(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignalMode {
    Mixture {
        w0: f64,
        eta: f64,
        tau2: f64,
    },
    Fixed {
        count: usize,
        value: f64,
        placement: Placement,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimDesign {
    pub m: usize,
    pub signal: SignalMode,
    pub gamma: AutocovSeq,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for SimDesign {
    fn default() -> Self {
        Self {
            m: 1000,
            signal: SignalMode::Fixed {
                count: 100,
                value: 2.0,
                placement: Placement::Random,
            },
            gamma: AutocovSeq(vec![1.0, 0.6, 0.4, 0.2, 0.1]),
            alpha: 0.1,
            seed: 20_070_101,
        }
    }
}

impl SimDesign {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("m must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        match &self.signal {
            SignalMode::Mixture { w0, tau2, eta } => {
                check_mixture(*w0, *tau2)?;
                if !eta.is_finite() {
                    return Err(Error::invalid("eta must be finite"));
                }
            }
            SignalMode::Fixed {
                count,
                value,
                placement,
            } => {
                if *count > self.m {
                    return Err(Error::invalid(format!(
                        "count {count} exceeds m = {}",
                        self.m
                    )));
                }
                if !value.is_finite() {
                    return Err(Error::invalid("signal value must be finite"));
                }
                if let Placement::Indices(idx) = placement {
                    check_indices(idx, *count, self.m)?;
                }
            }
        }
        Ok(())
    }

    /// Null proportion of the generating law.
    pub fn true_w0(&self) -> f64 {
        match &self.signal {
            SignalMode::Mixture { w0, .. } => *w0,
            SignalMode::Fixed { count, .. } => 1.0 - *count as f64 / self.m as f64,
        }
    }

    /// Nominal-model parameters matching the generating law. For fixed
    /// designs the alternative is a point mass (`tau2 = 0`).
    pub fn true_params(&self) -> Result<ModelParams> {
        let (eta, tau2) = match &self.signal {
            SignalMode::Mixture { eta, tau2, .. } => (*eta, *tau2),
            SignalMode::Fixed { value, .. } => (*value, 0.0),
        };
        ModelParams::new(eta, tau2, self.true_w0(), self.gamma.clone())
    }
}

fn check_mixture(w0: f64, tau2: f64) -> Result<()> {
    if !(w0 > 0.0 && w0 < 1.0) {
        return Err(Error::invalid(format!("w0 must lie in (0, 1), got {w0}")));
    }
    if !tau2.is_finite() || tau2 < 0.0 {
        return Err(Error::invalid(format!("tau2 must be >= 0, got {tau2}")));
    }
    Ok(())
}

fn check_indices(idx: &[usize], count: usize, m: usize) -> Result<()> {
    if idx.len() != count {
        return Err(Error::invalid(format!(
            "signal_indices has {} entries but count is {count}",
            idx.len()
        )));
    }
    let mut seen = vec![false; m];
    for &i in idx {
        if i >= m {
            return Err(Error::invalid(format!(
                "signal index {} out of range 1..={m}",
                i + 1
            )));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::invalid(format!("duplicate signal index {}", i + 1)));
        }
    }
    Ok(())
}

/// Precomputed factor for repeated noise draws of one length.
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    factor: BandedCholesky,
}

impl NoiseSampler {
    pub fn new(gamma: &AutocovSeq, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("noise length must be positive"));
        }
        Ok(Self {
            factor: gamma.factor(m)?,
        })
    }

    pub fn len(&self) -> usize {
        self.factor.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.factor.dim() == 0
    }

    /// `L z` for a caller-supplied standard normal vector.
    pub fn transform(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: z.len(),
            });
        }
        Ok(self.factor.mul_lower(z))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z: Vec<f64> = (0..self.len())
            .map(|_| StandardNormal.sample(rng))
            .collect();
        self.factor.mul_lower(&z)
    }
}

/// One draw of mean-zero stationary noise with covariance `Toeplitz(gamma, m)`.
pub fn simulate_noise<R: Rng + ?Sized>(
    gamma: &AutocovSeq,
    m: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(NoiseSampler::new(gamma, m)?.sample(rng))
}

/// `θ_i ~ Bernoulli(1 − w0)` i.i.d., `μ_i ~ N(η, τ²)` where `θ_i = 1`.
pub fn draw_mixture_truth<R: Rng + ?Sized>(
    w0: f64,
    eta: f64,
    tau2: f64,
    m: usize,
    rng: &mut R,
) -> Result<GroundTruth> {
    check_mixture(w0, tau2)?;
    let alt = Normal::new(eta, tau2.sqrt()).map_err(|e| Error::invalid(e.to_string()))?;
    let mut theta = Vec::with_capacity(m);
    let mut mu = Vec::with_capacity(m);
    for _ in 0..m {
        let signal = rng.random::<f64>() >= w0;
        theta.push(signal);
        mu.push(if signal { alt.sample(rng) } else { 0.0 });
    }
    Ok(GroundTruth { theta, mu })
}

/// Exactly `count` signals of height `value`.
pub fn fixed_truth<R: Rng + ?Sized>(
    m: usize,
    count: usize,
    value: f64,
    placement: &Placement,
    rng: &mut R,
) -> Result<GroundTruth> {
    if count > m {
        return Err(Error::invalid(format!("count {count} exceeds m = {m}")));
    }
    let idx: Vec<usize> = match placement {
        Placement::Random => sample(rng, m, count).into_vec(),
        Placement::Indices(idx) => {
            check_indices(idx, count, m)?;
            idx.clone()
        }
    };
    let mut theta = vec![false; m];
    let mut mu = vec![0.0; m];
    for i in idx {
        theta[i] = true;
        mu[i] = value;
    }
    // value == 0 would make a "signal" with zero mean; the truth is still valid
    Ok(GroundTruth { theta, mu })
}

/// Draws the truth first, then the noise, from the same stream.
pub fn simulate_series<R: Rng + ?Sized>(
    design: &SimDesign,
    rng: &mut R,
) -> Result<(Series, GroundTruth)> {
    let sampler = NoiseSampler::new(&design.gamma, design.m)?;
    simulate_series_with(design, &sampler, rng)
}

/// As [`simulate_series`] with a prebuilt noise factor.
pub fn simulate_series_with<R: Rng + ?Sized>(
    design: &SimDesign,
    sampler: &NoiseSampler,
    rng: &mut R,
) -> Result<(Series, GroundTruth)> {
    design.validate()?;
    if sampler.len() != design.m {
        return Err(Error::DimensionMismatch {
            expected: design.m,
            got: sampler.len(),
        });
    }
    let truth = match &design.signal {
        SignalMode::Mixture { w0, eta, tau2 } => {
            draw_mixture_truth(*w0, *eta, *tau2, design.m, rng)?
        }
        SignalMode::Fixed {
            count,
            value,
            placement,
        } => fixed_truth(design.m, *count, *value, placement, rng)?,
    };
    let noise = sampler.sample(rng);
    let x = truth.mu.iter().zip(noise).map(|(mu, e)| mu + e).collect();
    Ok((Series::new(x)?, truth))
}

// JSON form of SimDesign.

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
enum SignalJson {
    Fixed { count: usize, value: f64 },
    Mixture { w0: f64, eta: f64, tau2: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SimDesignJson {
    m: usize,
    alpha: f64,
    seed: u64,
    gamma: AutocovSeq,
    signal: SignalJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    signal_indices: Option<Vec<usize>>,
}

impl Serialize for SimDesign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (signal, signal_indices) = match &self.signal {
            SignalMode::Mixture { w0, eta, tau2 } => (
                SignalJson::Mixture {
                    w0: *w0,
                    eta: *eta,
                    tau2: *tau2,
                },
                None,
            ),
            SignalMode::Fixed {
                count,
                value,
                placement,
            } => (
                SignalJson::Fixed {
                    count: *count,
                    value: *value,
                },
                match placement {
                    Placement::Random => None,
                    Placement::Indices(idx) => Some(idx.iter().map(|i| i + 1).collect()),
                },
            ),
        };
        SimDesignJson {
            m: self.m,
            alpha: self.alpha,
            seed: self.seed,
            gamma: self.gamma.clone(),
            signal,
            signal_indices,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimDesign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SimDesignJson::deserialize(d)?;
        let signal = match raw.signal {
            SignalJson::Mixture { w0, eta, tau2 } => {
                if raw.signal_indices.is_some() {
                    return Err(D::Error::custom(
                        "signal_indices requires fixed signal mode",
                    ));
                }
                SignalMode::Mixture { w0, eta, tau2 }
            }
            SignalJson::Fixed { count, value } => {
                let placement = match raw.signal_indices {
                    None => Placement::Random,
                    Some(idx) => {
                        if idx.contains(&0) {
                            return Err(D::Error::custom("signal_indices are 1-based"));
                        }
                        Placement::Indices(idx.into_iter().map(|i| i - 1).collect())
                    }
                };
                SignalMode::Fixed {
                    count,
                    value,
                    placement,
                }
            }
        };
        let design = SimDesign {
            m: raw.m,
            alpha: raw.alpha,
            seed: raw.seed,
            gamma: raw.gamma,
            signal,
        };
        design.validate().map_err(D::Error::custom)?;
        Ok(design)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Cholesky;
    use crate::rng::rng_from_seed;

    fn paper_gamma() -> AutocovSeq {
        AutocovSeq::new(vec![1.0, 0.6, 0.4, 0.2, 0.1]).unwrap()
    }

    #[test]
    fn autocov_invariants() {
        assert!(AutocovSeq::new(vec![]).is_err());
        assert!(AutocovSeq::new(vec![0.9, 0.1]).is_err());
        assert!(AutocovSeq::new(vec![1.0, 1.5]).is_err());
        assert!(AutocovSeq::with_pd_check(vec![1.0, 0.9, 0.9, 0.0], 10).is_err());
        assert!(AutocovSeq::with_pd_check(vec![1.0, 0.6, 0.4, 0.2, 0.1], 1000).is_ok());
        assert_eq!(paper_gamma().lag(7), 0.0);
    }

    #[test]
    fn toeplitz_white_noise_is_identity() {
        let t = build_toeplitz(&AutocovSeq::white_noise(), 3);
        assert_eq!(t, Matrix::from_fn(3, |a, b| if a == b { 1.0 } else { 0.0 }));
    }

    #[test]
    fn toeplitz_banded_first_row() {
        let t = build_toeplitz(&paper_gamma(), 6);
        let row: Vec<f64> = (0..6).map(|b| t.get(0, b)).collect();
        assert_eq!(row, vec![1.0, 0.6, 0.4, 0.2, 0.1, 0.0]);
        assert!(t.is_symmetric());
        assert!((0..6).all(|i| t.get(i, i) == 1.0));
    }

    #[test]
    fn toeplitz_high_correlation_is_pd() {
        // minors: 1, 1 - .99^2, and det of [[1,.99,0],[.99,1,.99],[0,.99,1]] = 1 - 2(.99^2)
        let g = AutocovSeq::new(vec![1.0, 0.99]).unwrap();
        let t = build_toeplitz(&g, 3);
        let d2 = 1.0 - 0.99f64.powi(2);
        let d3 = 1.0 - 2.0 * 0.99f64.powi(2);
        assert!(d2 > 0.0);
        // third minor is negative: the 3x3 matrix is NOT PD, the 2x2 is
        assert!(d3 < 0.0);
        assert!(Cholesky::factor(&build_toeplitz(&g, 2)).is_ok());
        assert!(matches!(
            Cholesky::factor(&t),
            Err(Error::NotPositiveDefinite { minor: 3 })
        ));
    }

    #[test]
    fn noise_from_fixed_z() {
        let g = AutocovSeq::new(vec![1.0, 0.5]).unwrap();
        let s = NoiseSampler::new(&g, 2).unwrap();
        assert_eq!(s.transform(&[1.0, 0.0]).unwrap(), vec![1.0, 0.5]);
        assert!(s.transform(&[1.0]).is_err());
    }

    #[test]
    fn noise_error_names_minor() {
        let g = AutocovSeq::new(vec![1.0, 0.99]).unwrap();
        let err = simulate_noise(&g, 5, &mut rng_from_seed(1)).unwrap_err();
        assert!(err.to_string().contains("order 3"), "{err}");
    }

    #[test]
    fn white_noise_variance_near_one() {
        let e = simulate_noise(&AutocovSeq::white_noise(), 200_000, &mut rng_from_seed(3)).unwrap();
        let v = e.iter().map(|x| x * x).sum::<f64>() / e.len() as f64;
        // sd of the sample second moment is sqrt(2/n) ~ 0.0032
        assert!((v - 1.0).abs() < 0.016, "{v}");
    }

    #[test]
    fn mixture_degenerate_and_point_mass() {
        let t = draw_mixture_truth(1.0 - 1e-12, 2.0, 1.0, 5000, &mut rng_from_seed(4)).unwrap();
        assert_eq!(t.signal_count(), 0);
        assert!(t.mu.iter().all(|&m| m == 0.0));

        let m = 10_000;
        let t = draw_mixture_truth(0.9, 2.0, 0.0, m, &mut rng_from_seed(5)).unwrap();
        let frac = t.signal_count() as f64 / m as f64;
        let se = (0.09f64 / m as f64).sqrt();
        assert!((frac - 0.1).abs() < 4.0 * se, "{frac}");
        for (th, mu) in t.theta.iter().zip(&t.mu) {
            assert_eq!(*mu, if *th { 2.0 } else { 0.0 });
        }
        assert!(draw_mixture_truth(1.0, 0.0, 0.0, 3, &mut rng_from_seed(0)).is_err());
        assert!(draw_mixture_truth(0.5, 0.0, -1.0, 3, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn fixed_truth_counts() {
        let mut rng = rng_from_seed(6);
        let t = fixed_truth(1000, 100, 2.0, &Placement::Random, &mut rng).unwrap();
        assert_eq!(t.signal_count(), 100);
        assert_eq!(t.mu.iter().filter(|&&v| v == 2.0).count(), 100);
        assert_eq!(t.mu.iter().filter(|&&v| v == 0.0).count(), 900);

        let t = fixed_truth(10, 0, 2.0, &Placement::Random, &mut rng).unwrap();
        assert_eq!(t.signal_count(), 0);
        let t = fixed_truth(10, 10, -1.5, &Placement::Random, &mut rng).unwrap();
        assert!(t.mu.iter().all(|&v| v == -1.5));
        assert!(fixed_truth(3, 4, 1.0, &Placement::Random, &mut rng).is_err());

        let t = fixed_truth(5, 2, 1.0, &Placement::Indices(vec![4, 1]), &mut rng).unwrap();
        assert_eq!(t.theta, vec![false, true, false, false, true]);
        assert!(fixed_truth(5, 2, 1.0, &Placement::Indices(vec![1, 1]), &mut rng).is_err());
    }

    #[test]
    fn series_is_truth_plus_seeded_noise() {
        let design = SimDesign::default();
        let (x, truth) = simulate_series(&design, &mut rng_from_seed(11)).unwrap();

        let mut rng = rng_from_seed(11);
        let SignalMode::Fixed {
            count,
            value,
            placement,
        } = &design.signal
        else {
            unreachable!()
        };
        let t2 = fixed_truth(design.m, *count, *value, placement, &mut rng).unwrap();
        let noise = simulate_noise(&design.gamma, design.m, &mut rng).unwrap();
        assert_eq!(truth, t2);
        for ((xi, mu), e) in x.values().iter().zip(&truth.mu).zip(&noise) {
            assert_eq!(*xi, mu + e);
        }
        let (x2, _) = simulate_series(&design, &mut rng_from_seed(11)).unwrap();
        assert_eq!(x, x2);
    }

    #[test]
    fn design_json_round_trip() {
        let json = r#"{"m":1000,"alpha":0.1,"seed":7,"gamma":[1.0,0.6,0.4,0.2,0.1],
                       "signal":{"mode":"fixed","count":2,"value":2.0},"signal_indices":[1,1000]}"#;
        let d: SimDesign = serde_json::from_str(json).unwrap();
        assert_eq!(
            d.signal,
            SignalMode::Fixed {
                count: 2,
                value: 2.0,
                placement: Placement::Indices(vec![0, 999])
            }
        );
        let back: SimDesign = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);

        let mix = r#"{"m":50,"alpha":0.05,"seed":1,"gamma":[1.0],
                      "signal":{"mode":"mixture","w0":0.9,"eta":2.0,"tau2":0.0}}"#;
        let d: SimDesign = serde_json::from_str(mix).unwrap();
        assert_eq!(d.true_w0(), 0.9);

        let bad = r#"{"m":5,"alpha":0.1,"seed":1,"gamma":[1.0],"signal":{"mode":"fixed","count":9,"value":1.0}}"#;
        assert!(serde_json::from_str::<SimDesign>(bad).is_err());
        let bad_gamma = r#"{"m":5,"alpha":0.1,"seed":1,"gamma":[0.5],"signal":{"mode":"fixed","count":1,"value":1.0}}"#;
        assert!(serde_json::from_str::<SimDesign>(bad_gamma).is_err());
    }
}
