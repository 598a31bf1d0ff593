//! Rejection rules.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::estimation::{fit, EstimationOptions, Fit, W0Source};
use crate::model::{ModelParams, Series};
use crate::posterior::{posterior_scores, PosteriorScores};
use crate::rng::SimRng;

/// Largest `m` accepted by [`oracle_best_subset`].
pub const MAX_ORACLE_M: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    /// Posterior null probabilities; smaller is more significant.
    PosteriorNull,
    /// Two-sided p-values.
    PValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    /// Rejected indices (0-based) in ascending score order.
    pub rejected: Vec<usize>,
    pub k_hat: usize,
    pub alpha: f64,
    pub kind: ScoreKind,
    /// The per-hypothesis scores the rule ran on.
    pub scores: Vec<f64>,
}

impl Decision {
    pub fn rejection_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.scores.len()];
        for &i in &self.rejected {
            mask[i] = true;
        }
        mask
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

/// Rejects the `k̂` smallest scores, `k̂ = max{k : mean of the k smallest ≤ α}`
/// (0 when no prefix qualifies).
pub fn cutoff_running_mean(scores: &PosteriorScores, alpha: f64) -> Result<Decision> {
    check_alpha(alpha)?;
    let mut sum = 0.0;
    let mut k_hat = 0;
    for (k, s) in scores.sorted().enumerate() {
        sum += s;
        if sum / (k + 1) as f64 <= alpha {
            k_hat = k + 1;
        }
    }
    let rejected = scores.order()[..k_hat].to_vec();
    debug_assert!(
        k_hat == 0
            || rejected.iter().map(|&i| scores.pi()[i]).sum::<f64>() / k_hat as f64
                <= alpha * (1.0 + 1e-12)
    );
    Ok(Decision {
        rejected,
        k_hat,
        alpha,
        kind: ScoreKind::PosteriorNull,
        scores: scores.pi().to_vec(),
    })
}

/// Running-mean cutoff on windowed posteriors under known parameters.
pub fn approximate_bayes(
    x: &Series,
    true_params: &ModelParams,
    k: usize,
    alpha: f64,
) -> Result<Decision> {
    check_alpha(alpha)?;
    cutoff_running_mean(&posterior_scores(x, true_params, k)?, alpha)
}

/// Fit the nuisance parameters, score, and cut.
pub fn empirical_bayes(
    x: &Series,
    alpha: f64,
    k: usize,
    w0_source: W0Source,
    opts: &EstimationOptions,
    rng: &mut SimRng,
) -> Result<(Decision, Fit)> {
    check_alpha(alpha)?;
    let opts = EstimationOptions { k, ..opts.clone() };
    let fitted = fit(x.values(), w0_source, &opts, rng)?;
    let decision = cutoff_running_mean(&posterior_scores(x, &fitted.params, k)?, alpha)?;
    Ok((decision, fitted))
}

/// Standard normal upper tail `1 − Φ(z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

/// Two-sided p-values `2 (1 − Φ(|x|))`.
pub fn normal_p_values(x: &Series) -> Vec<f64> {
    x.values()
        .iter()
        .map(|v| libm::erfc(v.abs() / SQRT_2).min(1.0))
        .collect()
}

/// Step-up at slope `α / (m w0)`; `w0 = 1` is the classical procedure.
pub fn bh_adaptive(p: &[f64], alpha: f64, w0: f64) -> Result<Decision> {
    check_alpha(alpha)?;
    if !(w0 > 0.0 && w0 <= 1.0) {
        return Err(Error::invalid(format!("w0 must lie in (0, 1], got {w0}")));
    }
    if let Some(i) = p.iter().position(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::invalid(format!(
            "p-value {i} = {} outside [0, 1]",
            p[i]
        )));
    }
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let slope = alpha / (m as f64 * w0);
    let k_hat = order
        .iter()
        .enumerate()
        .rev()
        .find(|(r, &i)| p[i] <= (r + 1) as f64 * slope)
        .map_or(0, |(r, _)| r + 1);
    order.truncate(k_hat);
    Ok(Decision {
        rejected: order,
        k_hat,
        alpha,
        kind: ScoreKind::PValue,
        scores: p.to_vec(),
    })
}

/// Largest `|S|` over all subsets with mean score `≤ α`, by exhaustive
/// enumeration. Test oracle for [`cutoff_running_mean`].
pub fn oracle_best_subset(scores: &[f64], alpha: f64) -> Result<usize> {
    let m = scores.len();
    if m > MAX_ORACLE_M {
        return Err(Error::TooLarge {
            size: m,
            limit: MAX_ORACLE_M,
        });
    }
    let mut best = 0;
    for set in 1u32..(1 << m) {
        let size = set.count_ones() as usize;
        if size <= best {
            continue;
        }
        let sum: f64 = (0..m)
            .filter(|i| set >> i & 1 == 1)
            .map(|i| scores[i])
            .sum();
        if sum / size as f64 <= alpha {
            best = size;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AutocovSeq;

    fn scores(v: &[f64]) -> PosteriorScores {
        PosteriorScores::new(v.to_vec()).unwrap()
    }

    #[test]
    fn running_mean_hand_example() {
        // cumulative means 0.02, 0.035, 0.09, 0.2925
        let d = cutoff_running_mean(&scores(&[0.02, 0.05, 0.20, 0.9]), 0.1).unwrap();
        assert_eq!(d.k_hat, 3);
        assert_eq!(d.rejected, vec![0, 1, 2]);
        assert_eq!(
            oracle_best_subset(&[0.02, 0.05, 0.20, 0.9], 0.1).unwrap(),
            3
        );
    }

    #[test]
    fn running_mean_edges() {
        let d = cutoff_running_mean(&scores(&[0.5, 0.3, 0.9]), 0.1).unwrap();
        assert_eq!(d.k_hat, 0);
        assert!(d.rejected.is_empty());
        assert_eq!(oracle_best_subset(&[0.5, 0.3, 0.9], 0.1).unwrap(), 0);
        let d = cutoff_running_mean(&scores(&[0.0; 7]), 0.05).unwrap();
        assert_eq!(d.k_hat, 7);
        // prefix means 0.98, 0.985, 0.99
        let d = cutoff_running_mean(&scores(&[1.0, 0.99, 0.98]), 1.0 - 1e-15).unwrap();
        assert_eq!(d.k_hat, 3);
        assert!(cutoff_running_mean(&scores(&[0.1]), 0.0).is_err());
    }

    #[test]
    fn running_mean_order_is_ascending_scores() {
        let d = cutoff_running_mean(&scores(&[0.3, 0.01, 0.2, 0.02]), 0.2).unwrap();
        assert_eq!(d.rejected, vec![1, 3, 2, 0]);
        assert_eq!(d.rejection_mask(), vec![true; 4]);
    }

    #[test]
    fn p_values() {
        let x = Series::new(vec![
            0.0,
            1.959_963_984_540_054,
            -1.959_963_984_540_054,
            8.5,
        ])
        .unwrap();
        let p = normal_p_values(&x);
        assert_eq!(p[0], 1.0);
        assert!((p[1] - 0.05).abs() < 1e-12);
        assert_eq!(p[1], p[2]);
        assert!(p[3] > 0.0 && p[3] < 1e-16);
    }

    #[test]
    fn normal_tail_against_simpson() {
        // 1 − Φ(z) = 1/2 − ∫_0^z φ, Simpson with 2·10^5 panels
        for z in [0.5, 1.0, 2.5, 4.0] {
            let n = 200_000;
            let h = z / n as f64;
            let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let mut s = phi(0.0) + phi(z);
            for i in 1..n {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * phi(i as f64 * h);
            }
            let tail = 0.5 - s * h / 3.0;
            assert!((normal_sf(z) - tail).abs() < 1e-13, "z = {z}");
        }
    }

    #[test]
    fn bh_hand_example() {
        // thresholds 0.0333, 0.0667, 0.1
        let d = bh_adaptive(&[0.01, 0.04, 0.3], 0.1, 1.0).unwrap();
        assert_eq!(d.k_hat, 2);
        assert_eq!(d.rejected, vec![0, 1]);
        assert_eq!(bh_adaptive(&[0.05], 0.1, 1.0).unwrap().k_hat, 1);
        assert_eq!(bh_adaptive(&[1.0, 1.0], 0.1, 1.0).unwrap().k_hat, 0);
    }

    #[test]
    fn bh_step_up_not_step_down() {
        // p_(1) fails its threshold but p_(2) passes: step-up rejects both
        let d = bh_adaptive(&[0.04, 0.045], 0.05, 1.0).unwrap();
        assert_eq!(d.k_hat, 2);
    }

    #[test]
    fn bh_w0_enlarges_rejections() {
        let p = [0.001, 0.012, 0.021, 0.04, 0.2, 0.5];
        let plain = bh_adaptive(&p, 0.1, 1.0).unwrap().k_hat;
        let adaptive = bh_adaptive(&p, 0.1, 0.6).unwrap().k_hat;
        assert!(adaptive >= plain);
        assert!(bh_adaptive(&p, 0.1, 0.0).is_err());
        assert!(bh_adaptive(&[1.5], 0.1, 1.0).is_err());
    }

    #[test]
    fn oracle_guard() {
        assert!(oracle_best_subset(&[0.1; 21], 0.1).is_err());
    }

    #[test]
    fn approximate_bayes_near_one() {
        let p = ModelParams::new(2.0, 0.0, 0.9, AutocovSeq::new(vec![1.0, 0.6]).unwrap()).unwrap();
        let x = Series::new(vec![0.1, -0.3, 4.0, 0.2]).unwrap();
        let d = approximate_bayes(&x, &p, 1, 1.0 - 1e-12).unwrap();
        assert_eq!(d.k_hat, 4);
    }
}
