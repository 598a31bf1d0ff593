//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use ebfdr::bench::{
    raw_csv_string, read_raw_csv, run_benchmark, summarize, summary_csv_string, BenchConfig,
    Procedure,
};
use ebfdr::estimation::{bandwidth, fit, EstimationOptions, FourierKernel, W0Source};
use ebfdr::model::{
    simulate_series, AutocovSeq, ModelParams, Placement, Series, SignalMode, SimDesign,
};
use ebfdr::posterior::PosteriorScores;
use ebfdr::posterior::{exact_posterior, independent_posterior, posterior_scores};
use ebfdr::procedures::{cutoff_running_mean, oracle_best_subset};
use ebfdr::rng::rng_from_seed;

type Outcome = Result<String, String>;
type Band = (f64, f64);
type Criterion = fn() -> Outcome;

fn check(fails: &mut Vec<String>, ok: bool, msg: String) {
    if !ok {
        fails.push(msg);
    }
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo && v <= hi
}

fn table_reproduction() -> Outcome {
    let cfg = BenchConfig::default();
    let rep = run_benchmark(&SimDesign::default(), &cfg).map_err(|e| e.to_string())?;
    let bands: [(Procedure, Band, Band); 5] = [
        (Procedure::Bh, (10.0, 17.0), (0.06, 0.16)),
        (Procedure::ApproxBayes, (65.0, 88.0), (0.08, 0.16)),
        (Procedure::EbTrue, (25.0, 44.0), (0.05, 0.15)),
        (Procedure::EbFourier, (24.0, 46.0), (0.08, 0.18)),
        (Procedure::EbBootstrap, (25.0, 47.0), (0.08, 0.18)),
    ];
    let mut fails = Vec::new();
    let mut report = Vec::new();
    let mean_r = |p: Procedure| rep.summary(p).map(|s| s.r.mean).unwrap_or(f64::NAN);
    for (p, r_band, fdp_band) in bands {
        let s = rep.summary(p).ok_or(format!("no summary for {p}"))?;
        report.push(format!(
            "{}: R {:.2} FDP {:.3} (n {})",
            p.id(),
            s.r.mean,
            s.fdp.mean,
            s.n
        ));
        check(
            &mut fails,
            within(s.r.mean, r_band.0, r_band.1),
            format!(
                "{} mean R {:.2} outside [{}, {}]",
                p.id(),
                s.r.mean,
                r_band.0,
                r_band.1
            ),
        );
        check(
            &mut fails,
            within(s.fdp.mean, fdp_band.0, fdp_band.1),
            format!(
                "{} mean FDP {:.3} outside [{}, {}]",
                p.id(),
                s.fdp.mean,
                fdp_band.0,
                fdp_band.1
            ),
        );
    }
    for eb in [
        Procedure::EbTrue,
        Procedure::EbFourier,
        Procedure::EbBootstrap,
    ] {
        check(
            &mut fails,
            mean_r(Procedure::ApproxBayes) > mean_r(eb) && mean_r(eb) > mean_r(Procedure::Bh),
            format!("power ordering violated for {}", eb.id()),
        );
    }
    check(
        &mut fails,
        rep.failures.is_empty(),
        format!("{} procedure failures", rep.failures.len()),
    );
    if fails.is_empty() {
        Ok(report.join("; "))
    } else {
        Err(format!("{} | {}", fails.join("; "), report.join("; ")))
    }
}

fn optimality_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let alphas = [0.05, 0.1, 0.3];
    for case in 0..1000 {
        let m = rng.random_range(1..=12);
        let scores: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let alpha = alphas[case % 3];
        let k_hat = cutoff_running_mean(&PosteriorScores::new(scores.clone()).unwrap(), alpha)
            .map_err(|e| e.to_string())?
            .k_hat;
        let best = oracle_best_subset(&scores, alpha).map_err(|e| e.to_string())?;
        if k_hat != best {
            return Err(format!(
                "case {case}: cutoff {k_hat} vs oracle {best} for {scores:?} at {alpha}"
            ));
        }
    }
    Ok("1000/1000 cases agree".into())
}

/// Autocovariance of a normalized moving average, PD for every length.
fn random_ma_acov(rng: &mut ChaCha8Rng, q: usize) -> AutocovSeq {
    let a: Vec<f64> = (0..=q).map(|_| rng.random_range(-1.0..1.0)).collect();
    let g = |j: usize| (0..=q - j).map(|i| a[i] * a[i + j]).sum::<f64>();
    let g0 = g(0);
    AutocovSeq::new((0..=q).map(|j| g(j) / g0).collect()).unwrap()
}

fn posterior_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let m = rng.random_range(1..=8);
        let q = rng.random_range(0..m);
        let gamma = random_ma_acov(&mut rng, q);
        let params = ModelParams::new(
            rng.random_range(0.5..3.0),
            rng.random_range(0.0..2.0),
            rng.random_range(0.5..0.95),
            gamma,
        )
        .unwrap();
        let x = Series::new(
            (0..m)
                .map(|_| 2.0 * rng.random::<f64>() * rng.sample::<f64, _>(StandardNormal) + 1.0)
                .collect(),
        )
        .unwrap();
        let windowed = posterior_scores(&x, &params, m - 1).map_err(|e| e.to_string())?;
        let exact = exact_posterior(&x, &params).map_err(|e| e.to_string())?;
        for (a, b) in windowed.pi().iter().zip(&exact) {
            worst = worst.max((a - b).abs());
            if (a - b).abs() > 1e-8 {
                return Err(format!("case {case}: windowed {a} vs exact {b}"));
            }
        }
        let white = ModelParams::new(
            params.eta,
            params.tau2,
            params.w0,
            AutocovSeq::white_noise(),
        )
        .unwrap();
        let k = rng.random_range(0..m);
        let scores = posterior_scores(&x, &white, k).map_err(|e| e.to_string())?;
        for (i, s) in scores.pi().iter().enumerate() {
            let closed = independent_posterior(x.values()[i], &white);
            if (s - closed).abs() > 1e-10 {
                return Err(format!(
                    "case {case}: white-noise window {s} vs closed form {closed}"
                ));
            }
        }
    }
    Ok(format!("max |windowed - exact| = {worst:.2e}"))
}

fn kernel_identities() -> Outcome {
    let opts = EstimationOptions::default();
    let m = SimDesign::default().m;
    let kernel = FourierKernel::for_series(m, &opts).map_err(|e| e.to_string())?;
    let h = bandwidth(m, opts.kappa);
    let n = 1_000_000;
    let mut notes = Vec::new();
    for (j, mu) in [0.0, 1.0, 2.0, 4.0].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(400 + j as u64);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            let v = kernel.eval(mu + z);
            s += v;
            s2 += v * v;
        }
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / (n - 1) as f64).sqrt();
        let target = if mu == 0.0 {
            1.0
        } else {
            (mu / h).sin() / (mu / h)
        };
        let dev = (mean - target).abs() / se;
        notes.push(format!("mu={mu}: {mean:.4} vs {target:.4} ({dev:.2} SE)"));
        if dev > 3.0 {
            return Err(notes.join("; "));
        }
    }
    Ok(notes.join("; "))
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn estimator_consistency() -> Outcome {
    let m = 100_000;
    let design = SimDesign {
        m,
        signal: SignalMode::Fixed {
            count: m / 10,
            value: 2.0,
            placement: Placement::Random,
        },
        ..SimDesign::default()
    };
    let reps = 50;
    let lags = 4;
    let opts = EstimationOptions {
        acov_lags: Some(lags),
        ..EstimationOptions::default()
    };
    let mut eta = Vec::new();
    let mut tau2 = Vec::new();
    let mut gamma = vec![Vec::new(); lags];
    for r in 0..reps {
        let (x, _) =
            simulate_series(&design, &mut rng_from_seed(5000 + r)).map_err(|e| e.to_string())?;
        let f = fit(
            x.values(),
            W0Source::True(0.9),
            &opts,
            &mut rng_from_seed(r),
        )
        .map_err(|e| e.to_string())?;
        eta.push(f.params.eta);
        tau2.push(f.params.tau2);
        for (j, g) in gamma.iter_mut().enumerate() {
            g.push(f.params.gamma.lag(j + 1));
        }
    }
    let mut fails = Vec::new();
    let mut notes = Vec::new();
    let se_check =
        |name: String, v: &[f64], truth: f64, fails: &mut Vec<String>, notes: &mut Vec<String>| {
            let (mean, sd) = mean_sd(v);
            let dev = (mean - truth).abs() / (sd / (v.len() as f64).sqrt());
            notes.push(format!("{name} {mean:.4} ({dev:.2} SE)"));
            if dev > 3.0 {
                fails.push(format!("{name} mean {mean} is {dev:.2} SE from {truth}"));
            }
        };
    se_check("eta".into(), &eta, 2.0, &mut fails, &mut notes);
    for (j, truth) in [0.6, 0.4, 0.2, 0.1].into_iter().enumerate() {
        se_check(
            format!("gamma({})", j + 1),
            &gamma[j],
            truth,
            &mut fails,
            &mut notes,
        );
    }
    let tau2_mean = mean_sd(&tau2).0;
    notes.push(format!("tau2 {tau2_mean:.4}"));
    check(
        &mut fails,
        tau2_mean <= 0.3,
        format!("mean clamped tau2 {tau2_mean} > 0.3"),
    );
    if fails.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("{} | {}", fails.join("; "), notes.join("; ")))
    }
}

fn determinism_and_conservation() -> Outcome {
    let design = SimDesign::default();
    let run = |threads| {
        let cfg = BenchConfig {
            n_trials: 16,
            base_seed: 77,
            threads: Some(threads),
            ..BenchConfig::default()
        };
        run_benchmark(&design, &cfg).map_err(|e| e.to_string())
    };
    let one = run(1)?;
    let raw_csv = raw_csv_string(&one.raw);
    let summary_csv = summary_csv_string(&one.summaries);
    for threads in [2, 4, 7] {
        let other = run(threads)?;
        if raw_csv_string(&other.raw) != raw_csv
            || summary_csv_string(&other.summaries) != summary_csv
        {
            return Err(format!(
                "output with {threads} threads differs from 1 thread"
            ));
        }
    }
    for r in &one.raw {
        if !(r.v <= r.r && r.r <= design.m) {
            return Err(format!(
                "trial {} {}: V = {}, R = {}",
                r.trial, r.procedure, r.v, r.r
            ));
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("raw.csv");
    std::fs::write(&path, &raw_csv).map_err(|e| e.to_string())?;
    let back = read_raw_csv(&path).map_err(|e| e.to_string())?;
    let again = summarize(&back, &BenchConfig::default().procedures, &one.failures);
    if summary_csv_string(&again) != summary_csv {
        return Err("summary does not recompute from the raw CSV".into());
    }
    Ok(format!(
        "{} rows identical across 1/2/4/7 threads",
        one.raw.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 6] = [
        ("table reproduction", table_reproduction),
        ("optimality oracle", optimality_oracle),
        ("posterior equivalence", posterior_equivalence),
        ("Fourier kernel identities", kernel_identities),
        ("estimator consistency", estimator_consistency),
        ("determinism and conservation", determinism_and_conservation),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {} ({name}): PASS [{secs:.1}s] {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.1}s] {msg}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
