//! Monte Carlo checks of the almost-sure limits under `P_μ`: the pair
//! frequency, the local entropy of cylinders and the density `α_n`.
//!
//! Every trial draws one word with [`sample_pmu`] under its own seed
//! `seed ^ trial`. Trials run in parallel; per-trial statistics are collected
//! in trial order and reduced by pairwise summation, so a report depends only
//! on its inputs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::{local_entropy_s, theta_of, xi, ModelParams};
use crate::measure::{log2_pmu_closed, sample_pmu, trial_seed, word_stats, BitWord};

/// Default acceptance gate on `|z|`.
pub const DEFAULT_Z_GATE: f64 = 4.0;

/// Default seed for experiments and the CLI.
pub const DEFAULT_SEED: u64 = 0x5eed_2011_0000_0001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub stddev: f64,
    pub target: f64,
    pub z_score: f64,
    pub seed: u64,
}

impl ExperimentReport {
    /// True when `|z| < gate`.
    pub fn passes(&self, gate: f64) -> bool {
        self.z_score.abs() < gate
    }
}

/// Sum with `O(log n)` error growth and an evaluation order fixed by `values.len()`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Mean, sample standard deviation and z-score of `values` against `target`.
pub fn summarize(values: &[f64], n: usize, target: f64, seed: u64) -> Result<ExperimentReport> {
    let trials = values.len();
    if trials < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 trials, got {trials}")));
    }
    let mean = pairwise_sum(values) / trials as f64;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let stddev = (pairwise_sum(&sq) / (trials - 1) as f64).sqrt();
    let diff = mean - target;
    let z_score = if stddev > 0.0 {
        diff / (stddev / (trials as f64).sqrt())
    } else if diff.abs() <= 1e-12 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    };
    Ok(ExperimentReport { n, trials, mean, stddev, target, z_score, seed })
}

fn check_length(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("sample length must be a power of two >= 2, got {n}")));
    }
    Ok(())
}

/// Per-trial statistics, in trial order.
pub fn trial_values<F>(params: ModelParams, n: usize, trials: usize, seed: u64, statistic: F) -> Result<Vec<f64>>
where
    F: Fn(&BitWord) -> Result<f64> + Sync,
{
    (0..trials as u64).into_par_iter().map(|t| statistic(&sample_pmu(n, params, trial_seed(seed, t))?)).collect()
}

fn run<F>(
    params: ModelParams,
    n: usize,
    trials: usize,
    seed: u64,
    target: f64,
    statistic: F,
) -> Result<ExperimentReport>
where
    F: Fn(&BitWord) -> Result<f64> + Sync,
{
    check_length(n)?;
    if trials < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 trials, got {trials}")));
    }
    let values = trial_values(params, n, trials, seed, statistic)?;
    summarize(&values, n, target, seed)
}

/// Frequency of `x_k = x_{2k} = 1` against `θ(p, q)`.
pub fn experiment_pair_frequency(params: ModelParams, n: usize, trials: usize, seed: u64) -> Result<ExperimentReport> {
    run(params, n, trials, seed, theta_of(params), |w| Ok(word_stats(w).pair_freq))
}

/// `-log2 P_μ[x_1^n] / n` against `s(p, q)`.
pub fn experiment_local_dimension(params: ModelParams, n: usize, trials: usize, seed: u64) -> Result<ExperimentReport> {
    params.require_interior("local dimension experiment")?;
    run(params, n, trials, seed, local_entropy_s(params), |w| Ok(-log2_pmu_closed(w, params)? / w.len() as f64))
}

/// `α_n` against `ξ = 2p / (1 + p + q)`.
pub fn experiment_alpha(params: ModelParams, n: usize, trials: usize, seed: u64) -> Result<ExperimentReport> {
    run(params, n, trials, seed, xi(params), |w| Ok(word_stats(w).half.map(|h| h.alpha_n).unwrap_or(0.0)))
}

/// Weighted least-squares fit of `α_{2m}` on `α_m` across dyadic scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionFit {
    pub pairs: usize,
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    /// `(1 - q - p) / 2`.
    pub expected_slope: f64,
    /// `p`.
    pub expected_intercept: f64,
}

impl RecursionFit {
    pub fn slope_z(&self) -> f64 {
        (self.slope - self.expected_slope) / self.slope_se
    }

    pub fn intercept_z(&self) -> f64 {
        (self.intercept - self.expected_intercept) / self.intercept_se
    }
}

/// Regresses `α_{2m}` on `α_m` for `m = 2, 4, ..., n/2` over `samples` words.
///
/// Conditionally on `x_1 .. x_m`, `α_{2m}` has mean `p + α_m (1 - q - p)/2`
/// and variance of order `1/m`, so pairs are weighted by `m`.
pub fn alpha_recursion_fit(params: ModelParams, n: usize, samples: usize, seed: u64) -> Result<RecursionFit> {
    check_length(n)?;
    if n < 8 || samples < 1 {
        return Err(Error::InvalidArgument("regression needs n >= 8 and at least one sample".into()));
    }
    let per_sample: Vec<Vec<(f64, f64, f64)>> = (0..samples as u64)
        .into_par_iter()
        .map(|t| {
            let word = sample_pmu(n, params, trial_seed(seed, t))?;
            let mut out = Vec::new();
            let mut m = 2;
            while 2 * m <= n {
                let x = word.alpha(m).expect("even prefix");
                let y = word.alpha(2 * m).expect("even prefix");
                out.push((m as f64, x, y));
                m *= 2;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<(f64, f64, f64)> = per_sample.into_iter().flatten().collect();

    let col = |f: &dyn Fn(&(f64, f64, f64)) -> f64| pairwise_sum(&rows.iter().map(f).collect::<Vec<_>>());
    let sw = col(&|r| r.0);
    let x_bar = col(&|r| r.0 * r.1) / sw;
    let y_bar = col(&|r| r.0 * r.2) / sw;
    let sxx = col(&|r| r.0 * (r.1 - x_bar).powi(2));
    let sxy = col(&|r| r.0 * (r.1 - x_bar) * (r.2 - y_bar));
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let rss = col(&|r| r.0 * (r.2 - intercept - slope * r.1).powi(2));
    let dof = rows.len().saturating_sub(2).max(1) as f64;
    let sigma2 = rss / dof;

    Ok(RecursionFit {
        pairs: rows.len(),
        slope,
        intercept,
        slope_se: (sigma2 / sxx).sqrt(),
        intercept_se: (sigma2 * (1.0 / sw + x_bar * x_bar / sxx)).sqrt(),
        expected_slope: (1.0 - params.q() - params.p()) / 2.0,
        expected_intercept: params.p(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(p: f64, q: f64) -> ModelParams {
        ModelParams::new(p, q).unwrap()
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&v), 249_750.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn summarize_handles_zero_spread() {
        let r = summarize(&[0.5, 0.5, 0.5], 4, 0.5, 1).unwrap();
        assert_eq!((r.stddev, r.z_score), (0.0, 0.0));
        let r = summarize(&[0.5, 0.5], 4, 0.25, 1).unwrap();
        assert_eq!(r.z_score, f64::INFINITY);
        assert!(summarize(&[1.0], 4, 1.0, 1).is_err());
    }

    #[test]
    fn summarize_statistics() {
        let r = summarize(&[1.0, 2.0, 3.0, 4.0], 8, 2.0, 9).unwrap();
        assert_eq!(r.mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((r.stddev - sd).abs() < 1e-15);
        assert!((r.z_score - 0.5 / (sd / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn q_one_gives_zero_pair_frequency() {
        for n in [256, 4096] {
            let r = experiment_pair_frequency(mp(0.43, 1.0), n, 10, 17).unwrap();
            assert_eq!(r.mean, 0.0);
            assert_eq!(r.target, 0.0);
            assert_eq!(r.z_score, 0.0);
        }
    }

    #[test]
    fn all_ones_alpha() {
        let r = experiment_alpha(mp(1.0, 0.0), 1024, 4, 3).unwrap();
        assert_eq!((r.mean, r.stddev, r.target, r.z_score), (1.0, 0.0, 1.0, 0.0));
    }

    #[test]
    fn rejects_bad_shapes() {
        let pr = mp(0.5, 0.5);
        assert!(experiment_alpha(pr, 1000, 10, 1).is_err());
        assert!(experiment_alpha(pr, 1024, 1, 1).is_err());
        assert!(experiment_local_dimension(mp(0.5, 1.0), 1024, 10, 1).is_err());
    }

    #[test]
    fn fair_coin_small() {
        let pr = mp(0.5, 0.5);
        let a = experiment_pair_frequency(pr, 1 << 12, 50, 11).unwrap();
        assert!(a.passes(DEFAULT_Z_GATE), "{a:?}");
        let b = experiment_pair_frequency(pr, 1 << 12, 50, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn report_json_keys() {
        let r = summarize(&[1.0, 2.0], 2, 1.5, 7).unwrap();
        let v: serde_json::Value = serde_json::to_value(r).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["mean", "n", "seed", "stddev", "target", "trials", "z_score"]);
    }
}
