//! Likelihood-ratio trajectories under the product law `⊗ P_{w_n}`.
//!
//! For `X_n ~ P_{w_n}` independent, the partial sums
//!
//! ```text
//! S_N = ∑_{n ≤ N} ln (dP_{w_n} / dP_{z_n})(X_n)
//! ```
//!
//! converge almost surely when `∑ chi_n < ∞` and drift to `+∞` otherwise.
//! `exp(-S_N)` is the likelihood-ratio martingale `∏ dP_z/dP_w` under the
//! sampling law and has mean one at every `N`.
//!
//! Each trial draws from its own ChaCha8 stream keyed by
//! `(master seed, trial index)`, so trials are independent of execution
//! order and the batch is bit-identical across runs and thread counts.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::{log_density_ratio, log_ratio_bound};
use crate::error::{require, Error, Result};
use crate::halfplane::{chi, UHPoint};

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_HORIZON: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_EVALUATION_CAP: u128 = 1_000_000_000;
/// Default level for the "fraction above" summary column, in nats.
pub const DEFAULT_THRESHOLD: f64 = 10.0;
const TRIM_FRACTION: f64 = 0.05;

/// Inverse-CDF draw from `P_z` given `u ∈ (0, 1)`.
pub fn sample_cauchy(z: UHPoint, u: f64) -> Result<f64> {
    require(u > 0.0 && u < 1.0, "u", "in (0, 1)", u)?;
    Ok(z.location() + z.scale() * (std::f64::consts::PI * (u - 0.5)).tan())
}

/// Uniform on the open interval `(0, 1)`: midpoints of a 2^-52 grid.
fn open_unit(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trial `trial` under master seed `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    splitmix64(splitmix64(seed) ^ (trial as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Powers of two up to `horizon`, followed by `horizon` itself.
pub fn checkpoints(horizon: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(1usize), |n| n.checked_mul(2))
        .take_while(|&n| n <= horizon)
        .collect();
    if out.last() != Some(&horizon) && horizon > 0 {
        out.push(horizon);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub trials: usize,
    pub horizon: usize,
    pub seed: u64,
    pub threshold: f64,
    pub evaluation_cap: u128,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            trials: DEFAULT_TRIALS,
            horizon: DEFAULT_HORIZON,
            seed: DEFAULT_SEED,
            threshold: DEFAULT_THRESHOLD,
            evaluation_cap: DEFAULT_EVALUATION_CAP,
        }
    }
}

impl SimulationConfig {
    fn check(&self) -> Result<()> {
        require(self.trials >= 1, "trials", ">= 1", self.trials as f64)?;
        require(self.horizon >= 1, "horizon", ">= 1", self.horizon as f64)?;
        let requested = self.trials as u128 * self.horizon as u128;
        if requested > self.evaluation_cap {
            return Err(Error::ResourceCap {
                requested,
                cap: self.evaluation_cap,
            });
        }
        Ok(())
    }
}

/// Cross-trial statistics at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckpointSummary {
    pub n: usize,
    pub median: f64,
    pub mean: f64,
    pub fraction_above: f64,
    /// Mean and standard error of `exp(S_N)`.
    pub mean_exp: f64,
    pub se_exp: f64,
    /// 5%-per-side trimmed mean of `exp(S_N)`.
    pub trimmed_mean_exp: f64,
    /// Mean and standard error of `exp(-S_N)`, the martingale.
    pub mean_exp_neg: f64,
    pub se_exp_neg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryBatch {
    pub master_seed: u64,
    /// Per-trial stream seeds.
    pub seeds: Vec<u64>,
    pub horizon: usize,
    pub checkpoints: Vec<usize>,
    /// `log_ratio_paths[trial][k]` is `S_N` at `checkpoints[k]`.
    pub log_ratio_paths: Vec<Vec<f64>>,
    /// Largest `|ln dP_w/dP_z (X_n)|` over all trials and steps.
    pub max_abs_increment: f64,
    pub threshold: f64,
    pub summary: Vec<CheckpointSummary>,
}

impl TrajectoryBatch {
    pub fn trials(&self) -> usize {
        self.log_ratio_paths.len()
    }

    /// Values of `S_N` at checkpoint index `k` across trials.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.log_ratio_paths.iter().map(|p| p[k]).collect()
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn summarize(n: usize, column: &[f64], threshold: f64) -> CheckpointSummary {
    let mut sorted = column.to_vec();
    let med = median(&mut sorted);
    let exp: Vec<f64> = sorted.iter().map(|s| s.exp()).collect();
    let exp_neg: Vec<f64> = sorted.iter().map(|s| (-s).exp()).collect();
    let (mean, _) = mean_and_se(column);
    let (mean_exp, se_exp) = mean_and_se(&exp);
    let (mean_exp_neg, se_exp_neg) = mean_and_se(&exp_neg);
    let cut = (TRIM_FRACTION * exp.len() as f64).floor() as usize;
    let kept = &exp[cut..exp.len() - cut];
    CheckpointSummary {
        n,
        median: med,
        mean,
        fraction_above: column.iter().filter(|&&s| s > threshold).count() as f64 / column.len() as f64,
        mean_exp,
        se_exp,
        trimmed_mean_exp: kept.iter().sum::<f64>() / kept.len() as f64,
        mean_exp_neg,
        se_exp_neg,
    }
}

/// Runs `cfg.trials` independent trajectories over the first `cfg.horizon`
/// pairs.
pub fn simulate_log_ratios(pairs: &[(UHPoint, UHPoint)], cfg: &SimulationConfig) -> Result<TrajectoryBatch> {
    cfg.check()?;
    if pairs.len() < cfg.horizon {
        return Err(Error::TooFewTerms {
            available: pairs.len(),
            required: cfg.horizon,
        });
    }
    let pairs = &pairs[..cfg.horizon];
    let marks = checkpoints(cfg.horizon);
    let seeds: Vec<u64> = (0..cfg.trials).map(|t| trial_seed(cfg.seed, t)).collect();

    let runs: Vec<(Vec<f64>, f64)> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut path = Vec::with_capacity(marks.len());
            let mut next = marks.iter().peekable();
            let mut sum = 0.0f64;
            let mut max_inc = 0.0f64;
            for (i, &(z, w)) in pairs.iter().enumerate() {
                let x = sample_cauchy(w, open_unit(&mut rng)).expect("open unit draw");
                let inc = log_density_ratio(z, w, x);
                max_inc = max_inc.max(inc.abs());
                sum += inc;
                if next.peek() == Some(&&(i + 1)) {
                    path.push(sum);
                    next.next();
                }
            }
            (path, max_inc)
        })
        .collect();

    let max_abs_increment = runs.iter().map(|r| r.1).fold(0.0, f64::max);
    let log_ratio_paths: Vec<Vec<f64>> = runs.into_iter().map(|r| r.0).collect();
    let summary = marks
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let col: Vec<f64> = log_ratio_paths.iter().map(|p| p[k]).collect();
            summarize(n, &col, cfg.threshold)
        })
        .collect();
    Ok(TrajectoryBatch {
        master_seed: cfg.seed,
        seeds,
        horizon: cfg.horizon,
        checkpoints: marks,
        log_ratio_paths,
        max_abs_increment,
        threshold: cfg.threshold,
        summary,
    })
}

/// Behavior of one regime of a [`dichotomy_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeAssessment {
    pub batch: TrajectoryBatch,
    pub sup_chi: f64,
    /// `ln C₂` for `C₁ = sup chi_n`.
    pub increment_bound: f64,
    pub increment_bound_holds: bool,
    /// `(N, median_trials |S_{2N} - S_N|)` over consecutive power-of-two
    /// checkpoints.
    pub doubling_medians: Vec<(usize, f64)>,
    pub stabilizing: bool,
    pub median_increasing: bool,
    pub final_median: f64,
    pub final_iqr: f64,
}

fn assess(pairs: &[(UHPoint, UHPoint)], cfg: &SimulationConfig) -> Result<RegimeAssessment> {
    let batch = simulate_log_ratios(pairs, cfg)?;
    let sup_chi = pairs[..cfg.horizon].iter().map(|&(z, w)| chi(z, w)).fold(0.0, f64::max);
    let increment_bound = log_ratio_bound(sup_chi)?.ln();

    let cps = &batch.checkpoints;
    let doubling_medians: Vec<(usize, f64)> = (0..cps.len())
        .filter_map(|k| {
            let j = cps.iter().position(|&m| m == 2 * cps[k])?;
            let mut diffs: Vec<f64> = batch.log_ratio_paths.iter().map(|p| (p[j] - p[k]).abs()).collect();
            Some((cps[k], median(&mut diffs)))
        })
        .collect();
    let stabilizing = doubling_medians.windows(2).all(|w| w[1].1 < w[0].1);
    let median_increasing = batch.summary.windows(2).all(|w| w[1].median > w[0].median);

    let mut last = batch.column(cps.len() - 1);
    last.sort_by(f64::total_cmp);
    let q = |f: f64| last[((last.len() - 1) as f64 * f).round() as usize];
    let final_iqr = q(0.75) - q(0.25);
    let final_median = batch.summary.last().map_or(0.0, |s| s.median);

    Ok(RegimeAssessment {
        increment_bound_holds: batch.max_abs_increment <= increment_bound,
        batch,
        sup_chi,
        increment_bound,
        doubling_medians,
        stabilizing,
        median_increasing,
        final_median,
        final_iqr,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub equivalent: RegimeAssessment,
    pub singular: RegimeAssessment,
}

/// Simulates a summable and a divergent sequence side by side with the
/// same configuration.
pub fn dichotomy_experiment(
    equivalent: &[(UHPoint, UHPoint)],
    singular: &[(UHPoint, UHPoint)],
    cfg: &SimulationConfig,
) -> Result<ExperimentReport> {
    Ok(ExperimentReport {
        equivalent: assess(equivalent, cfg)?,
        singular: assess(singular, cfg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    fn p(x: f64, y: f64) -> UHPoint {
        UHPoint::new(x, y).unwrap()
    }

    #[test]
    fn sampler_quantiles() {
        let z = p(2.0, 3.0);
        assert_eq!(sample_cauchy(z, 0.5).unwrap(), 2.0);
        assert!((sample_cauchy(z, 0.75).unwrap() - 5.0).abs() < 1e-14);
        assert!((sample_cauchy(z, 0.25).unwrap() + 1.0).abs() < 1e-14);
        assert!(sample_cauchy(z, 0.0).is_err());
        assert!(sample_cauchy(z, 1.0).is_err());
        assert!(sample_cauchy(z, f64::NAN).is_err());
    }

    #[test]
    fn sampler_mass_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let inside = (0..n)
            .filter(|_| sample_cauchy(UHPoint::I, open_unit(&mut rng)).unwrap().abs() <= 1.0)
            .count();
        let frac = inside as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.002, "{frac}");
    }

    #[test]
    fn open_unit_never_hits_endpoints() {
        struct Fixed(u64);
        impl RngCore for Fixed {
            fn next_u32(&mut self) -> u32 {
                self.0 as u32
            }
            fn next_u64(&mut self) -> u64 {
                self.0
            }
            fn fill_bytes(&mut self, _: &mut [u8]) {}
        }
        assert!(open_unit(&mut Fixed(0)) > 0.0);
        assert!(open_unit(&mut Fixed(u64::MAX)) < 1.0);
    }

    #[test]
    fn checkpoint_layout() {
        assert_eq!(checkpoints(1), vec![1]);
        assert_eq!(checkpoints(8), vec![1, 2, 4, 8]);
        assert_eq!(checkpoints(10), vec![1, 2, 4, 8, 10]);
        assert_eq!(*checkpoints(10_000).last().unwrap(), 10_000);
    }

    #[test]
    fn null_sequence_is_exactly_zero() {
        let pairs = vec![(p(1.0, 2.0), p(1.0, 2.0)); 100];
        let cfg = SimulationConfig {
            trials: 20,
            horizon: 100,
            ..Default::default()
        };
        let b = simulate_log_ratios(&pairs, &cfg).unwrap();
        assert!(b.log_ratio_paths.iter().flatten().all(|&s| s == 0.0));
        assert_eq!(b.max_abs_increment, 0.0);
    }

    #[test]
    fn determinism() {
        let pairs: Vec<_> = (1..=500).map(|n| (p(1.0 / n as f64, 1.0), UHPoint::I)).collect();
        let cfg = SimulationConfig {
            trials: 50,
            horizon: 500,
            seed: 9,
            ..Default::default()
        };
        let a = simulate_log_ratios(&pairs, &cfg).unwrap();
        let b = simulate_log_ratios(&pairs, &cfg).unwrap();
        assert_eq!(a, b);
        let other = simulate_log_ratios(&pairs, &SimulationConfig { seed: 10, ..cfg }).unwrap();
        assert_ne!(a.log_ratio_paths, other.log_ratio_paths);
    }

    #[test]
    fn resource_cap_and_bounds() {
        let pairs = vec![(UHPoint::I, UHPoint::I); 10];
        let cfg = SimulationConfig {
            trials: 10,
            horizon: 10,
            evaluation_cap: 99,
            ..Default::default()
        };
        assert!(matches!(
            simulate_log_ratios(&pairs, &cfg),
            Err(Error::ResourceCap { .. })
        ));
        let cfg = SimulationConfig {
            trials: 1,
            horizon: 11,
            ..Default::default()
        };
        assert!(simulate_log_ratios(&pairs, &cfg).is_err());
        let cfg = SimulationConfig {
            trials: 0,
            horizon: 5,
            ..Default::default()
        };
        assert!(simulate_log_ratios(&pairs, &cfg).is_err());
    }

    #[test]
    fn trivial_experiment() {
        let pairs = vec![(UHPoint::I, UHPoint::I); 64];
        let cfg = SimulationConfig {
            trials: 10,
            horizon: 64,
            ..Default::default()
        };
        let r = dichotomy_experiment(&pairs, &pairs, &cfg).unwrap();
        for regime in [&r.equivalent, &r.singular] {
            assert_eq!(regime.final_median, 0.0);
            assert_eq!(regime.final_iqr, 0.0);
            assert!(regime.increment_bound_holds);
            assert_eq!(regime.increment_bound, 2.0f64.ln());
        }
    }
}
