use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, TestConfig};
use super::ks::{ks_normality, KS_MIN_SAMPLES};
use crate::datagen::{RngState, Sizes};
use crate::error::{Error, Result};
use crate::stats::SemiSupervisedSample;

/// Stream id of the data draw for `trial`.
pub fn data_stream(trial: usize) -> u64 {
    (trial as u64) << 8
}

/// Stream id of the permutation draws of test `index` in `trial`.
pub fn test_stream(trial: usize, index: usize) -> u64 {
    ((trial as u64) << 8) | (index as u64 + 1)
}

/// Aggregate over all trials of one test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSummary {
    pub test: String,
    pub kernel: String,
    pub regressor: String,
    pub alpha: f64,
    pub rejections: usize,
    pub rejection_rate: f64,
    pub mc_std_error: f64,
    pub degenerate_trials: usize,
    /// Standard-normal KS distance of the statistics (normal-quantile tests).
    pub ks_distance: Option<f64>,
    pub ks_pass: Option<bool>,
    /// Summed over trials.
    pub wall_clock_s: f64,
    /// One entry per non-degenerate trial, in trial order.
    pub statistic_samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub scenario: String,
    pub sizes: Sizes,
    pub trials: usize,
    pub seed: u64,
    pub tests: Vec<TestSummary>,
}

impl MonteCarloReport {
    pub fn summary(&self, label: &str) -> Option<&TestSummary> {
        self.tests.iter().find(|t| t.test == label)
    }
}

#[derive(Debug, Clone, Copy)]
struct TrialCell {
    reject: bool,
    statistic: Option<f64>,
    seconds: f64,
}

fn run_trial(config: &ExperimentConfig, rng_state: RngState, trial: usize) -> Result<Vec<TrialCell>> {
    let mut data_rng = rng_state.stream(data_stream(trial));
    let sample = config.scenario.generate(&mut data_rng)?;
    run_tests_on(&config.tests, &sample, rng_state, trial)
}

fn run_tests_on(
    tests: &[TestConfig],
    sample: &SemiSupervisedSample,
    rng_state: RngState,
    trial: usize,
) -> Result<Vec<TrialCell>> {
    tests
        .iter()
        .enumerate()
        .map(|(j, test)| {
            let mut rng = rng_state.stream(test_stream(trial, j));
            let start = Instant::now();
            let outcome = test.run(sample, &mut rng);
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok(o) => Ok(TrialCell {
                    reject: o.reject,
                    statistic: Some(o.statistic),
                    seconds,
                }),
                Err(Error::DegenerateVariance) => Ok(TrialCell {
                    reject: false,
                    statistic: None,
                    seconds,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot build worker pool: {e}")))
}

/// Runs every configured test on the same draw per trial and aggregates.
///
/// Trial `t` draws its data from stream `t << 8` and test `j` its
/// permutations from stream `(t << 8) | (j + 1)`, so the report does not
/// depend on the worker count. Degenerate-variance trials count as
/// non-rejections and are tallied.
pub fn run_monte_carlo(config: &ExperimentConfig) -> Result<MonteCarloReport> {
    config.validate()?;
    let rng_state = RngState::new(config.seed);
    let pool = thread_pool(config.workers)?;
    let cells: Vec<Vec<TrialCell>> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, rng_state, t))
            .collect::<Result<_>>()
    })?;

    let trials = config.trials as f64;
    let tests = config
        .tests
        .iter()
        .enumerate()
        .map(|(j, test)| {
            let column = cells.iter().map(|row| row[j]);
            let rejections = column.clone().filter(|c| c.reject).count();
            let statistic_samples: Vec<f64> = column.clone().filter_map(|c| c.statistic).collect();
            let degenerate_trials = config.trials - statistic_samples.len();
            let p = rejections as f64 / trials;
            let ks = (test.kind.is_z_test() && statistic_samples.len() >= KS_MIN_SAMPLES)
                .then(|| ks_normality(&statistic_samples))
                .transpose()?;
            Ok(TestSummary {
                test: test.label(),
                kernel: test.kernel.label(),
                regressor: test.regressor_label(),
                alpha: test.alpha,
                rejections,
                rejection_rate: p,
                mc_std_error: (p * (1.0 - p) / trials).sqrt(),
                degenerate_trials,
                ks_distance: ks.map(|k| k.distance),
                ks_pass: ks.map(|k| k.pass),
                wall_clock_s: column.map(|c| c.seconds).sum(),
                statistic_samples,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(MonteCarloReport {
        scenario: config.scenario.label(),
        sizes: config.scenario.sizes,
        trials: config.trials,
        seed: config.seed,
        tests,
    })
}
