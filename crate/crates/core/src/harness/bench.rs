use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::montecarlo::{data_stream, test_stream};
use crate::datagen::RngState;
use crate::error::{Error, Result};

pub const BENCH_REPEATS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub test: String,
    pub trials: usize,
    /// Median over the repeats of the total time for all trials.
    pub median_s: f64,
    pub runs_s: Vec<f64>,
}

/// Times every test single-threaded on pre-generated samples.
///
/// All samples are drawn before any clock starts, and each test's rows are
/// the median of [`BENCH_REPEATS`] passes over the same samples.
pub fn bench_runtime(config: &ExperimentConfig) -> Result<Vec<BenchRow>> {
    config.validate()?;
    let rng_state = RngState::new(config.seed);
    let samples = (0..config.trials)
        .map(|t| config.scenario.generate(&mut rng_state.stream(data_stream(t))))
        .collect::<Result<Vec<_>>>()?;

    config
        .tests
        .iter()
        .enumerate()
        .map(|(j, test)| {
            let mut runs = Vec::with_capacity(BENCH_REPEATS);
            for _ in 0..BENCH_REPEATS {
                let start = Instant::now();
                for (t, sample) in samples.iter().enumerate() {
                    let mut rng = rng_state.stream(test_stream(t, j));
                    match test.run(sample, &mut rng) {
                        Ok(o) => {
                            std::hint::black_box(o);
                        }
                        Err(Error::DegenerateVariance) => {}
                        Err(e) => return Err(e),
                    }
                }
                runs.push(start.elapsed().as_secs_f64());
            }
            let mut sorted = runs.clone();
            sorted.sort_by(f64::total_cmp);
            Ok(BenchRow {
                test: test.label(),
                trials: config.trials,
                median_s: sorted[BENCH_REPEATS / 2],
                runs_s: runs,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{ScenarioKind, ScenarioSpec, Sizes};
    use crate::harness::config::{TestConfig, TestKind};

    #[test]
    fn rejects_empty_runs_and_reports_each_test() {
        let mut cfg = ExperimentConfig {
            scenario: ScenarioSpec::new(ScenarioKind::NullGaussian { d: 2 }, Sizes::balanced(10, 10)).unwrap(),
            tests: vec![
                TestConfig::new(TestKind::Xmmd { joint: false }),
                TestConfig::new(TestKind::MmdPerm { joint: false }).with_permutations(10),
            ],
            trials: 0,
            seed: 3,
            workers: 1,
        };
        assert!(bench_runtime(&cfg).is_err());
        cfg.trials = 2;
        let rows = bench_runtime(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        for r in rows {
            assert_eq!(r.runs_s.len(), BENCH_REPEATS);
            assert!(r.median_s >= 0.0);
        }
    }
}
