//! Null statistics of xssMMD against the standard normal via Kolmogorov-Smirnov.

use k2st::datagen::{ScenarioKind, ScenarioSpec, Sizes};
use k2st::harness::{ks_normality, run_monte_carlo, ExperimentConfig, TestConfig, TestKind};

fn main() -> k2st::Result<()> {
    let config = ExperimentConfig {
        scenario: ScenarioSpec::new(ScenarioKind::NullGaussian { d: 10 }, Sizes::balanced(100, 100))?,
        tests: vec![TestConfig::new(TestKind::Xssmmd)],
        trials: 300,
        seed: 2,
        workers: 4,
    };
    let report = run_monte_carlo(&config)?;
    let s = &report.tests[0];
    let ks = ks_normality(&s.statistic_samples)?;
    println!("{}: type-I error {:.3}", s.test, s.rejection_rate);
    println!("KS distance {:.4}, threshold {:.4}, pass = {}", ks.distance, ks.threshold, ks.pass);

    let mut sorted = s.statistic_samples.clone();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| sorted[((sorted.len() - 1) as f64 * p) as usize];
    println!("quantiles 5/50/95%: {:.3} {:.3} {:.3}", q(0.05), q(0.5), q(0.95));
    Ok(())
}
