//! Single-threaded wall-clock comparison of the three tests.

use k2st::datagen::{ScenarioKind, ScenarioSpec, Sizes};
use k2st::harness::{bench_runtime, ExperimentConfig, TestConfig, TestKind};

fn main() -> k2st::Result<()> {
    let config = ExperimentConfig {
        scenario: ScenarioSpec::new(ScenarioKind::alt_scenario(1, 10)?, Sizes::balanced(100, 1000))?,
        tests: vec![
            TestConfig::new(TestKind::Xmmd { joint: false }),
            TestConfig::new(TestKind::Xssmmd),
            TestConfig::new(TestKind::MmdPerm { joint: false }),
        ],
        trials: 100,
        seed: 1,
        workers: 1,
    };
    let rows = bench_runtime(&config)?;
    for r in &rows {
        println!("{:<12} {:.4} s for {} trials (runs {:.4?})", r.test, r.median_s, r.trials, r.runs_s);
    }
    println!("mmd-perm / xssmmd(knn) = {:.2}", rows[2].median_s / rows[1].median_s);
    Ok(())
}
