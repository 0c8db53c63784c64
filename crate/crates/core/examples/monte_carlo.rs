//! A small level/power table written as CSV and JSON.

use k2st::datagen::{ScenarioKind, ScenarioSpec, Sizes};
use k2st::harness::{run_monte_carlo, write_report, ExperimentConfig, ReportFormat, TestConfig, TestKind};
use k2st::RegressorSpec;

fn main() -> k2st::Result<()> {
    let config = ExperimentConfig {
        scenario: ScenarioSpec::new(ScenarioKind::alt_scenario(1, 10)?, Sizes::balanced(100, 1000))?,
        tests: vec![
            TestConfig::new(TestKind::MmdPerm { joint: false }).with_permutations(100),
            TestConfig::new(TestKind::Xmmd { joint: false }),
            TestConfig::new(TestKind::Xssmmd),
            TestConfig::new(TestKind::Xssmmd).with_regressor(RegressorSpec::ConstantZero),
        ],
        trials: 200,
        seed: 5,
        workers: 4,
    };
    let report = run_monte_carlo(&config)?;
    for t in &report.tests {
        println!("{:<14} rate {:.3} +- {:.3}", t.test, t.rejection_rate, t.mc_std_error);
    }

    let mut csv = Vec::new();
    write_report(std::slice::from_ref(&report), ReportFormat::Csv, &mut csv)?;
    println!("\n{}", String::from_utf8_lossy(&csv));

    let mut json = Vec::new();
    write_report(&[report], ReportFormat::Json, &mut json)?;
    println!("JSON report: {} bytes", json.len());
    Ok(())
}
