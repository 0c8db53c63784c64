use k2st::datagen::{RngState, ScenarioKind, ScenarioSpec, Sizes};
use k2st::harness::{
    data_stream, emit_report, load_csv_dataset, read_csv_report, read_json_report, report_rows, run_monte_carlo,
    CsvOptions, CsvPaths, ExperimentConfig, ReportFormat, TestConfig, TestKind,
};
use k2st::{Error, RegressorSpec};

fn config(workers: usize) -> ExperimentConfig {
    ExperimentConfig {
        scenario: ScenarioSpec::new(ScenarioKind::alt_scenario(3, 6).unwrap(), Sizes::balanced(30, 90)).unwrap(),
        tests: vec![
            TestConfig::new(TestKind::MmdPerm { joint: false }).with_permutations(30),
            TestConfig::new(TestKind::Xmmd { joint: false }),
            TestConfig::new(TestKind::Xssmmd),
            TestConfig::new(TestKind::Xssmmd).with_regressor(RegressorSpec::ConstantZero),
        ],
        trials: 60,
        seed: 77,
        workers,
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let strip = |mut r: k2st::harness::MonteCarloReport| {
        r.tests.iter_mut().for_each(|t| t.wall_clock_s = 0.0);
        r
    };
    let one = strip(run_monte_carlo(&config(1)).unwrap());
    assert_eq!(one, strip(run_monte_carlo(&config(3)).unwrap()));
    assert_eq!(one, strip(run_monte_carlo(&config(8)).unwrap()));
}

#[test]
fn paired_trials_and_standard_errors() {
    let cfg = config(2);
    let report = run_monte_carlo(&cfg).unwrap();
    for t in &report.tests {
        let p = t.rejection_rate;
        assert_eq!(p, t.rejections as f64 / cfg.trials as f64);
        assert_eq!(t.mc_std_error, (p * (1.0 - p) / cfg.trials as f64).sqrt());
    }
    // The zero regressor reduces xssMMD to xMMD trial by trial, which only
    // holds when both tests see the same draw.
    let xmmd = report.summary("xmmd").unwrap();
    let zero = report.summary("xssmmd(zero)").unwrap();
    assert_eq!(xmmd.rejections, zero.rejections);
    for (a, b) in xmmd.statistic_samples.iter().zip(&zero.statistic_samples) {
        assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
    }

    // Trial 5 regenerated by hand runs to the same statistic.
    let sample = cfg.scenario.generate(&mut RngState::new(cfg.seed).stream(data_stream(5))).unwrap();
    let out = cfg.tests[1].run(&sample, &mut RngState::new(0).stream(0)).unwrap();
    assert_eq!(out.statistic, xmmd.statistic_samples[5]);
}

#[test]
fn report_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let reports = vec![run_monte_carlo(&config(2)).unwrap(), {
        let mut c = config(2);
        c.scenario = ScenarioSpec::new(ScenarioKind::NullGaussian { d: 2 }, Sizes::balanced(20, 20)).unwrap();
        run_monte_carlo(&c).unwrap()
    }];
    let rows = report_rows(&reports);

    let json = dir.path().join("r.json");
    emit_report(&reports, ReportFormat::Json, &json).unwrap();
    assert_eq!(read_json_report(&json).unwrap(), rows);

    let csv = dir.path().join("r.csv");
    emit_report(&reports, ReportFormat::Csv, &csv).unwrap();
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 2 * 4 + 1);
    let back = read_csv_report(&csv).unwrap();
    assert_eq!(back, rows);
    assert!(back.iter().all(|r| (0.0..=1.0).contains(&r.rejection_rate)));
}

#[test]
fn csv_ingestion_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    std::fs::write(p("ok.csv"), "1,2\n3,4\n5,6\n7,8\n").unwrap();
    std::fs::write(p("ragged.csv"), "1,2\n3\n5,6\n7,8\n").unwrap();
    std::fs::write(p("text.csv"), "1,2\n3,abc\n5,6\n7,8\n").unwrap();
    std::fs::write(p("header.csv"), "a,b\n1,2\n3,4\n5,6\n7,8\n").unwrap();
    let paths = |x: &str| CsvPaths {
        x: p(x),
        v: p("ok.csv"),
        y: p("ok.csv"),
        w: p("ok.csv"),
        unlabeled_v: None,
        unlabeled_w: None,
    };
    let plain = CsvOptions::default();
    assert!(load_csv_dataset(&paths("ok.csv"), plain).is_ok());
    assert!(matches!(load_csv_dataset(&paths("ragged.csv"), plain), Err(Error::Csv { line: 2, .. })));
    assert!(matches!(load_csv_dataset(&paths("text.csv"), plain), Err(Error::Csv { line: 2, .. })));
    assert!(load_csv_dataset(&paths("header.csv"), plain).is_err());
    let mut with_header = paths("header.csv");
    with_header.v = p("header.csv");
    with_header.y = p("header.csv");
    with_header.w = p("header.csv");
    let s = load_csv_dataset(&with_header, CsvOptions { header: true, standardize: false }).unwrap();
    assert_eq!(s.x.as_slice(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
    assert!(load_csv_dataset(&paths("missing.csv"), plain).is_err());
}
