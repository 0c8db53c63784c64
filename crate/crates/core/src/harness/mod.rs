//! Monte Carlo runner, CSV ingestion, reports and timing.

mod bench;
mod config;
mod csv_data;
mod ks;
mod montecarlo;
mod report;

pub use bench::{bench_runtime, BenchRow, BENCH_REPEATS};
pub use config::{
    parse_kernel, parse_key_values, parse_regressor, read_key_value_file, ExperimentConfig, ReportFormat, Settings,
    TestConfig, TestKind, DEFAULT_ALPHA, DEFAULT_PERMUTATIONS, DEFAULT_SEED,
};
pub use csv_data::{load_csv_dataset, read_points, standardize, CsvOptions, CsvPaths};
pub use ks::{ks_normality, KsResult, KS_C_001, KS_MIN_SAMPLES};
pub use montecarlo::{data_stream, run_monte_carlo, test_stream, MonteCarloReport, TestSummary};
pub use report::{
    emit_report, emit_report_with_samples, read_csv_report, read_json_report, report_rows, sidecar_path,
    write_report, write_statistic_samples, ReportRow, CSV_COLUMNS,
};
