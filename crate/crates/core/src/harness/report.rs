use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ReportFormat;
use super::montecarlo::MonteCarloReport;
use crate::error::Result;

/// One report line: a `(scenario, test)` pair. Field order is the CSV
/// column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scenario: String,
    pub test: String,
    pub kernel: String,
    pub regressor: String,
    pub n1: usize,
    pub n2: usize,
    pub m1: usize,
    pub m2: usize,
    pub alpha: f64,
    pub trials: usize,
    pub seed: u64,
    pub rejection_rate: f64,
    pub mc_std_error: f64,
    pub ks_distance: Option<f64>,
    pub degenerate_trials: usize,
    pub wall_clock_s: f64,
}

pub const CSV_COLUMNS: [&str; 16] = [
    "scenario",
    "test",
    "kernel",
    "regressor",
    "n1",
    "n2",
    "m1",
    "m2",
    "alpha",
    "trials",
    "seed",
    "rejection_rate",
    "mc_std_error",
    "ks_distance",
    "degenerate_trials",
    "wall_clock_s",
];

pub fn report_rows(reports: &[MonteCarloReport]) -> Vec<ReportRow> {
    reports
        .iter()
        .flat_map(|r| {
            r.tests.iter().map(move |t| ReportRow {
                scenario: r.scenario.clone(),
                test: t.test.clone(),
                kernel: t.kernel.clone(),
                regressor: t.regressor.clone(),
                n1: r.sizes.n1,
                n2: r.sizes.n2,
                m1: r.sizes.m1,
                m2: r.sizes.m2,
                alpha: t.alpha,
                trials: r.trials,
                seed: r.seed,
                rejection_rate: t.rejection_rate,
                mc_std_error: t.mc_std_error,
                ks_distance: t.ks_distance,
                degenerate_trials: t.degenerate_trials,
                wall_clock_s: t.wall_clock_s,
            })
        })
        .collect()
}

/// Writes the power/level table as CSV (header plus one row per scenario and
/// test) or as a JSON array of the same records.
pub fn write_report<W: Write>(reports: &[MonteCarloReport], format: ReportFormat, out: W) -> Result<()> {
    let rows = report_rows(reports);
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in &rows {
                w.serialize(row).map_err(std::io::Error::other)?;
            }
            if rows.is_empty() {
                w.write_record(CSV_COLUMNS).map_err(std::io::Error::other)?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn emit_report(reports: &[MonteCarloReport], format: ReportFormat, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    write_report(reports, format, &mut f)?;
    f.flush()?;
    Ok(())
}

/// `report.csv` -> `report.stats.csv`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "report".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.stats.csv"))
}

/// Raw statistics as `scenario,test,index,statistic`, one line per trial.
pub fn write_statistic_samples<W: Write>(reports: &[MonteCarloReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "test", "index", "statistic"]).map_err(std::io::Error::other)?;
    for r in reports {
        for t in &r.tests {
            for (i, s) in t.statistic_samples.iter().enumerate() {
                w.write_record([r.scenario.as_str(), t.test.as_str(), &i.to_string(), &format!("{s:?}")])
                    .map_err(std::io::Error::other)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes the report and its statistics sidecar; returns the sidecar path.
pub fn emit_report_with_samples(reports: &[MonteCarloReport], format: ReportFormat, path: &Path) -> Result<PathBuf> {
    emit_report(reports, format, path)?;
    let side = sidecar_path(path);
    let mut f = BufWriter::new(File::create(&side)?);
    write_statistic_samples(reports, &mut f)?;
    f.flush()?;
    Ok(side)
}

pub fn read_json_report(path: &Path) -> Result<Vec<ReportRow>> {
    Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
}

pub fn read_csv_report(path: &Path) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_path(path).map_err(std::io::Error::other)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<ReportRow>, _>>();
    Ok(rows.map_err(std::io::Error::other)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::Sizes;
    use crate::harness::montecarlo::TestSummary;

    fn report() -> MonteCarloReport {
        let summary = |name: &str, p: f64| TestSummary {
            test: name.into(),
            kernel: "gaussian-median".into(),
            regressor: "-".into(),
            alpha: 0.05,
            rejections: (p * 7.0) as usize,
            rejection_rate: p,
            mc_std_error: (p * (1.0 - p) / 7.0).sqrt(),
            degenerate_trials: 0,
            ks_distance: Some(0.1 + 1e-17 * p),
            ks_pass: Some(true),
            wall_clock_s: 0.1 / 3.0,
            statistic_samples: vec![0.1, -1.0 / 3.0],
        };
        MonteCarloReport {
            scenario: "null-gaussian(d=10)".into(),
            sizes: Sizes::balanced(100, 100),
            trials: 7,
            seed: u64::MAX,
            tests: vec![summary("xmmd", 3.0 / 7.0), summary("mmd-perm", 1.0 / 7.0)],
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let mut buf = Vec::new();
        write_report(&[report(), report()], ReportFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2 * 2 + 1);
        assert_eq!(lines[0], CSV_COLUMNS.join(","));
    }

    #[test]
    fn json_round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        emit_report(&[report()], ReportFormat::Json, &path).unwrap();
        let back = read_json_report(&path).unwrap();
        assert_eq!(back, report_rows(&[report()]));
        for (a, b) in back.iter().zip(report_rows(&[report()])) {
            assert_eq!(a.rejection_rate.to_bits(), b.rejection_rate.to_bits());
            assert_eq!(a.wall_clock_s.to_bits(), b.wall_clock_s.to_bits());
        }
    }

    #[test]
    fn csv_round_trip_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let side = emit_report_with_samples(&[report()], ReportFormat::Csv, &path).unwrap();
        assert_eq!(side, dir.path().join("r.stats.csv"));
        assert_eq!(read_csv_report(&path).unwrap(), report_rows(&[report()]));
        let text = std::fs::read_to_string(side).unwrap();
        assert_eq!(text.lines().count(), 1 + 4);
    }
}
