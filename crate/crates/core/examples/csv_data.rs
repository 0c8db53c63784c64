//! Writes a small data set to CSV files, loads it back and runs every test.

use std::fs;
use std::io::Write;
use std::path::Path;

use k2st::datagen::{RngState, ScenarioKind, ScenarioSpec, Sizes};
use k2st::harness::{load_csv_dataset, CsvOptions, CsvPaths, TestConfig, TestKind};
use k2st::Points;

fn write(path: &Path, p: &Points) -> std::io::Result<()> {
    let mut f = fs::File::create(path)?;
    for row in p.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(f, "{}", cells.join(","))?;
    }
    Ok(())
}

fn main() -> k2st::Result<()> {
    let dir = std::env::temp_dir().join("k2st-csv-example");
    fs::create_dir_all(&dir)?;
    let spec = ScenarioSpec::new(ScenarioKind::alt_scenario(1, 5)?, Sizes::balanced(80, 400))?;
    let s = spec.generate(&mut RngState::new(9).stream(0))?;
    let files = [("x", &s.x), ("v", &s.v), ("y", &s.y), ("w", &s.w), ("uv", &s.unlabeled_v), ("uw", &s.unlabeled_w)];
    for (name, p) in files {
        write(&dir.join(format!("{name}.csv")), p)?;
    }

    let paths = CsvPaths {
        x: dir.join("x.csv"),
        v: dir.join("v.csv"),
        y: dir.join("y.csv"),
        w: dir.join("w.csv"),
        unlabeled_v: Some(dir.join("uv.csv")),
        unlabeled_w: Some(dir.join("uw.csv")),
    };
    let sample = load_csv_dataset(&paths, CsvOptions { header: false, standardize: true })?;
    println!("loaded n1={} n2={} m1={} m2={}", sample.n1(), sample.n2(), sample.m1(), sample.m2());

    let mut rng = RngState::new(9).stream(1);
    for kind in [TestKind::MmdPerm { joint: false }, TestKind::Xmmd { joint: false }, TestKind::Xssmmd] {
        let out = TestConfig::new(kind).run(&sample, &mut rng)?;
        println!("{}", serde_json::to_string(&out)?);
    }
    fs::remove_dir_all(&dir)?;
    Ok(())
}
