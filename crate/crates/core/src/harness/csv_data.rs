use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::points::Points;
use crate::stats::SemiSupervisedSample;

/// Files of a user-supplied data set. Row `i` of `x` pairs with row `i` of
/// `v`, likewise `y` with `w`. The unlabeled pools are optional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvPaths {
    pub x: PathBuf,
    pub v: PathBuf,
    pub y: PathBuf,
    pub w: PathBuf,
    pub unlabeled_v: Option<PathBuf>,
    pub unlabeled_w: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CsvOptions {
    /// Skip the first line of every file.
    pub header: bool,
    pub standardize: bool,
}

/// Parses a headerless numeric CSV file into points.
pub fn read_points(path: &Path, header: bool) -> Result<Points> {
    let text = std::fs::read_to_string(path)?;
    parse_points(&text, path, header)
}

fn parse_points(text: &str, path: &Path, header: bool) -> Result<Points> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let err = |line: usize, message: String| Error::Csv {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut points: Option<Points> = None;
    let mut row = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        row.clear();
        for cell in record.iter() {
            let value: f64 = cell
                .parse()
                .map_err(|_| err(line, format!("non-numeric cell '{cell}'")))?;
            row.push(value);
        }
        let pts = points.get_or_insert_with(|| Points::empty(row.len()));
        if row.len() != pts.dim() {
            return Err(err(line, format!("ragged row: expected {} columns, found {}", pts.dim(), row.len())));
        }
        pts.push(&row)?;
    }
    points.ok_or_else(|| err(0, "file has no data rows".into()))
}

fn check_pair(a: &Points, a_path: &Path, b: &Points, b_path: &Path) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::RowCountMismatch {
            left: a_path.to_path_buf(),
            left_rows: a.len(),
            right: b_path.to_path_buf(),
            right_rows: b.len(),
        });
    }
    Ok(())
}

/// Per-column `(mean, population std)` over the stacked inputs.
fn column_stats(parts: &[&Points]) -> Vec<(f64, f64)> {
    let dim = parts[0].dim();
    let n: usize = parts.iter().map(|p| p.len()).sum();
    (0..dim)
        .map(|c| {
            let values = || parts.iter().flat_map(|p| p.rows().map(move |r| r[c]));
            let mean = values().sum::<f64>() / n as f64;
            let var = values().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            (mean, var.sqrt())
        })
        .collect()
}

fn apply_stats(p: &mut Points, stats: &[(f64, f64)]) {
    let dim = p.dim();
    for row in p.as_mut_slice().chunks_exact_mut(dim) {
        for (v, &(mean, std)) in row.iter_mut().zip(stats) {
            if std > 0.0 {
                *v = (*v - mean) / std;
            }
        }
    }
}

/// Standardizes every column to zero mean and unit population variance.
///
/// Statistics pool the two labeled samples of each space (`X` with `Y`,
/// `V` with `W`); unlabeled covariates reuse the labeled covariate
/// statistics. Constant columns are left as they are.
pub fn standardize(sample: &mut SemiSupervisedSample) {
    let xs = column_stats(&[&sample.x, &sample.y]);
    apply_stats(&mut sample.x, &xs);
    apply_stats(&mut sample.y, &xs);
    if sample.v.dim() == sample.w.dim() {
        let vs = column_stats(&[&sample.v, &sample.w]);
        for p in [&mut sample.v, &mut sample.w, &mut sample.unlabeled_v, &mut sample.unlabeled_w] {
            apply_stats(p, &vs);
        }
    } else {
        let vs = column_stats(&[&sample.v]);
        let ws = column_stats(&[&sample.w]);
        apply_stats(&mut sample.v, &vs);
        apply_stats(&mut sample.unlabeled_v, &vs);
        apply_stats(&mut sample.w, &ws);
        apply_stats(&mut sample.unlabeled_w, &ws);
    }
}

/// Reads a data set from CSV files.
pub fn load_csv_dataset(paths: &CsvPaths, options: CsvOptions) -> Result<SemiSupervisedSample> {
    let read = |p: &Path| read_points(p, options.header);
    let x = read(&paths.x)?;
    let v = read(&paths.v)?;
    let y = read(&paths.y)?;
    let w = read(&paths.w)?;
    check_pair(&x, &paths.x, &v, &paths.v)?;
    check_pair(&y, &paths.y, &w, &paths.w)?;
    let uv = match &paths.unlabeled_v {
        Some(p) => read(p)?,
        None => Points::empty(v.dim()),
    };
    let uw = match &paths.unlabeled_w {
        Some(p) => read(p)?,
        None => Points::empty(w.dim()),
    };
    let mut sample = SemiSupervisedSample::new(x, v, y, w, uv, uw)?;
    if options.standardize {
        standardize(&mut sample);
    }
    Ok(sample)
}
