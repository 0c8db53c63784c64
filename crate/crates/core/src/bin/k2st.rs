//! Command-line front end: `simulate`, `test`, `nulldist` and `bench`.
//!
//! Settings come from flags, then an optional `--config` key=value file, then
//! built-in defaults; `K2ST_SEED` replaces the default seed.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use k2st::datagen::RngState;
use k2st::harness::{
    bench_runtime, emit_report_with_samples, load_csv_dataset, read_key_value_file, run_monte_carlo, write_report,
    write_statistic_samples, CsvOptions, CsvPaths, ReportFormat, Settings, DEFAULT_SEED,
};

#[derive(Parser)]
#[command(name = "k2st", version, about = "Semi-supervised kernel two-sample tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo level/power table for one scenario.
    Simulate(Common),
    /// Run the configured tests once on CSV data.
    Test(TestArgs),
    /// Dump raw statistics with a KS normality check.
    Nulldist(Common),
    /// Wall-clock comparison of the configured tests.
    Bench(Common),
}

#[derive(Args)]
struct Common {
    /// key=value file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// null-gaussian, null-t, alt1..alt4, alt-linear, joint-null, joint-alt, rho-sweep
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    j: Option<usize>,
    /// 1-based coordinates summed into X, e.g. "1,9,10".
    #[arg(long)]
    index_set: Option<String>,
    /// Student-t degrees of freedom.
    #[arg(long)]
    df: Option<f64>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    m1: Option<usize>,
    #[arg(long)]
    m2: Option<usize>,
    /// Comma list of mmd-perm, mmd-perm-joint, xmmd, xmmd-joint, xssmmd.
    #[arg(long)]
    tests: Option<String>,
    /// knn, nw or zero; a comma list runs xssmmd once per regressor.
    #[arg(long)]
    regressor: Option<String>,
    #[arg(long)]
    knn_k: Option<usize>,
    /// gaussian or linear.
    #[arg(long)]
    kernel: Option<String>,
    /// "median" or a positive number.
    #[arg(long)]
    bandwidth: Option<String>,
    /// Permutations for mmd-perm.
    #[arg(long = "B")]
    permutations: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// one or two.
    #[arg(long)]
    sided: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    standardize: bool,
    #[arg(long)]
    header: bool,
    /// Also write raw statistics next to --out.
    #[arg(long)]
    samples: bool,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    v: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long)]
    w: PathBuf,
    #[arg(long)]
    unlabeled_v: Option<PathBuf>,
    #[arg(long)]
    unlabeled_w: Option<PathBuf>,
}

impl Common {
    fn settings(&self) -> k2st::Result<Settings> {
        let mut map = match &self.config {
            Some(p) => read_key_value_file(p)?,
            None => BTreeMap::new(),
        };
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        };
        let s = |v: &Option<String>| v.clone();
        let n = |v: Option<usize>| v.map(|x| x.to_string());
        let f = |v: Option<f64>| v.map(|x| x.to_string());
        set("scenario", s(&self.scenario));
        set("d", n(self.d));
        set("rho", f(self.rho));
        set("eps", f(self.eps));
        set("j", n(self.j));
        set("index-set", s(&self.index_set));
        set("df", f(self.df));
        set("n1", n(self.n1));
        set("n2", n(self.n2));
        set("m1", n(self.m1));
        set("m2", n(self.m2));
        set("tests", s(&self.tests));
        set("regressor", s(&self.regressor));
        set("knn-k", n(self.knn_k));
        set("kernel", s(&self.kernel));
        set("bandwidth", s(&self.bandwidth));
        set("B", n(self.permutations));
        set("alpha", f(self.alpha));
        set("sided", s(&self.sided));
        set("trials", n(self.trials));
        set("seed", self.seed.map(|x| x.to_string()));
        set("workers", n(self.workers));
        set("out", s(&self.out));
        set("format", s(&self.format));
        if self.standardize {
            set("standardize", Some("true".into()));
        }
        if self.header {
            set("header", Some("true".into()));
        }
        let default_seed = match std::env::var("K2ST_SEED") {
            Ok(v) => v
                .parse()
                .map_err(|_| k2st::Error::Config(format!("K2ST_SEED must be an unsigned integer, got '{v}'")))?,
            Err(_) => DEFAULT_SEED,
        };
        Settings::from_map(&map, default_seed)
    }
}

fn output(path: Option<&str>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p != "-" => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn simulate(c: &Common) -> k2st::Result<()> {
    let s = c.settings()?;
    let report = run_monte_carlo(&s.experiment)?;
    match (&s.out, c.samples) {
        (Some(p), true) => {
            let side = emit_report_with_samples(&[report], s.format, Path::new(p))?;
            eprintln!("statistics written to {}", side.display());
        }
        _ => {
            let mut out = output(s.out.as_deref())?;
            write_report(&[report], s.format, &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn nulldist(c: &Common) -> k2st::Result<()> {
    let s = c.settings()?;
    let report = run_monte_carlo(&s.experiment)?;
    for t in &report.tests {
        match (t.ks_distance, t.ks_pass) {
            (Some(d), Some(pass)) => eprintln!(
                "{}: KS distance {d:.4} ({} at level 0.01)",
                t.test,
                if pass { "pass" } else { "fail" }
            ),
            _ => eprintln!("{}: no KS check (permutation test or fewer than 50 statistics)", t.test),
        }
    }
    let mut out = output(s.out.as_deref())?;
    write_statistic_samples(&[report], &mut out)?;
    out.flush()?;
    Ok(())
}

fn bench(c: &Common) -> k2st::Result<()> {
    let s = c.settings()?;
    let rows = bench_runtime(&s.experiment)?;
    let report = run_monte_carlo(&s.experiment)?;
    let mut out = output(s.out.as_deref())?;
    write_report(&[report], s.format, &mut out)?;
    match s.format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out)?;
        }
        ReportFormat::Csv => {
            writeln!(out)?;
            writeln!(out, "test,trials,median_s,run1_s,run2_s,run3_s")?;
            for r in &rows {
                let runs: Vec<String> = r.runs_s.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{},{},{},{}", r.test, r.trials, r.median_s, runs.join(","))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn test(a: &TestArgs) -> k2st::Result<()> {
    let s = a.common.settings()?;
    let paths = CsvPaths {
        x: a.x.clone(),
        v: a.v.clone(),
        y: a.y.clone(),
        w: a.w.clone(),
        unlabeled_v: a.unlabeled_v.clone(),
        unlabeled_w: a.unlabeled_w.clone(),
    };
    let sample = load_csv_dataset(&paths, CsvOptions { header: s.header, standardize: s.standardize })?;
    let rng_state = RngState::new(s.experiment.seed);
    let mut out = output(s.out.as_deref())?;
    for (j, t) in s.experiment.tests.iter().enumerate() {
        let outcome = t.run(&sample, &mut rng_state.stream(j as u64 + 1))?;
        serde_json::to_writer(&mut out, &outcome)?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(c) => simulate(c),
        Command::Test(a) => test(a),
        Command::Nulldist(c) => nulldist(c),
        Command::Bench(c) => bench(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
