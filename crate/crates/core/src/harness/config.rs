use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::datagen::ScenarioSpec;
use crate::error::{Error, Result};
use crate::kernels::{Bandwidth, KernelKind, KernelSpec};
use crate::regression::{KnnK, RegressorSpec};
use crate::stats::{mmd_perm_test, xmmd_test, xssmmd_test, SemiSupervisedSample, Sided, TestOutcome};

/// Which statistic to run. `joint` variants test `(X, V)` against `(Y, W)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestKind {
    MmdPerm { joint: bool },
    Xmmd { joint: bool },
    Xssmmd,
}

impl TestKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MmdPerm { joint: false } => "mmd-perm",
            Self::MmdPerm { joint: true } => "mmd-perm-joint",
            Self::Xmmd { joint: false } => "xmmd",
            Self::Xmmd { joint: true } => "xmmd-joint",
            Self::Xssmmd => "xssmmd",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "mmd-perm" => Self::MmdPerm { joint: false },
            "mmd-perm-joint" => Self::MmdPerm { joint: true },
            "xmmd" => Self::Xmmd { joint: false },
            "xmmd-joint" => Self::Xmmd { joint: true },
            "xssmmd" => Self::Xssmmd,
            other => return Err(Error::Config(format!("unknown test '{other}'"))),
        })
    }

    /// Normal-quantile tests, whose statistics should look standard normal
    /// under the null.
    pub fn is_z_test(&self) -> bool {
        !matches!(self, Self::MmdPerm { .. })
    }
}

/// One configured test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub kind: TestKind,
    pub kernel: KernelSpec,
    pub regressor: RegressorSpec,
    pub permutations: usize,
    pub alpha: f64,
    pub sided: Sided,
}

pub const DEFAULT_PERMUTATIONS: usize = 200;
pub const DEFAULT_ALPHA: f64 = 0.05;

impl TestConfig {
    pub fn new(kind: TestKind) -> Self {
        Self {
            kind,
            kernel: KernelSpec::default(),
            regressor: RegressorSpec::default(),
            permutations: DEFAULT_PERMUTATIONS,
            alpha: DEFAULT_ALPHA,
            sided: Sided::OneSided,
        }
    }

    pub fn with_kernel(mut self, kernel: KernelSpec) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_regressor(mut self, regressor: RegressorSpec) -> Self {
        self.regressor = regressor;
        self
    }

    pub fn with_permutations(mut self, b: usize) -> Self {
        self.permutations = b;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_sided(mut self, sided: Sided) -> Self {
        self.sided = sided;
        self
    }

    /// Report name, e.g. `xssmmd(knn)`.
    pub fn label(&self) -> String {
        match self.kind {
            TestKind::Xssmmd => format!("xssmmd({})", regressor_short(&self.regressor)),
            k => k.name().to_string(),
        }
    }

    pub fn regressor_label(&self) -> String {
        match self.kind {
            TestKind::Xssmmd => regressor_long(&self.regressor),
            _ => "-".to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        self.regressor.validate()?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if matches!(self.kind, TestKind::MmdPerm { .. }) && self.permutations == 0 {
            return Err(Error::invalid("permutation count B must be at least 1"));
        }
        Ok(())
    }

    /// Runs the test on one sample. Only the permutation test consumes `rng`.
    pub fn run<R: Rng + ?Sized>(&self, sample: &SemiSupervisedSample, rng: &mut R) -> Result<TestOutcome> {
        let joint = || sample.joint();
        let mut out = match self.kind {
            TestKind::MmdPerm { joint: false } => {
                mmd_perm_test(&sample.x, &sample.y, &self.kernel, self.permutations, self.alpha, rng)
            }
            TestKind::MmdPerm { joint: true } => {
                let (a, b) = joint()?;
                mmd_perm_test(&a, &b, &self.kernel, self.permutations, self.alpha, rng)
            }
            TestKind::Xmmd { joint: false } => xmmd_test(&sample.x, &sample.y, &self.kernel, self.alpha, self.sided),
            TestKind::Xmmd { joint: true } => {
                let (a, b) = joint()?;
                xmmd_test(&a, &b, &self.kernel, self.alpha, self.sided)
            }
            TestKind::Xssmmd => xssmmd_test(sample, &self.kernel, &self.regressor, self.alpha, self.sided),
        }?;
        out.test_name = self.label();
        Ok(out)
    }
}

fn regressor_short(r: &RegressorSpec) -> &'static str {
    match r {
        RegressorSpec::Knn(_) => "knn",
        RegressorSpec::NadarayaWatson(_) => "nw",
        RegressorSpec::ConstantZero => "zero",
    }
}

fn regressor_long(r: &RegressorSpec) -> String {
    match r {
        RegressorSpec::Knn(KnnK::Auto) => "knn(k=auto)".into(),
        RegressorSpec::Knn(KnnK::Fixed(k)) => format!("knn(k={k})"),
        RegressorSpec::NadarayaWatson(Bandwidth::MedianHeuristic) => "nw(h=median)".into(),
        RegressorSpec::NadarayaWatson(Bandwidth::Fixed(h)) => format!("nw(h={h})"),
        RegressorSpec::ConstantZero => "zero".into(),
    }
}

/// A Monte Carlo experiment: one scenario, several tests, shared draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    pub tests: Vec<TestConfig>,
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
}

/// Default seed when neither a flag, a file nor `K2ST_SEED` provides one.
pub const DEFAULT_SEED: u64 = 20240601;

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.tests.is_empty() {
            return Err(Error::invalid("no tests configured"));
        }
        if self.tests.len() > 255 {
            return Err(Error::invalid("at most 255 tests per experiment"));
        }
        self.scenario.kind.validate()?;
        self.tests.iter().try_for_each(TestConfig::validate)
    }
}

/// Reads a `key=value` file. Blank lines and lines starting with `#` are
/// skipped; keys may carry leading dashes (`--n1 = 100`).
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got '{line}'", lineno + 1)))?;
        map.insert(k.trim().trim_start_matches('-').to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn read_key_value_file(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_key_values(&std::fs::read_to_string(path)?)
}

fn get<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(s) => s
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("cannot parse {key} = '{s}'"))),
    }
}

fn parse_bool(map: &BTreeMap<String, String>, key: &str) -> Result<bool> {
    match map.get(key).map(String::as_str) {
        None | Some("false") | Some("0") | Some("no") => Ok(false),
        Some("true") | Some("1") | Some("yes") | Some("") => Ok(true),
        Some(other) => Err(Error::Config(format!("cannot parse {key} = '{other}' as a boolean"))),
    }
}

pub fn parse_kernel(kind: Option<&str>, bandwidth: Option<&str>) -> Result<KernelSpec> {
    let bw = match bandwidth.unwrap_or("median") {
        "median" => Bandwidth::MedianHeuristic,
        s => Bandwidth::Fixed(s.parse().map_err(|_| Error::Config(format!("bad bandwidth '{s}'")))?),
    };
    let spec = match kind.unwrap_or("gaussian") {
        "gaussian" => KernelSpec { kind: KernelKind::Gaussian, bandwidth: bw },
        "linear" => KernelSpec::linear(),
        other => return Err(Error::Config(format!("unknown kernel '{other}'"))),
    };
    spec.validate()?;
    Ok(spec)
}

pub fn parse_regressor(name: &str, knn_k: Option<usize>, bandwidth: Bandwidth) -> Result<RegressorSpec> {
    let spec = match name.trim() {
        "knn" => RegressorSpec::Knn(knn_k.map_or(KnnK::Auto, KnnK::Fixed)),
        "nw" | "kernel" => RegressorSpec::NadarayaWatson(bandwidth),
        "zero" => RegressorSpec::ConstantZero,
        other => return Err(Error::Config(format!("unknown regressor '{other}'"))),
    };
    spec.validate()?;
    Ok(spec)
}

/// Settings shared by every subcommand, resolved from a merged key=value map.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub experiment: ExperimentConfig,
    pub out: Option<String>,
    pub format: ReportFormat,
    pub standardize: bool,
    pub header: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

impl Settings {
    /// Builds the full configuration. Tests listed under `tests` are crossed
    /// with every regressor in `regressor` for `xssmmd`. The seed falls back to
    /// `default_seed` (the caller passes `K2ST_SEED` here when set).
    pub fn from_map(map: &BTreeMap<String, String>, default_seed: u64) -> Result<Self> {
        let scenario = ScenarioSpec::from_key_values(map)?;
        let kernel = parse_kernel(map.get("kernel").map(String::as_str), map.get("bandwidth").map(String::as_str))?;
        let knn_k: Option<usize> = get(map, "knn-k")?;
        let permutations: usize = get(map, "B")?.unwrap_or(DEFAULT_PERMUTATIONS);
        let alpha: f64 = get(map, "alpha")?.unwrap_or(DEFAULT_ALPHA);
        let sided = match map.get("sided").map(String::as_str).unwrap_or("one") {
            "one" => Sided::OneSided,
            "two" => Sided::TwoSided,
            other => return Err(Error::Config(format!("sided must be one|two, got '{other}'"))),
        };
        let nw_bandwidth = match kernel.kind {
            KernelKind::Gaussian => kernel.bandwidth,
            KernelKind::Linear => Bandwidth::MedianHeuristic,
        };
        let regressors: Vec<RegressorSpec> = map
            .get("regressor")
            .map(String::as_str)
            .unwrap_or("knn")
            .split(',')
            .map(|r| parse_regressor(r, knn_k, nw_bandwidth))
            .collect::<Result<_>>()?;
        let mut tests = Vec::new();
        for name in map.get("tests").map(String::as_str).unwrap_or("mmd-perm,xmmd,xssmmd").split(',') {
            let kind = TestKind::parse(name)?;
            let base = TestConfig::new(kind)
                .with_kernel(kernel)
                .with_permutations(permutations)
                .with_alpha(alpha)
                .with_sided(sided);
            if kind == TestKind::Xssmmd {
                tests.extend(regressors.iter().map(|r| base.clone().with_regressor(*r)));
            } else {
                tests.push(base);
            }
        }
        let experiment = ExperimentConfig {
            scenario,
            tests,
            trials: get(map, "trials")?.unwrap_or(1000),
            seed: get(map, "seed")?.unwrap_or(default_seed),
            workers: get(map, "workers")?.unwrap_or(1),
        };
        experiment.validate()?;
        Ok(Self {
            experiment,
            out: map.get("out").cloned(),
            format: map.get("format").map_or(Ok(ReportFormat::Csv), |s| ReportFormat::parse(s))?,
            standardize: parse_bool(map, "standardize")?,
            header: parse_bool(map, "header")?,
        })
    }
}
