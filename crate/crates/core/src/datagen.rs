//! Seeded generators for the synthetic scenarios.
//!
//! Every generator is a pure function of its parameters and the RNG it is
//! handed; [`RngState::stream`] derives independent ChaCha8 substreams from a
//! `(seed, stream id)` pair.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::Points;
use crate::stats::SemiSupervisedSample;

/// Seed from which per-trial substreams are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn stream(&self, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sizes {
    pub n1: usize,
    pub n2: usize,
    pub m1: usize,
    pub m2: usize,
}

impl Sizes {
    pub fn new(n1: usize, n2: usize, m1: usize, m2: usize) -> Self {
        Self { n1, n2, m1, m2 }
    }

    pub fn balanced(n: usize, m: usize) -> Self {
        Self::new(n, n, m, m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScenarioKind {
    /// `(X, V)` and `(Y, W)` both standard normal in `R^(2d)`.
    NullGaussian { d: usize },
    /// Every coordinate i.i.d. Student-t on both sides.
    NullT { df: f64, d: usize },
    /// `V ~ N(0, S)`, `W ~ N(a, S)` equicorrelated; `X = V.b`, `Y = W.b` with
    /// `b` the indicator of `index_set` (1-based) and `a` carrying `eps` in its
    /// first `j` entries.
    AltLinearMap {
        d: usize,
        rho: f64,
        eps: f64,
        j: usize,
        index_set: Vec<usize>,
    },
    /// `X`, `Y` share a law shifted by `eps` in coordinate 1; `V` is cut from
    /// the shifted coordinates (1, 2), `W` from the unshifted `(d - 1, d)`.
    JointNull { d: usize, rho: f64, eps: f64 },
    /// Only `X` is shifted; `V` and `W` are coordinates `(d - 1, d)` of the
    /// same rows as `X` and `Y`.
    JointAlt { d: usize, rho: f64, eps: f64 },
    /// The joint alternative used for the correlation sweep.
    RhoSweepAlt { d: usize, rho: f64, eps: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub sizes: Sizes,
}

pub const ALT_EPS: f64 = 0.3;
pub const ALT_J: usize = 3;
pub const JOINT_RHO: f64 = 0.95;
pub const JOINT_EPS: f64 = 0.3;
/// Unlabeled pool size as a multiple of the labeled size when none is given.
pub const DEFAULT_UNLABELED_FACTOR: usize = 10;

impl ScenarioKind {
    /// One of the four linear-map alternatives at dimension `d`.
    pub fn alt_scenario(number: u8, d: usize) -> Result<Self> {
        let sparse = if d >= 3 { vec![1, d - 1, d] } else { (1..=d).collect() };
        let full: Vec<usize> = (1..=d).collect();
        let (rho, index_set) = match number {
            1 => (0.95, sparse),
            2 => (0.95, full),
            3 => (0.1, sparse),
            4 => (0.1, full),
            _ => return Err(Error::invalid(format!("alternative scenario must be 1..=4, got {number}"))),
        };
        Ok(Self::AltLinearMap {
            d,
            rho,
            eps: ALT_EPS,
            j: ALT_J.min(d),
            index_set,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::NullGaussian { .. } => "null-gaussian",
            Self::NullT { .. } => "null-t",
            Self::AltLinearMap { .. } => "alt-linear",
            Self::JointNull { .. } => "joint-null",
            Self::JointAlt { .. } => "joint-alt",
            Self::RhoSweepAlt { .. } => "rho-sweep",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_d = |d: usize, min: usize| {
            if d < min {
                Err(Error::invalid(format!("{} needs d >= {min}, got {d}", self.name())))
            } else {
                Ok(())
            }
        };
        let check_rho = |rho: f64| {
            if (0.0..1.0).contains(&rho) {
                Ok(())
            } else {
                Err(Error::invalid(format!("rho must lie in [0, 1), got {rho}")))
            }
        };
        match self {
            Self::NullGaussian { d } => check_d(*d, 1),
            Self::NullT { df, d } => {
                check_d(*d, 1)?;
                if !(*df >= 3.0) {
                    return Err(Error::invalid(format!("t degrees of freedom must be >= 3, got {df}")));
                }
                Ok(())
            }
            Self::AltLinearMap { d, rho, eps, j, index_set } => {
                check_d(*d, 1)?;
                check_rho(*rho)?;
                if !eps.is_finite() {
                    return Err(Error::invalid("eps must be finite"));
                }
                if *j > *d {
                    return Err(Error::invalid(format!("j = {j} exceeds d = {d}")));
                }
                if index_set.is_empty() || index_set.iter().any(|&i| i == 0 || i > *d) {
                    return Err(Error::invalid(format!("index set must be a nonempty subset of 1..={d}")));
                }
                Ok(())
            }
            Self::JointNull { d, rho, eps } | Self::JointAlt { d, rho, eps } | Self::RhoSweepAlt { d, rho, eps } => {
                check_d(*d, 2)?;
                check_rho(*rho)?;
                if !eps.is_finite() {
                    return Err(Error::invalid("eps must be finite"));
                }
                Ok(())
            }
        }
    }

    /// Plain-text `key=value` form, one pair per entry.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut kv = vec![("scenario".to_string(), self.name().to_string())];
        let mut push = |k: &str, v: String| kv.push((k.to_string(), v));
        match self {
            Self::NullGaussian { d } => push("d", d.to_string()),
            Self::NullT { df, d } => {
                push("df", df.to_string());
                push("d", d.to_string());
            }
            Self::AltLinearMap { d, rho, eps, j, index_set } => {
                push("d", d.to_string());
                push("rho", rho.to_string());
                push("eps", eps.to_string());
                push("j", j.to_string());
                let set: Vec<String> = index_set.iter().map(|i| i.to_string()).collect();
                push("index-set", set.join(";"));
            }
            Self::JointNull { d, rho, eps } | Self::JointAlt { d, rho, eps } | Self::RhoSweepAlt { d, rho, eps } => {
                push("d", d.to_string());
                push("rho", rho.to_string());
                push("eps", eps.to_string());
            }
        }
        kv
    }

    /// Parses the `key=value` form. Besides the canonical names, `alt1` to
    /// `alt4` select the four linear-map alternatives; missing keys take the
    /// scenario defaults.
    pub fn from_key_values(map: &BTreeMap<String, String>) -> Result<Self> {
        let name = map.get("scenario").map(String::as_str).unwrap_or("null-gaussian");
        let d: Option<usize> = parse_opt(map, "d")?;
        let rho: Option<f64> = parse_opt(map, "rho")?;
        let eps: Option<f64> = parse_opt(map, "eps")?;
        let j: Option<usize> = parse_opt(map, "j")?;
        let index_set = match map.get("index-set") {
            Some(s) => Some(parse_index_set(s)?),
            None => None,
        };
        let kind = match name {
            "null-gaussian" => Self::NullGaussian { d: d.unwrap_or(10) },
            "null-t" => Self::NullT {
                df: parse_opt(map, "df")?.unwrap_or(10.0),
                d: d.unwrap_or(10),
            },
            "alt1" | "alt2" | "alt3" | "alt4" | "alt-linear" => {
                let number = name.strip_prefix("alt").and_then(|s| s.parse::<u8>().ok()).unwrap_or(1);
                let d = d.unwrap_or(10);
                let Self::AltLinearMap { rho: r0, eps: e0, j: j0, index_set: i0, .. } = Self::alt_scenario(number, d)? else {
                    unreachable!()
                };
                Self::AltLinearMap {
                    d,
                    rho: rho.unwrap_or(r0),
                    eps: eps.unwrap_or(e0),
                    j: j.unwrap_or(j0),
                    index_set: index_set.unwrap_or(i0),
                }
            }
            "joint-null" | "joint-alt" | "rho-sweep" => {
                let (d, rho, eps) = (d.unwrap_or(10), rho.unwrap_or(JOINT_RHO), eps.unwrap_or(JOINT_EPS));
                match name {
                    "joint-null" => Self::JointNull { d, rho, eps },
                    "joint-alt" => Self::JointAlt { d, rho, eps },
                    _ => Self::RhoSweepAlt { d, rho, eps },
                }
            }
            other => return Err(Error::Config(format!("unknown scenario '{other}'"))),
        };
        kind.validate()?;
        Ok(kind)
    }

    fn is_joint(&self) -> bool {
        matches!(self, Self::JointNull { .. } | Self::JointAlt { .. } | Self::RhoSweepAlt { .. })
    }
}

fn parse_opt<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("cannot parse {key} = '{s}'"))),
    }
}

/// `"1;9;10"` or `"1,9,10"` into 1-based indices.
pub fn parse_index_set(s: &str) -> Result<Vec<usize>> {
    s.split([';', ',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Config(format!("bad index '{t}' in index set"))))
        .collect()
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kv = self.to_key_values();
        write!(f, "{}", kv[0].1)?;
        if kv.len() > 1 {
            let rest: Vec<String> = kv[1..].iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", rest.join(","))?;
        }
        Ok(())
    }
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, sizes: Sizes) -> Result<Self> {
        kind.validate()?;
        Ok(Self { kind, sizes })
    }

    /// Joint scenario with the default unlabeled pool of ten times `n`.
    pub fn joint(kind: ScenarioKind, n: usize) -> Result<Self> {
        Self::new(kind, Sizes::balanced(n, DEFAULT_UNLABELED_FACTOR * n))
    }

    /// Report label; joint scenarios whose pools follow the default 10x rule
    /// say so, since that ratio is a convention rather than a measured value.
    pub fn label(&self) -> String {
        let s = self.sizes;
        let defaulted = self.kind.is_joint()
            && s.m1 == DEFAULT_UNLABELED_FACTOR * s.n1
            && s.m2 == DEFAULT_UNLABELED_FACTOR * s.n2;
        if defaulted {
            format!("{} [m=10n default]", self.kind)
        } else {
            self.kind.to_string()
        }
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SemiSupervisedSample> {
        let s = self.sizes;
        match &self.kind {
            ScenarioKind::NullGaussian { d } => gen_null_gaussian(*d, s, rng),
            ScenarioKind::NullT { df, d } => gen_null_t(*df, *d, s, rng),
            ScenarioKind::AltLinearMap { d, rho, eps, j, index_set } => {
                gen_alt_linear_map(*d, *rho, *eps, *j, index_set, s, rng)
            }
            ScenarioKind::JointNull { d, rho, eps } => gen_joint_scenario(*d, *rho, *eps, true, s, rng),
            ScenarioKind::JointAlt { d, rho, eps } | ScenarioKind::RhoSweepAlt { d, rho, eps } => {
                gen_joint_scenario(*d, *rho, *eps, false, s, rng)
            }
        }
    }

    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut kv = self.kind.to_key_values();
        for (k, v) in [("n1", self.sizes.n1), ("n2", self.sizes.n2), ("m1", self.sizes.m1), ("m2", self.sizes.m2)] {
            kv.push((k.to_string(), v.to_string()));
        }
        kv
    }

    /// Missing sizes default to `n = 100`; unlabeled pools default to `n`
    /// for the null scenarios, `2n` for the t scenario and `10n` otherwise.
    /// With equal labeled sizes a lone `m1` also sets `m2`.
    pub fn from_key_values(map: &BTreeMap<String, String>) -> Result<Self> {
        let kind = ScenarioKind::from_key_values(map)?;
        let n1: usize = parse_opt(map, "n1")?.unwrap_or(100);
        let n2: usize = parse_opt(map, "n2")?.unwrap_or(n1);
        let factor = match kind {
            ScenarioKind::NullGaussian { .. } => 1,
            ScenarioKind::NullT { .. } => 2,
            _ => DEFAULT_UNLABELED_FACTOR,
        };
        let m1: Option<usize> = parse_opt(map, "m1")?;
        let m2: usize = match (parse_opt(map, "m2")?, m1) {
            (Some(m2), _) => m2,
            (None, Some(m1)) if n1 == n2 => m1,
            (None, _) => factor * n2,
        };
        let m1 = m1.unwrap_or(factor * n1);
        Self::new(kind, Sizes::new(n1, n2, m1, m2))
    }
}

fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn normal_points<R: Rng + ?Sized>(rows: usize, d: usize, rng: &mut R) -> Points {
    let data: Vec<f64> = (0..rows * d).map(|_| std_normal(rng)).collect();
    Points::new(d, data).expect("row-major buffer")
}

/// One draw from `N(mean, rho 11' + (1 - rho) I)` written into `out`.
///
/// Uses the symmetric square root `sqrt(1 - rho) I + c 11'` with
/// `c = (sqrt(1 - rho + d rho) - sqrt(1 - rho)) / d`.
pub fn equicorrelated_into<R: Rng + ?Sized>(rho: f64, mean: &[f64], out: &mut [f64], rng: &mut R) {
    let d = out.len() as f64;
    let a = (1.0 - rho).sqrt();
    let c = ((1.0 - rho + d * rho).sqrt() - a) / d;
    let mut total = 0.0;
    for v in out.iter_mut() {
        let z = std_normal(rng);
        *v = z;
        total += z;
    }
    for (v, m) in out.iter_mut().zip(mean) {
        *v = a * *v + c * total + m;
    }
}

fn equicorrelated_points<R: Rng + ?Sized>(rows: usize, rho: f64, mean: &[f64], rng: &mut R) -> Points {
    let d = mean.len();
    let mut data = vec![0.0; rows * d];
    for row in data.chunks_exact_mut(d) {
        equicorrelated_into(rho, mean, row, rng);
    }
    Points::new(d, data).expect("row-major buffer")
}

fn check_sizes(s: Sizes) -> Result<()> {
    if s.n1 == 0 || s.n2 == 0 {
        return Err(Error::invalid("labeled sizes must be positive"));
    }
    Ok(())
}

/// Null scenario: everything independent standard normal.
pub fn gen_null_gaussian<R: Rng + ?Sized>(d: usize, sizes: Sizes, rng: &mut R) -> Result<SemiSupervisedSample> {
    ScenarioKind::NullGaussian { d }.validate()?;
    check_sizes(sizes)?;
    let x = normal_points(sizes.n1, d, rng);
    let v = normal_points(sizes.n1, d, rng);
    let y = normal_points(sizes.n2, d, rng);
    let w = normal_points(sizes.n2, d, rng);
    let uv = normal_points(sizes.m1, d, rng);
    let uw = normal_points(sizes.m2, d, rng);
    SemiSupervisedSample::new(x, v, y, w, uv, uw)
}

/// Null scenario with i.i.d. Student-t coordinates.
pub fn gen_null_t<R: Rng + ?Sized>(df: f64, d: usize, sizes: Sizes, rng: &mut R) -> Result<SemiSupervisedSample> {
    ScenarioKind::NullT { df, d }.validate()?;
    check_sizes(sizes)?;
    let t = StudentT::new(df).map_err(|e| Error::invalid(format!("Student-t: {e}")))?;
    let mut draw = |rows: usize| Points::new(d, (0..rows * d).map(|_| t.sample(rng)).collect()).expect("row-major buffer");
    let x = draw(sizes.n1);
    let v = draw(sizes.n1);
    let y = draw(sizes.n2);
    let w = draw(sizes.n2);
    let uv = draw(sizes.m1);
    let uw = draw(sizes.m2);
    SemiSupervisedSample::new(x, v, y, w, uv, uw)
}

/// Linear-map scenario: scalar responses `X = V.b`, `Y = W.b`.
pub fn gen_alt_linear_map<R: Rng + ?Sized>(
    d: usize,
    rho: f64,
    eps: f64,
    j: usize,
    index_set: &[usize],
    sizes: Sizes,
    rng: &mut R,
) -> Result<SemiSupervisedSample> {
    ScenarioKind::AltLinearMap { d, rho, eps, j, index_set: index_set.to_vec() }.validate()?;
    check_sizes(sizes)?;
    let zero = vec![0.0; d];
    let mut shifted = vec![0.0; d];
    shifted[..j].iter_mut().for_each(|a| *a = eps);
    let respond = |cov: &Points| {
        let vals: Vec<f64> = cov.rows().map(|r| index_set.iter().map(|&i| r[i - 1]).sum()).collect();
        Points::from_scalars(&vals)
    };
    let v = equicorrelated_points(sizes.n1, rho, &zero, rng);
    let w = equicorrelated_points(sizes.n2, rho, &shifted, rng);
    let uv = equicorrelated_points(sizes.m1, rho, &zero, rng);
    let uw = equicorrelated_points(sizes.m2, rho, &shifted, rng);
    SemiSupervisedSample::new(respond(&v), v, respond(&w), w, uv, uw)
}

/// Joint scenarios on `d`-dimensional equicorrelated rows with a shift of
/// `eps` in coordinate 1.
///
/// Null: both `X` and `Y` rows are shifted; covariates come from independent
/// rows, `V` from coordinates (1, 2) of an `X`-law draw and `W` from
/// coordinates `(d - 1, d)` of a `Y`-law draw. Alternative: only `X` is
/// shifted and `V`, `W` are coordinates `(d - 1, d)` of the same rows.
pub fn gen_joint_scenario<R: Rng + ?Sized>(
    d: usize,
    rho: f64,
    eps: f64,
    null: bool,
    sizes: Sizes,
    rng: &mut R,
) -> Result<SemiSupervisedSample> {
    ScenarioKind::JointNull { d, rho, eps }.validate()?;
    check_sizes(sizes)?;
    let mut shifted = vec![0.0; d];
    shifted[0] = eps;
    let zero = vec![0.0; d];
    let (mean_x, mean_y) = if null { (&shifted, &shifted) } else { (&shifted, &zero) };
    let head = [0usize, 1];
    let tail = [d - 2, d - 1];
    let (cols_v, cols_w) = if null { (head, tail) } else { (tail, tail) };

    let x = equicorrelated_points(sizes.n1, rho, mean_x, rng);
    let y = equicorrelated_points(sizes.n2, rho, mean_y, rng);
    let (v, w) = if null {
        (
            equicorrelated_points(sizes.n1, rho, mean_x, rng).columns(&cols_v)?,
            equicorrelated_points(sizes.n2, rho, mean_y, rng).columns(&cols_w)?,
        )
    } else {
        (x.columns(&cols_v)?, y.columns(&cols_w)?)
    };
    let uv = equicorrelated_points(sizes.m1, rho, mean_x, rng).columns(&cols_v)?;
    let uw = equicorrelated_points(sizes.m2, rho, mean_y, rng).columns(&cols_w)?;
    SemiSupervisedSample::new(x, v, y, w, uv, uw)
}

/// Gaussian location model with `Cov(X) = Cov(V) = I` and `Cov(X, V) = corr I`.
///
/// `X = mean_x + corr V + sqrt(1 - corr^2) E`, likewise for `Y` given `W`;
/// the covariates are centered, so `E[X | V] = mean_x + corr V`.
pub fn gen_correlated_gaussian<R: Rng + ?Sized>(
    corr: f64,
    mean_x: &[f64],
    mean_y: &[f64],
    sizes: Sizes,
    rng: &mut R,
) -> Result<SemiSupervisedSample> {
    if !(corr.abs() <= 1.0) {
        return Err(Error::invalid(format!("correlation must lie in [-1, 1], got {corr}")));
    }
    if mean_x.len() != mean_y.len() || mean_x.is_empty() {
        return Err(Error::LengthMismatch { left: mean_x.len(), right: mean_y.len() });
    }
    check_sizes(sizes)?;
    let d = mean_x.len();
    let noise = (1.0 - corr * corr).sqrt();
    let side = |n: usize, mean: &[f64], rng: &mut R| {
        let cov = normal_points(n, d, rng);
        let mut resp = Vec::with_capacity(n * d);
        for r in cov.rows() {
            for (c, m) in r.iter().zip(mean) {
                resp.push(m + corr * c + noise * std_normal(rng));
            }
        }
        (Points::new(d, resp).expect("row-major buffer"), cov)
    };
    let (x, v) = side(sizes.n1, mean_x, rng);
    let (y, w) = side(sizes.n2, mean_y, rng);
    let uv = normal_points(sizes.m1, d, rng);
    let uw = normal_points(sizes.m2, d, rng);
    SemiSupervisedSample::new(x, v, y, w, uv, uw)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DRAWS: usize = 100_000;

    fn col_mean(p: &Points, c: usize) -> f64 {
        p.rows().map(|r| r[c]).sum::<f64>() / p.len() as f64
    }

    fn cov(p: &Points, a: usize, b: usize) -> f64 {
        let (ma, mb) = (col_mean(p, a), col_mean(p, b));
        p.rows().map(|r| (r[a] - ma) * (r[b] - mb)).sum::<f64>() / p.len() as f64
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let st = RngState::new(99);
        let a: Vec<u64> = (0..4).map(|_| st.stream(3).random()).collect();
        let mut r = st.stream(3);
        let b: Vec<u64> = (0..4).map(|_| r.random()).collect();
        assert_eq!(a[0], b[0]);
        let mut r4 = st.stream(4);
        assert_ne!(b[0], r4.random::<u64>());
    }

    #[test]
    fn null_gaussian_shapes_and_moments() {
        let mut rng = RngState::new(1).stream(0);
        let s = gen_null_gaussian(1, Sizes::new(4, 4, 0, 0), &mut rng).unwrap();
        assert_eq!((s.x.len(), s.v.len(), s.y.len(), s.w.len()), (4, 4, 4, 4));
        assert_eq!((s.m1(), s.m2()), (0, 0));

        let s = gen_null_gaussian(3, Sizes::new(DRAWS, 1, 0, 0), &mut rng).unwrap();
        for c in 0..3 {
            assert!(col_mean(&s.x, c).abs() < 3.0 * 10f64.powf(-2.5) * 3f64.sqrt());
            for c2 in 0..3 {
                let target = if c == c2 { 1.0 } else { 0.0 };
                assert!((cov(&s.x, c, c2) - target).abs() < 0.05);
            }
        }
        let again = |seed| gen_null_gaussian(2, Sizes::balanced(5, 3), &mut RngState::new(seed).stream(7)).unwrap();
        assert_eq!(again(5), again(5));
    }

    #[test]
    fn equicorrelated_covariance() {
        let mut rng = RngState::new(2).stream(0);
        let p = equicorrelated_points(DRAWS, 0.95, &[0.0; 4], &mut rng);
        for a in 0..4 {
            assert!((cov(&p, a, a) - 1.0).abs() < 0.02);
            for b in (a + 1)..4 {
                let r = cov(&p, a, b) / (cov(&p, a, a) * cov(&p, b, b)).sqrt();
                assert!((r - 0.95).abs() < 0.02);
            }
        }
        let p = equicorrelated_points(DRAWS, 0.0, &[0.0; 3], &mut rng);
        assert!(cov(&p, 0, 1).abs() < 0.02 && cov(&p, 1, 2).abs() < 0.02);
    }

    #[test]
    fn linear_map_relations() {
        let mut rng = RngState::new(3).stream(0);
        let full: Vec<usize> = (1..=10).collect();
        let s = gen_alt_linear_map(10, 0.0, 0.3, 3, &full, Sizes::new(DRAWS, 10, 0, 0), &mut rng).unwrap();
        let var = cov(&s.x, 0, 0);
        assert!((var - 10.0).abs() < 0.3);
        for (x, v) in s.x.rows().zip(s.v.rows()) {
            assert_eq!(x[0], v.iter().sum::<f64>());
        }

        let ScenarioKind::AltLinearMap { d, rho, eps, j, index_set } = ScenarioKind::alt_scenario(2, 10).unwrap() else {
            unreachable!()
        };
        let s = gen_alt_linear_map(d, rho, eps, j, &index_set, Sizes::new(DRAWS, DRAWS, 0, 0), &mut rng).unwrap();
        assert!((col_mean(&s.y, 0) - col_mean(&s.x, 0) - 0.9).abs() < 0.05);

        let s = gen_alt_linear_map(10, 0.5, 0.0, 3, &[1, 9, 10], Sizes::new(4, 4, 2, 2), &mut rng).unwrap();
        for (x, v) in s.x.rows().zip(s.v.rows()) {
            assert_eq!(x[0], v[0] + v[8] + v[9]);
        }
    }

    fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0, 0, 0.0f64);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        d
    }

    #[test]
    fn joint_null_construction() {
        let mut rng = RngState::new(4).stream(0);
        let s = gen_joint_scenario(10, 0.95, 0.3, true, Sizes::new(DRAWS, DRAWS, 0, 0), &mut rng).unwrap();
        let x1: Vec<f64> = s.x.rows().map(|r| r[0]).collect();
        let y1: Vec<f64> = s.y.rows().map(|r| r[0]).collect();
        assert!(ks_two_sample(x1, y1) < 0.01);
        assert!((col_mean(&s.v, 0) - 0.3).abs() < 0.02);
        assert!(col_mean(&s.w, 0).abs() < 0.02);
        assert_eq!((s.v.dim(), s.w.dim(), s.x.dim()), (2, 2, 10));
    }

    #[test]
    fn joint_alt_construction() {
        let mut rng = RngState::new(5).stream(0);
        let s = gen_joint_scenario(10, 0.95, 0.3, false, Sizes::new(DRAWS, DRAWS, 10, 10), &mut rng).unwrap();
        for c in 0..2 {
            assert!((col_mean(&s.v, c) - col_mean(&s.w, c)).abs() < 0.02);
        }
        assert!((col_mean(&s.x, 0) - col_mean(&s.y, 0) - 0.3).abs() < 0.02);
        for (x, v) in s.x.rows().zip(s.v.rows()).take(10) {
            assert_eq!(&x[8..], v);
        }
    }

    #[test]
    fn t_moments() {
        let mut rng = RngState::new(6).stream(0);
        let s = gen_null_t(10.0, 1, Sizes::new(DRAWS, 1, 0, 0), &mut rng).unwrap();
        assert!((cov(&s.x, 0, 0) / 1.25 - 1.0).abs() < 0.05);

        let s = gen_null_t(1e6, 1, Sizes::new(DRAWS, 1, 0, 0), &mut rng).unwrap();
        let m = col_mean(&s.x, 0);
        let v = cov(&s.x, 0, 0);
        let k = s.x.rows().map(|r| (r[0] - m).powi(4)).sum::<f64>() / DRAWS as f64 / (v * v);
        assert!((k - 3.0).abs() < 0.05);

        assert!(gen_null_t(2.5, 1, Sizes::balanced(4, 0), &mut rng).is_err());
        let again = || gen_null_t(5.0, 2, Sizes::balanced(6, 2), &mut RngState::new(8).stream(1)).unwrap();
        assert_eq!(again(), again());
    }

    #[test]
    fn key_value_round_trip() {
        let specs = [
            ScenarioSpec::new(ScenarioKind::alt_scenario(1, 10).unwrap(), Sizes::new(100, 90, 1000, 900)).unwrap(),
            ScenarioSpec::new(ScenarioKind::NullT { df: 4.5, d: 3 }, Sizes::balanced(100, 200)).unwrap(),
            ScenarioSpec::joint(ScenarioKind::JointNull { d: 10, rho: 0.95, eps: 0.3 }, 100).unwrap(),
            ScenarioSpec::new(ScenarioKind::RhoSweepAlt { d: 10, rho: 0.0, eps: 0.3 }, Sizes::balanced(50, 500)).unwrap(),
        ];
        for s in specs {
            let map: BTreeMap<String, String> = s.to_key_values().into_iter().collect();
            assert_eq!(ScenarioSpec::from_key_values(&map).unwrap(), s);
        }
    }

    #[test]
    fn presets_and_validation() {
        let map: BTreeMap<String, String> = [("scenario", "alt3"), ("n1", "50")]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let s = ScenarioSpec::from_key_values(&map).unwrap();
        assert_eq!(s.kind, ScenarioKind::alt_scenario(3, 10).unwrap());
        assert_eq!(s.sizes, Sizes::new(50, 50, 500, 500));
        assert!(ScenarioKind::AltLinearMap { d: 3, rho: 1.0, eps: 0.3, j: 1, index_set: vec![1] }.validate().is_err());
        assert!(ScenarioKind::AltLinearMap { d: 3, rho: 0.5, eps: 0.3, j: 4, index_set: vec![1] }.validate().is_err());
        assert!(ScenarioKind::AltLinearMap { d: 3, rho: 0.5, eps: 0.3, j: 1, index_set: vec![4] }.validate().is_err());
        assert!(ScenarioKind::alt_scenario(5, 10).is_err());
        let joint = ScenarioSpec::joint(ScenarioKind::JointAlt { d: 10, rho: 0.95, eps: 0.3 }, 100).unwrap();
        assert!(joint.label().contains("m=10n default"));
    }

    #[test]
    fn correlated_gaussian_conditional_mean() {
        let mut rng = RngState::new(7).stream(0);
        let s = gen_correlated_gaussian(0.9, &[0.5, 0.0], &[0.0, 0.0], Sizes::new(DRAWS, 10, 0, 0), &mut rng).unwrap();
        let joint = s.x.concat_columns(&s.v).unwrap();
        assert!((col_mean(&s.x, 0) - 0.5).abs() < 0.02);
        assert!((cov(&joint, 0, 2) - 0.9).abs() < 0.02);
        assert!((cov(&joint, 0, 0) - 1.0).abs() < 0.02);
        assert!(cov(&joint, 0, 3).abs() < 0.02);
    }
}
