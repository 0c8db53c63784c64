//! Conditional-mean regressors and the cross-fitting split.
//!
//! Both built-in smoothers (k-NN and Nadaraya-Watson) are linear in the
//! responses, so refitting on `a * r + b` yields `a * predict + b`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{median_heuristic, Bandwidth};
use crate::points::Points;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KnnK {
    Fixed(usize),
    /// `max(1, ceil(sqrt(n_train)))`.
    Auto,
}

impl KnnK {
    pub fn resolve(self, n_train: usize) -> usize {
        match self {
            KnnK::Fixed(k) => k,
            KnnK::Auto => ((n_train as f64).sqrt().ceil() as usize).max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RegressorSpec {
    Knn(KnnK),
    NadarayaWatson(Bandwidth),
    /// Predicts 0 everywhere; the semi-supervised statistic then reduces to xMMD.
    ConstantZero,
}

impl Default for RegressorSpec {
    fn default() -> Self {
        RegressorSpec::Knn(KnnK::Auto)
    }
}

/// Something that can estimate `E[response | covariate]` from training pairs.
///
/// Implemented by [`RegressorSpec`]; other estimators (forests, networks)
/// plug into the semi-supervised tests through this trait.
pub trait Regressor: Sync {
    type Fitted: Predictor;

    fn fit(&self, covariates: &Points, responses: &[f64]) -> Result<Self::Fitted>;

    fn label(&self) -> String;
}

pub trait Predictor {
    fn predict(&self, v: &[f64]) -> Result<f64>;

    fn predict_many(&self, vs: &Points) -> Result<Vec<f64>> {
        vs.rows().map(|v| self.predict(v)).collect()
    }

    /// Resolved hyperparameters, reported in test diagnostics.
    fn hyperparameters(&self) -> Vec<(&'static str, f64)> {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Resolved {
    Knn { k: usize },
    NadarayaWatson { bandwidth: f64, response_mean: f64 },
    ConstantZero,
}

#[derive(Debug, Clone)]
pub struct FittedRegressor {
    pub spec: RegressorSpec,
    dim: usize,
    responses: Vec<f64>,
    geometry: Option<Geometry>,
    pub resolved: Resolved,
}

/// Training covariates centered at their mean, kept as a matrix so that a
/// batch of squared distances is one matrix product:
/// `|q - t|^2 = |q|^2 + |t|^2 - 2 <q, t>`.
#[derive(Debug, Clone)]
struct Geometry {
    center: Vec<f64>,
    centered: DMatrix<f64>,
    norms: Vec<f64>,
}

/// Upper bound on distance-matrix entries held at once.
const BLOCK_ENTRIES: usize = 1 << 18;

impl Geometry {
    fn new(covariates: &Points) -> Self {
        let (n, d) = (covariates.len(), covariates.dim());
        let mut center = vec![0.0; d];
        for r in covariates.rows() {
            for (c, x) in center.iter_mut().zip(r) {
                *c += x;
            }
        }
        center.iter_mut().for_each(|c| *c /= n as f64);
        let centered = DMatrix::from_fn(n, d, |i, j| covariates.row(i)[j] - center[j]);
        let norms = centered.row_iter().map(|r| r.norm_squared()).collect();
        Geometry { center, centered, norms }
    }

    /// Squared distances, one column per query row.
    fn distances(&self, queries: &[f64]) -> DMatrix<f64> {
        let d = self.center.len();
        let mut q = DMatrix::from_column_slice(d, queries.len() / d, queries);
        let mut qnorms = Vec::with_capacity(q.ncols());
        for col in q.as_mut_slice().chunks_exact_mut(d) {
            let mut norm = 0.0;
            for (x, c) in col.iter_mut().zip(&self.center) {
                *x -= c;
                norm += *x * *x;
            }
            qnorms.push(norm);
        }
        let mut out = &self.centered * &q;
        let n = self.norms.len();
        for (col, qn) in out.as_mut_slice().chunks_exact_mut(n).zip(qnorms) {
            for (x, tn) in col.iter_mut().zip(&self.norms) {
                *x = (tn + qn - 2.0 * *x).max(0.0);
            }
        }
        out
    }
}

impl RegressorSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RegressorSpec::Knn(KnnK::Fixed(0)) => Err(Error::invalid("knn k must be >= 1")),
            RegressorSpec::NadarayaWatson(Bandwidth::Fixed(h)) if !(h > 0.0 && h.is_finite()) => {
                Err(Error::invalid(format!("regression bandwidth must be positive, got {h}")))
            }
            _ => Ok(()),
        }
    }
}

impl Regressor for RegressorSpec {
    type Fitted = FittedRegressor;

    fn fit(&self, covariates: &Points, responses: &[f64]) -> Result<FittedRegressor> {
        self.validate()?;
        if covariates.len() != responses.len() {
            return Err(Error::LengthMismatch {
                left: covariates.len(),
                right: responses.len(),
            });
        }
        let n = responses.len();
        if n == 0 && *self != RegressorSpec::ConstantZero {
            return Err(Error::TooFewPoints {
                what: "regression training set",
                needed: 1,
                found: 0,
            });
        }
        let resolved = match *self {
            RegressorSpec::ConstantZero => Resolved::ConstantZero,
            RegressorSpec::Knn(k) => {
                let k = k.resolve(n);
                if k > n {
                    return Err(Error::invalid(format!(
                        "knn k = {k} exceeds training size {n}"
                    )));
                }
                Resolved::Knn { k }
            }
            RegressorSpec::NadarayaWatson(bw) => {
                let bandwidth = match bw {
                    Bandwidth::Fixed(h) => h,
                    // A single training point has no pairwise distance.
                    Bandwidth::MedianHeuristic if n < 2 => 1.0,
                    Bandwidth::MedianHeuristic => median_heuristic(covariates)?,
                };
                Resolved::NadarayaWatson {
                    bandwidth,
                    response_mean: responses.iter().sum::<f64>() / n as f64,
                }
            }
        };
        let geometry = match resolved {
            Resolved::ConstantZero => None,
            _ => Some(Geometry::new(covariates)),
        };
        Ok(FittedRegressor {
            spec: *self,
            dim: covariates.dim(),
            responses: responses.to_vec(),
            geometry,
            resolved,
        })
    }

    fn label(&self) -> String {
        match self {
            RegressorSpec::Knn(_) => "knn".into(),
            RegressorSpec::NadarayaWatson(_) => "nw".into(),
            RegressorSpec::ConstantZero => "zero".into(),
        }
    }
}

/// Mean response of the `k` nearest training points for each query column.
///
/// The k smallest distances of a column are kept by branchless insertion;
/// the k-th smallest is the cutoff and ties at the cutoff go to the lowest
/// training indices.
fn knn_averages(dists: &DMatrix<f64>, responses: &[f64], k: usize, out: &mut Vec<f64>) {
    let cols = dists.as_slice().chunks_exact(dists.nrows());
    macro_rules! fixed {
        ($($k:literal)*) => {
            match k {
                $($k => out.extend(cols.map(|c| mean_within_cutoff(c, responses, &smallest::<$k>(c)))),)*
                _ => {
                    let mut best = vec![f64::INFINITY; k];
                    for c in cols {
                        best.fill(f64::INFINITY);
                        c.iter().for_each(|&d| insert(&mut best, d));
                        out.push(mean_within_cutoff(c, responses, &best));
                    }
                }
            }
        };
    }
    fixed!(1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16);
}

#[inline(always)]
fn insert(best: &mut [f64], d: f64) {
    let mut x = d;
    for slot in best.iter_mut() {
        let (lo, hi) = if x < *slot { (x, *slot) } else { (*slot, x) };
        *slot = lo;
        x = hi;
    }
}

fn smallest<const K: usize>(dists: &[f64]) -> [f64; K] {
    let mut best = [f64::INFINITY; K];
    dists.iter().for_each(|&d| insert(&mut best, d));
    best
}

/// Average over the points whose distance is below the k-th smallest, plus
/// the lowest-index points tied with it.
fn mean_within_cutoff(dists: &[f64], responses: &[f64], best: &[f64]) -> f64 {
    let k = best.len();
    let cutoff = best[k - 1];
    let needed_ties = k - best.iter().filter(|&&b| b < cutoff).count();
    let (mut below, mut tied, mut n_tied) = (0.0, 0.0, 0);
    for (&d, &r) in dists.iter().zip(responses) {
        below += if d < cutoff { r } else { 0.0 };
        let t = d == cutoff;
        tied += if t { r } else { 0.0 };
        n_tied += t as usize;
    }
    if n_tied != needed_ties {
        // Surplus ties: keep the lowest indices.
        let mut left = needed_ties;
        tied = 0.0;
        for (&d, &r) in dists.iter().zip(responses) {
            if d == cutoff && left > 0 {
                left -= 1;
                tied += r;
            }
        }
    }
    (below + tied) / k as f64
}

fn nw_average(dists: &[f64], responses: &[f64], bandwidth: f64, response_mean: f64) -> f64 {
    let scale = 1.0 / (2.0 * bandwidth * bandwidth);
    let mut num = 0.0;
    let mut den = 0.0;
    for (&d, &r) in dists.iter().zip(responses) {
        let w = (-d * scale).exp();
        num += w * r;
        den += w;
    }
    if den > 0.0 {
        num / den
    } else {
        response_mean
    }
}

impl Predictor for FittedRegressor {
    fn hyperparameters(&self) -> Vec<(&'static str, f64)> {
        match self.resolved {
            Resolved::Knn { k } => vec![("knn_k", k as f64)],
            Resolved::NadarayaWatson { bandwidth, .. } => vec![("nw_bandwidth", bandwidth)],
            Resolved::ConstantZero => Vec::new(),
        }
    }

    fn predict(&self, v: &[f64]) -> Result<f64> {
        if self.resolved == Resolved::ConstantZero {
            return Ok(0.0);
        }
        Ok(self.predict_many(&Points::new(v.len(), v.to_vec())?)?[0])
    }

    fn predict_many(&self, vs: &Points) -> Result<Vec<f64>> {
        let geometry = match &self.geometry {
            None => return Ok(vec![0.0; vs.len()]),
            Some(g) => g,
        };
        if vs.is_empty() {
            return Ok(Vec::new());
        }
        if vs.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: vs.dim(),
            });
        }
        let per_block = (BLOCK_ENTRIES / self.responses.len()).max(1);
        let mut out = Vec::with_capacity(vs.len());
        for block in vs.as_slice().chunks(per_block * self.dim) {
            let dists = geometry.distances(block);
            match self.resolved {
                Resolved::Knn { k } => knn_averages(&dists, &self.responses, k, &mut out),
                Resolved::NadarayaWatson {
                    bandwidth,
                    response_mean,
                } => out.extend(
                    dists
                        .as_slice()
                        .chunks_exact(self.responses.len())
                        .map(|c| nw_average(c, &self.responses, bandwidth, response_mean)),
                ),
                Resolved::ConstantZero => out.extend(std::iter::repeat_n(0.0, dists.ncols())),
            }
        }
        Ok(out)
    }
}

/// Odd/even cross-fitting folds.
///
/// Labeled position `i` (1-based, `1..=n`) goes to fold a when odd and to fold
/// b when even. Unlabeled observations continue the numbering at
/// `n + 1 ..= n + m` with the same parity rule. Indices stored here are
/// 0-based offsets into the labeled and unlabeled arrays respectively.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldAssignment {
    pub labeled_a: Vec<usize>,
    pub labeled_b: Vec<usize>,
    pub unlabeled_a: Vec<usize>,
    pub unlabeled_b: Vec<usize>,
    n_labeled: usize,
}

impl FoldAssignment {
    /// 1-based global positions `(fold a, fold b)` across the labeled then
    /// unlabeled range.
    pub fn global_positions(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.n_labeled;
        let a = self
            .labeled_a
            .iter()
            .map(|&i| i + 1)
            .chain(self.unlabeled_a.iter().map(|&j| n + j + 1))
            .collect();
        let b = self
            .labeled_b
            .iter()
            .map(|&i| i + 1)
            .chain(self.unlabeled_b.iter().map(|&j| n + j + 1))
            .collect();
        (a, b)
    }
}

pub fn crossfit_split(n_labeled: usize, m_unlabeled: usize) -> Result<FoldAssignment> {
    if n_labeled < 2 {
        return Err(Error::TooFewPoints {
            what: "cross-fitting split",
            needed: 2,
            found: n_labeled,
        });
    }
    let odd = |pos: usize| pos % 2 == 1;
    let (labeled_a, labeled_b) = (0..n_labeled).partition(|&i| odd(i + 1));
    let (unlabeled_a, unlabeled_b) = (0..m_unlabeled).partition(|&j| odd(n_labeled + j + 1));
    Ok(FoldAssignment {
        labeled_a,
        labeled_b,
        unlabeled_a,
        unlabeled_b,
        n_labeled,
    })
}
