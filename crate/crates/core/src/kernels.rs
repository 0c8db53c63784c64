//! Positive-definite kernels, Gram matrices and bandwidth selection.
//!
//! The Gaussian kernel uses the convention `k(x, y) = exp(-|x - y|^2 / (2 h^2))`
//! where `h` is either fixed or chosen by the median heuristic: the median of
//! all pairwise Euclidean distances over distinct index pairs `i < j`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::{dot, sq_dist, Points};

/// Bandwidth returned by the median heuristic when every pairwise distance is 0.
pub const DEGENERATE_FALLBACK_BANDWIDTH: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Gaussian,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bandwidth {
    Fixed(f64),
    MedianHeuristic,
}

/// Kernel configuration. The bandwidth is only meaningful for Gaussian kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub bandwidth: Bandwidth,
}

impl KernelSpec {
    pub fn gaussian_median() -> Self {
        Self {
            kind: KernelKind::Gaussian,
            bandwidth: Bandwidth::MedianHeuristic,
        }
    }

    pub fn gaussian(h: f64) -> Self {
        Self {
            kind: KernelKind::Gaussian,
            bandwidth: Bandwidth::Fixed(h),
        }
    }

    pub fn linear() -> Self {
        Self {
            kind: KernelKind::Linear,
            bandwidth: Bandwidth::MedianHeuristic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let (KernelKind::Gaussian, Bandwidth::Fixed(h)) = (self.kind, self.bandwidth) {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::invalid(format!("bandwidth must be positive, got {h}")));
            }
        }
        Ok(())
    }

    /// Resolves the bandwidth against `pool` (only consulted for the median
    /// heuristic).
    pub fn resolve(&self, pool: &Points) -> Result<Resolved> {
        self.validate()?;
        Ok(match (self.kind, self.bandwidth) {
            (KernelKind::Linear, _) => Resolved {
                kernel: Kernel::Linear,
                degenerate_bandwidth: false,
            },
            (KernelKind::Gaussian, Bandwidth::Fixed(h)) => Resolved {
                kernel: Kernel::Gaussian { bandwidth: h },
                degenerate_bandwidth: false,
            },
            (KernelKind::Gaussian, Bandwidth::MedianHeuristic) => {
                let m = median_heuristic_detail(pool)?;
                Resolved {
                    kernel: Kernel::Gaussian {
                        bandwidth: m.bandwidth,
                    },
                    degenerate_bandwidth: m.degenerate,
                }
            }
        })
    }

    pub fn label(&self) -> String {
        match (self.kind, self.bandwidth) {
            (KernelKind::Linear, _) => "linear".into(),
            (KernelKind::Gaussian, Bandwidth::MedianHeuristic) => "gaussian-median".into(),
            (KernelKind::Gaussian, Bandwidth::Fixed(h)) => format!("gaussian-{h}"),
        }
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self::gaussian_median()
    }
}

/// A kernel whose bandwidth (if any) has been fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    Gaussian { bandwidth: f64 },
    Linear,
}

/// Output of [`KernelSpec::resolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub kernel: Kernel,
    /// Set when the median heuristic hit all-zero distances and fell back.
    pub degenerate_bandwidth: bool,
}

impl Kernel {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        Ok(self.eval_unchecked(x, y))
    }

    /// Kernel value without the dimension check; callers guarantee equal lengths.
    #[inline]
    pub fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            Kernel::Gaussian { bandwidth } => {
                (-sq_dist(x, y) / (2.0 * bandwidth * bandwidth)).exp()
            }
            Kernel::Linear => dot(x, y),
        }
    }

    pub fn bandwidth(&self) -> Option<f64> {
        match *self {
            Kernel::Gaussian { bandwidth } => Some(bandwidth),
            Kernel::Linear => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MedianBandwidth {
    pub bandwidth: f64,
    pub degenerate: bool,
}

/// Median of pairwise distances over `i < j`, or [`DEGENERATE_FALLBACK_BANDWIDTH`]
/// if that median is zero.
pub fn median_heuristic(points: &Points) -> Result<f64> {
    median_heuristic_detail(points).map(|m| m.bandwidth)
}

pub fn median_heuristic_detail(points: &Points) -> Result<MedianBandwidth> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints {
            what: "median heuristic",
            needed: 2,
            found: n,
        });
    }
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let a = points.row(i);
        for j in (i + 1)..n {
            dists.push(sq_dist(a, points.row(j)));
        }
    }
    // Squared distances share the ordering of distances; take roots at the end.
    let med_sq = median_in_place(&mut dists);
    let med = med_sq.sqrt();
    if med > 0.0 && med.is_finite() {
        Ok(MedianBandwidth {
            bandwidth: med,
            degenerate: false,
        })
    } else {
        Ok(MedianBandwidth {
            bandwidth: DEGENERATE_FALLBACK_BANDWIDTH,
            degenerate: true,
        })
    }
}

/// Median with the even-count convention of averaging the two middle values.
fn median_in_place(values: &mut [f64]) -> f64 {
    let n = values.len();
    let mid = n / 2;
    let (lower, upper_mid, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper_mid = *upper_mid;
    if n % 2 == 1 {
        upper_mid
    } else {
        let lower_mid = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // Average in distance units so the result is the usual median of distances.
        ((lower_mid.sqrt() + upper_mid.sqrt()) / 2.0).powi(2)
    }
}

/// Gram matrix with entries `k(a_i, b_j)`.
pub fn gram(kernel: &Kernel, a: &Points, b: &Points) -> Result<DMatrix<f64>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("gram matrix of an empty point set"));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(DMatrix::from_fn(a.len(), b.len(), |i, j| {
        kernel.eval_unchecked(a.row(i), b.row(j))
    }))
}

/// Symmetric Gram matrix of one point set, computing each pair once.
pub fn gram_symmetric(kernel: &Kernel, a: &Points) -> Result<DMatrix<f64>> {
    if a.is_empty() {
        return Err(Error::invalid("gram matrix of an empty point set"));
    }
    let n = a.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval_unchecked(a.row(i), a.row(j));
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts1(v: &[f64]) -> Points {
        Points::from_scalars(v)
    }

    #[test]
    fn gaussian_at_same_point_is_one() {
        for h in [0.1, 1.0, 7.5] {
            let k = Kernel::Gaussian { bandwidth: h };
            assert_eq!(k.eval(&[0.3, -2.0], &[0.3, -2.0]).unwrap(), 1.0);
        }
    }

    #[test]
    fn linear_is_inner_product() {
        assert_eq!(Kernel::Linear.eval(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
    }

    #[test]
    fn gaussian_unit_bandwidth_distance_two() {
        let k = Kernel::Gaussian { bandwidth: 1.0 };
        let v = k.eval(&[0.0], &[2.0]).unwrap();
        assert!((v - (-2.0f64).exp()).abs() < 1e-15);
        assert!((v - 0.135_335_283_236_612_7).abs() < 1e-12);
    }

    #[test]
    fn eval_rejects_dimension_mismatch() {
        assert!(matches!(
            Kernel::Linear.eval(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fixed_bandwidth_must_be_positive() {
        assert!(KernelSpec::gaussian(0.0).validate().is_err());
        assert!(KernelSpec::gaussian(-1.0).validate().is_err());
        assert!(KernelSpec::gaussian(f64::NAN).validate().is_err());
        assert!(KernelSpec::gaussian(0.5).validate().is_ok());
    }

    #[test]
    fn median_heuristic_examples() {
        assert_eq!(median_heuristic(&pts1(&[0.0, 2.0])).unwrap(), 2.0);
        assert_eq!(median_heuristic(&pts1(&[0.0, 1.0, 3.0])).unwrap(), 2.0);
        let same = Points::from_rows(&[[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]]).unwrap();
        let m = median_heuristic_detail(&same).unwrap();
        assert_eq!(m.bandwidth, 1.0);
        assert!(m.degenerate);
    }

    #[test]
    fn median_heuristic_even_pair_count_averages() {
        // points {0, 1, 2, 4}: distances {1, 2, 4, 1, 3, 2}, sorted 1 1 2 2 3 4
        let h = median_heuristic(&pts1(&[0.0, 1.0, 2.0, 4.0])).unwrap();
        assert!((h - 2.0).abs() < 1e-15);
        // {0, 1, 3, 6}: distances 1 3 6 2 5 3 -> sorted 1 2 3 3 5 6, median 3
        let h = median_heuristic(&pts1(&[0.0, 1.0, 3.0, 6.0])).unwrap();
        assert!((h - 3.0).abs() < 1e-15);
    }

    #[test]
    fn median_heuristic_needs_two_points() {
        assert!(matches!(
            median_heuristic(&pts1(&[1.0])),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn gram_examples() {
        let k = Kernel::Gaussian { bandwidth: 1.0 };
        let g = gram(&k, &pts1(&[0.5]), &pts1(&[0.5])).unwrap();
        assert_eq!(g.shape(), (1, 1));
        assert_eq!(g[(0, 0)], 1.0);

        let eye = Points::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let g = gram(&Kernel::Linear, &eye, &eye).unwrap();
        assert_eq!(g, DMatrix::identity(3, 3));

        let g = gram(&k, &pts1(&[0.0, 1.0]), &pts1(&[2.0])).unwrap();
        assert!((g[(0, 0)] - (-2.0f64).exp()).abs() < 1e-15);
        assert!((g[(1, 0)] - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn gram_errors() {
        let k = Kernel::Linear;
        assert!(gram(&k, &Points::empty(1), &pts1(&[1.0])).is_err());
        let two = Points::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(matches!(
            gram(&k, &two, &pts1(&[1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn point_set(max_n: usize, dim: usize) -> impl Strategy<Value = Points> {
        prop::collection::vec(prop::collection::vec(-3.0f64..3.0, dim), 2..=max_n)
            .prop_map(|rows| Points::from_rows(&rows).unwrap())
    }

    proptest! {
        #[test]
        fn kernels_are_symmetric(x in prop::collection::vec(-5.0f64..5.0, 3),
                                 y in prop::collection::vec(-5.0f64..5.0, 3),
                                 h in 0.05f64..5.0) {
            for k in [Kernel::Gaussian { bandwidth: h }, Kernel::Linear] {
                prop_assert_eq!(k.eval(&x, &y).unwrap(), k.eval(&y, &x).unwrap());
            }
            let g = Kernel::Gaussian { bandwidth: h }.eval(&x, &y).unwrap();
            prop_assert!((0.0..=1.0).contains(&g));
            // Strictly positive unless the exponent underflows.
            if sq_dist(&x, &y) / (2.0 * h * h) < 700.0 {
                prop_assert!(g > 0.0);
            }
        }

        #[test]
        fn gram_is_psd(a in point_set(6, 2), h in 0.1f64..3.0) {
            for k in [Kernel::Gaussian { bandwidth: h }, Kernel::Linear] {
                let g = gram(&k, &a, &a).unwrap();
                let eig = g.symmetric_eigen();
                for &l in eig.eigenvalues.iter() {
                    prop_assert!(l >= -1e-9, "eigenvalue {}", l);
                }
            }
        }

        #[test]
        fn gram_matches_scalar_loop(
            a in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 4),
            b in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 3),
            h in 0.1f64..3.0,
        ) {
            let k = Kernel::Gaussian { bandwidth: h };
            let pa = Points::from_rows(&a).unwrap();
            let pb = Points::from_rows(&b).unwrap();
            let g = gram(&k, &pa, &pb).unwrap();
            for i in 0..4 {
                for j in 0..3 {
                    let d2: f64 = (0..2).map(|c| (a[i][c] - b[j][c]).powi(2)).sum();
                    let expect = (-d2 / (2.0 * h * h)).exp();
                    prop_assert!((g[(i, j)] - expect).abs() < 1e-14);
                }
            }
            let s = gram_symmetric(&k, &pa).unwrap();
            prop_assert_eq!(s, gram(&k, &pa, &pa).unwrap());
        }

        #[test]
        fn median_heuristic_ignores_order(a in point_set(8, 2), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rows: Vec<Vec<f64>> = a.rows().map(|r| r.to_vec()).collect();
            rows.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let b = Points::from_rows(&rows).unwrap();
            prop_assert_eq!(median_heuristic(&a).unwrap(), median_heuristic(&b).unwrap());
        }
    }
}
