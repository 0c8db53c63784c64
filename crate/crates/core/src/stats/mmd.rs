use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{check_alpha, Sided, TestOutcome};
use crate::error::{Error, Result};
use crate::kernels::{gram_symmetric, Kernel, KernelSpec};
use crate::points::Points;

fn check_sizes(x: &Points, y: &Points) -> Result<()> {
    for p in [x, y] {
        if p.len() < 2 {
            return Err(Error::TooFewPoints {
                what: "MMD U-statistic",
                needed: 2,
                found: p.len(),
            });
        }
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

/// Unbiased MMD^2 U-statistic. May be negative.
pub fn mmd2_ustat(x: &Points, y: &Points, kernel: &Kernel) -> Result<f64> {
    check_sizes(x, y)?;
    let within = |p: &Points| {
        let n = p.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += kernel.eval_unchecked(p.row(i), p.row(j));
            }
        }
        2.0 * s / (n * (n - 1)) as f64
    };
    let mut cross = 0.0;
    for a in x.rows() {
        for b in y.rows() {
            cross += kernel.eval_unchecked(a, b);
        }
    }
    let cross = cross / (x.len() * y.len()) as f64;
    Ok(within(x) + within(y) - 2.0 * cross)
}

/// U-statistic over a pooled Gram matrix (row-major, `pooled x pooled`) where
/// `order[..n1]` indexes the first group and `order[n1..]` the second.
///
/// `offdiag_total` is the sum of all off-diagonal Gram entries.
pub fn mmd2_ustat_from_gram(gram: &[f64], order: &[usize], n1: usize, offdiag_total: f64) -> f64 {
    let n = order.len();
    let n2 = n - n1;
    let block = |idx: &[usize]| {
        let mut s = 0.0;
        for (a, &i) in idx.iter().enumerate() {
            let row = &gram[i * n..(i + 1) * n];
            for &j in &idx[a + 1..] {
                s += row[j];
            }
        }
        2.0 * s
    };
    let sxx = block(&order[..n1]);
    let syy = block(&order[n1..]);
    let sxy = (offdiag_total - sxx - syy) / 2.0;
    sxx / (n1 * (n1 - 1)) as f64 + syy / (n2 * (n2 - 1)) as f64 - 2.0 * sxy / (n1 * n2) as f64
}

/// Permutation MMD test with `B` random relabelings of the pooled sample.
///
/// `p = (1 + #{b : T_b >= T_obs}) / (B + 1)`; reject iff `p <= alpha`. The
/// Gaussian bandwidth is resolved on the pooled sample.
pub fn mmd_perm_test<R: Rng + ?Sized>(
    x: &Points,
    y: &Points,
    kernel: &KernelSpec,
    permutations: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<TestOutcome> {
    if permutations == 0 {
        return Err(Error::invalid("permutation count B must be at least 1"));
    }
    check_alpha(alpha)?;
    check_sizes(x, y)?;
    let pooled = x.concat_rows(y)?;
    let resolved = kernel.resolve(&pooled)?;
    let g = gram_symmetric(&resolved.kernel, &pooled)?;
    let n = pooled.len();
    // nalgebra is column-major; the matrix is symmetric so the buffer reads row-major too.
    let gram = g.as_slice();
    let trace: f64 = (0..n).map(|i| gram[i * n + i]).sum();
    let offdiag_total = gram.iter().sum::<f64>() - trace;

    let n1 = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    let observed = mmd2_ustat_from_gram(gram, &order, n1, offdiag_total);
    let mut exceed = 0usize;
    for _ in 0..permutations {
        order.shuffle(rng);
        if mmd2_ustat_from_gram(gram, &order, n1, offdiag_total) >= observed {
            exceed += 1;
        }
    }
    let p_value = (1 + exceed) as f64 / (permutations + 1) as f64;

    let mut diagnostics = BTreeMap::new();
    if let Some(h) = resolved.kernel.bandwidth() {
        diagnostics.insert("bandwidth".into(), h);
    }
    if resolved.degenerate_bandwidth {
        diagnostics.insert("degenerate_bandwidth".into(), 1.0);
    }
    diagnostics.insert("permutations".into(), permutations as f64);
    diagnostics.insert("n1".into(), n1 as f64);
    diagnostics.insert("n2".into(), y.len() as f64);

    Ok(TestOutcome {
        test_name: "mmd-perm".into(),
        statistic: observed,
        alpha,
        sided: Sided::OneSided,
        reject: p_value <= alpha,
        p_value: Some(p_value),
        threshold: None,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: enumerate every ordered pair of each block.
    fn brute_force(x: &[Vec<f64>], y: &[Vec<f64>], k: &Kernel) -> f64 {
        let kv = |a: &Vec<f64>, b: &Vec<f64>| k.eval(a, b).unwrap();
        let mut xx = 0.0;
        let mut cxx = 0usize;
        for (i, a) in x.iter().enumerate() {
            for (j, b) in x.iter().enumerate() {
                if i != j {
                    xx += kv(a, b);
                    cxx += 1;
                }
            }
        }
        let mut yy = 0.0;
        let mut cyy = 0usize;
        for (i, a) in y.iter().enumerate() {
            for (j, b) in y.iter().enumerate() {
                if i != j {
                    yy += kv(a, b);
                    cyy += 1;
                }
            }
        }
        let mut xy = 0.0;
        for a in x {
            for b in y {
                xy += kv(a, b);
            }
        }
        xx / cxx as f64 + yy / cyy as f64 - 2.0 * xy / (x.len() * y.len()) as f64
    }

    #[test]
    fn linear_hand_examples() {
        let z = Points::from_scalars(&[0.0, 0.0]);
        assert_eq!(mmd2_ustat(&z, &z, &Kernel::Linear).unwrap(), 0.0);
        let x = Points::from_scalars(&[1.0, 1.0]);
        let y = Points::from_scalars(&[-1.0, -1.0]);
        assert_eq!(mmd2_ustat(&x, &y, &Kernel::Linear).unwrap(), 4.0);
    }

    #[test]
    fn equal_multisets_of_size_two() {
        let k = Kernel::Gaussian { bandwidth: 0.9 };
        let x = vec![vec![0.2, 1.0], vec![-0.4, 0.3]];
        let y = vec![x[1].clone(), x[0].clone()];
        let got = mmd2_ustat(
            &Points::from_rows(&x).unwrap(),
            &Points::from_rows(&y).unwrap(),
            &k,
        )
        .unwrap();
        assert!((got - brute_force(&x, &y, &k)).abs() < 1e-12);
    }

    #[test]
    fn size_errors() {
        let one = Points::from_scalars(&[1.0]);
        let two = Points::from_scalars(&[1.0, 2.0]);
        assert!(mmd2_ustat(&one, &two, &Kernel::Linear).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(mmd_perm_test(&two, &two, &KernelSpec::linear(), 0, 0.05, &mut rng).is_err());
    }

    #[test]
    fn well_separated_samples_reach_minimum_p_value() {
        let xs: Vec<f64> = (0..15).map(|i| i as f64 * 0.01).collect();
        let ys: Vec<f64> = (0..15).map(|i| 10.0 + i as f64 * 0.01).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = 99;
        let out = mmd_perm_test(
            &Points::from_scalars(&xs),
            &Points::from_scalars(&ys),
            &KernelSpec::gaussian_median(),
            b,
            0.05,
            &mut rng,
        )
        .unwrap();
        // Only the identity and swapped labelings (2 of C(30,15)) tie the observed value.
        assert_eq!(out.p_value.unwrap(), 1.0 / (b + 1) as f64);
        assert!(out.reject);
    }

    #[test]
    fn gram_route_matches_direct_statistic() {
        let x = Points::from_rows(&[[0.0, 1.0], [1.0, 0.5], [2.0, 2.0]]).unwrap();
        let y = Points::from_rows(&[[0.3, 0.2], [1.5, 1.0], [-1.0, 0.0], [0.0, 0.0]]).unwrap();
        let k = Kernel::Gaussian { bandwidth: 1.3 };
        let pooled = x.concat_rows(&y).unwrap();
        let g = gram_symmetric(&k, &pooled).unwrap();
        let s = g.as_slice();
        let total = s.iter().sum::<f64>() - (0..7).map(|i| s[i * 7 + i]).sum::<f64>();
        let order: Vec<usize> = (0..7).collect();
        let via_gram = mmd2_ustat_from_gram(s, &order, 3, total);
        assert!((via_gram - mmd2_ustat(&x, &y, &k).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn seeded_runs_repeat() {
        let x = Points::from_scalars(&[0.0, 0.4, 1.0, 1.3]);
        let y = Points::from_scalars(&[0.2, 0.9, 1.9, 2.5]);
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            mmd_perm_test(&x, &y, &KernelSpec::gaussian_median(), 50, 0.05, &mut rng).unwrap()
        };
        assert_eq!(run(), run());
    }

    fn small_set() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 2..=5)
    }

    proptest! {
        #[test]
        fn ustat_matches_pair_enumeration(x in small_set(), y in small_set(), h in 0.2f64..3.0) {
            let px = Points::from_rows(&x).unwrap();
            let py = Points::from_rows(&y).unwrap();
            for k in [Kernel::Gaussian { bandwidth: h }, Kernel::Linear] {
                let got = mmd2_ustat(&px, &py, &k).unwrap();
                prop_assert!((got - brute_force(&x, &y, &k)).abs() < 1e-12);
            }
        }

        #[test]
        fn p_value_in_range(x in small_set(), y in small_set(), seed in any::<u64>(), b in 1usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = mmd_perm_test(
                &Points::from_rows(&x).unwrap(),
                &Points::from_rows(&y).unwrap(),
                &KernelSpec::gaussian_median(),
                b,
                0.05,
                &mut rng,
            ).unwrap();
            let p = out.p_value.unwrap();
            prop_assert!(p >= 1.0 / (b + 1) as f64 && p <= 1.0);
            prop_assert_eq!(out.reject, p <= 0.05);
        }
    }
}
