use std::collections::BTreeMap;
use std::ops::Range;

use super::witness::{witness_estimate, Witness};
use super::{z_decision, Sided, TestOutcome};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::points::Points;

/// Minimum labeled size per side: each half needs two points.
pub(crate) const MIN_LABELED: usize = 4;

/// `(witness rows, projection rows)`: the first `n / 2` rows train the witness.
pub fn split_halves(n: usize) -> (Range<usize>, Range<usize>) {
    let h = n / 2;
    (0..h, h..n)
}

/// Witness trained on the first halves plus projections of the second halves.
pub(crate) struct SplitProjection {
    pub witness: Witness,
    pub fx: Vec<f64>,
    pub fy: Vec<f64>,
    pub x_test: Range<usize>,
    pub y_test: Range<usize>,
    pub diagnostics: BTreeMap<String, f64>,
}

pub(crate) fn split_and_project(x: &Points, y: &Points, kernel: &KernelSpec) -> Result<SplitProjection> {
    for p in [x, y] {
        if p.len() < MIN_LABELED {
            return Err(Error::TooFewPoints {
                what: "split test (witness and projection halves)",
                needed: MIN_LABELED,
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
    let (xw, xt) = split_halves(x.len());
    let (yw, yt) = split_halves(y.len());
    let x_train = x.slice_rows(xw.start, xw.end);
    let y_train = y.slice_rows(yw.start, yw.end);
    // Bandwidth comes from the witness halves only, so f stays independent of
    // the projected halves.
    let resolved = kernel.resolve(&x_train.concat_rows(&y_train)?)?;
    let witness = witness_estimate(&x_train, &y_train, resolved.kernel)?;
    let fx = witness.project(&x.slice_rows(xt.start, xt.end))?;
    let fy = witness.project(&y.slice_rows(yt.start, yt.end))?;

    let mut diagnostics = BTreeMap::new();
    if let Some(h) = resolved.kernel.bandwidth() {
        diagnostics.insert("bandwidth".into(), h);
    }
    if resolved.degenerate_bandwidth {
        diagnostics.insert("degenerate_bandwidth".into(), 1.0);
    }
    diagnostics.insert("n1_test".into(), fx.len() as f64);
    diagnostics.insert("n2_test".into(), fy.len() as f64);
    Ok(SplitProjection {
        witness,
        fx,
        fy,
        x_test: xt,
        y_test: yt,
        diagnostics,
    })
}

fn mean_and_scaled_var(f: &[f64]) -> (f64, f64) {
    let n = f.len() as f64;
    let mean = f.iter().sum::<f64>() / n;
    let ss: f64 = f.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n * n))
}

/// `(mean fx - mean fy) / sqrt(var_x + var_y)` with `var = n^-2 sum (f - mean)^2`.
pub fn xmmd_statistic(fx: &[f64], fy: &[f64]) -> Result<f64> {
    if fx.is_empty() || fy.is_empty() {
        return Err(Error::TooFewPoints {
            what: "projected sample",
            needed: 1,
            found: fx.len().min(fy.len()),
        });
    }
    let (mx, vx) = mean_and_scaled_var(fx);
    let (my, vy) = mean_and_scaled_var(fy);
    let var = vx + vy;
    if !(var > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    Ok((mx - my) / var.sqrt())
}

/// Cross-MMD test: studentized mean difference of witness projections.
pub fn xmmd_test(
    x: &Points,
    y: &Points,
    kernel: &KernelSpec,
    alpha: f64,
    sided: Sided,
) -> Result<TestOutcome> {
    let proj = split_and_project(x, y, kernel)?;
    let statistic = xmmd_statistic(&proj.fx, &proj.fy)?;
    let (threshold, reject) = z_decision(statistic, alpha, sided)?;
    Ok(TestOutcome {
        test_name: "xmmd".into(),
        statistic,
        alpha,
        sided,
        reject,
        p_value: None,
        threshold: Some(threshold),
        diagnostics: proj.diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves() {
        assert_eq!(split_halves(4), (0..2, 2..4));
        assert_eq!(split_halves(5), (0..2, 2..5));
    }

    #[test]
    fn statistic_by_hand() {
        // means 2 and 0; var_x = (1+1)/4 = 0.5, var_y = (1+1)/4 = 0.5
        let t = xmmd_statistic(&[1.0, 3.0], &[-1.0, 1.0]).unwrap();
        assert!((t - 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_projections_are_degenerate() {
        assert!(matches!(
            xmmd_statistic(&[2.0, 2.0, 2.0], &[1.0, 1.0]),
            Err(Error::DegenerateVariance)
        ));
        let x = Points::from_scalars(&[1.0; 6]);
        let y = Points::from_scalars(&[1.0; 6]);
        assert!(matches!(
            xmmd_test(&x, &y, &KernelSpec::gaussian_median(), 0.05, Sided::OneSided),
            Err(Error::DegenerateVariance)
        ));
    }

    #[test]
    fn statistic_is_antisymmetric_for_a_fixed_witness() {
        let fx = [0.3, -0.1, 0.8, 0.25];
        let fy = [-0.4, 0.05, 0.1];
        assert_eq!(xmmd_statistic(&fx, &fy).unwrap(), -xmmd_statistic(&fy, &fx).unwrap());
    }

    #[test]
    fn swapping_samples_flips_the_witness_too() {
        // f -> -f and mean(f(X)) - mean(f(Y)) -> its negative: the signs cancel.
        let x = Points::from_scalars(&[0.1, 0.9, -0.3, 1.7, 0.4, 2.2, 0.0]);
        let y = Points::from_scalars(&[1.1, 0.2, 2.3, 0.8, 1.9, 1.4]);
        for kernel in [KernelSpec::gaussian_median(), KernelSpec::linear()] {
            let a = split_and_project(&x, &y, &kernel).unwrap();
            let b = split_and_project(&y, &x, &kernel).unwrap();
            let neg = |v: &[f64]| v.iter().map(|t| -t).collect::<Vec<_>>();
            assert_eq!(b.fx, neg(&a.fy));
            assert_eq!(b.fy, neg(&a.fx));
            let ta = xmmd_test(&x, &y, &kernel, 0.05, Sided::OneSided).unwrap().statistic;
            let tb = xmmd_test(&y, &x, &kernel, 0.05, Sided::OneSided).unwrap().statistic;
            assert_eq!(ta, tb);
        }
    }

    #[test]
    fn too_small() {
        let x = Points::from_scalars(&[0.0, 1.0, 2.0]);
        let y = Points::from_scalars(&[0.0, 1.0, 2.0, 3.0]);
        assert!(matches!(
            xmmd_test(&x, &y, &KernelSpec::linear(), 0.05, Sided::OneSided),
            Err(Error::TooFewPoints { .. })
        ));
    }
}
