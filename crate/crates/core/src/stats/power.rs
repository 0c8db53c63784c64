use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{check_alpha, normal_cdf, z_quantile};
use crate::error::{Error, Result};

/// Asymptotic power of the three tests under the bilinear kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearPower {
    pub xssmmd: f64,
    pub xmmd: f64,
    pub perm: f64,
}

fn check_square(name: &str, m: &DMatrix<f64>, d: usize) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::invalid(format!(
            "{name} must be {d}x{d}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Power approximations `Phi(z_alpha + n |mu|^2 / s)` for the Gaussian
/// location model with covariance blocks `s11 = Cov(X)`, `s12 = Cov(X, V)`,
/// `s22 = Cov(V)`.
///
/// `s` is `sqrt(4 tr(S11^2) - 2 tr(S12 S22^-1 S21 S11))` for xssMMD,
/// `sqrt(4 tr(S11^2))` for xMMD and `sqrt(2 tr(S11^2))` for the permutation
/// test. `n` is the per-side size of the projected sample.
pub fn analytic_power_linear(
    mu_diff: &DVector<f64>,
    s11: &DMatrix<f64>,
    s12: &DMatrix<f64>,
    s22: &DMatrix<f64>,
    n: usize,
    alpha: f64,
) -> Result<LinearPower> {
    check_alpha(alpha)?;
    let d = mu_diff.len();
    check_square("Sigma11", s11, d)?;
    if s12.nrows() != d || s22.nrows() != s12.ncols() {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: s12.nrows(),
        });
    }
    check_square("Sigma22", s22, s12.ncols())?;
    let s22_inv = s22.clone().try_inverse().ok_or(Error::SingularMatrix)?;

    let t11 = (s11 * s11).trace();
    let reduction = (s12 * &s22_inv * s12.transpose() * s11).trace();
    let ss_var = 4.0 * t11 - 2.0 * reduction;
    if ss_var < 0.0 {
        return Err(Error::NegativeVariance(ss_var));
    }
    if !(t11 > 0.0) {
        return Err(Error::NegativeVariance(t11));
    }
    let z_alpha = -z_quantile(1.0 - alpha)?;
    let signal = n as f64 * mu_diff.dot(mu_diff);
    let power = |denom: f64| {
        if denom == 0.0 {
            if signal > 0.0 { 1.0 } else { alpha }
        } else {
            normal_cdf(z_alpha + signal / denom)
        }
    };
    Ok(LinearPower {
        xssmmd: power(ss_var.sqrt()),
        xmmd: power((4.0 * t11).sqrt()),
        perm: power((2.0 * t11).sqrt()),
    })
}
