//! Test statistics and decision procedures.

mod mmd;
mod normal;
mod power;
mod semisup;
mod witness;
mod xmmd;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::Points;

pub use mmd::{mmd2_ustat, mmd2_ustat_from_gram, mmd_perm_test};
pub use normal::{normal_cdf, z_quantile};
pub use power::{analytic_power_linear, LinearPower};
pub use semisup::{
    crossfit_moments, oracle_test, ss_mean, ss_statistic, ss_variance, xssmmd_test, SsMoments,
};
pub use witness::{witness_estimate, Witness};
pub use xmmd::{split_halves, xmmd_statistic, xmmd_test};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Sided {
    #[default]
    OneSided,
    TwoSided,
}

/// Result of running one test on one data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub test_name: String,
    pub statistic: f64,
    pub alpha: f64,
    pub sided: Sided,
    pub reject: bool,
    /// Permutation tests only.
    pub p_value: Option<f64>,
    /// Normal-quantile tests only.
    pub threshold: Option<f64>,
    pub diagnostics: BTreeMap<String, f64>,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Normal-quantile decision: `T > z_{1-alpha}` or `|T| > z_{1-alpha/2}`.
pub(crate) fn z_decision(statistic: f64, alpha: f64, sided: Sided) -> Result<(f64, bool)> {
    check_alpha(alpha)?;
    Ok(match sided {
        Sided::OneSided => {
            let t = z_quantile(1.0 - alpha)?;
            (t, statistic > t)
        }
        Sided::TwoSided => {
            let t = z_quantile(1.0 - alpha / 2.0)?;
            (t, statistic.abs() > t)
        }
    })
}

/// Labeled pairs `(X_i, V_i)`, `(Y_i, W_i)` plus covariate-only pools.
///
/// `x` and `v` are row-aligned, as are `y` and `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiSupervisedSample {
    pub x: Points,
    pub v: Points,
    pub y: Points,
    pub w: Points,
    pub unlabeled_v: Points,
    pub unlabeled_w: Points,
}

impl SemiSupervisedSample {
    pub fn new(
        x: Points,
        v: Points,
        y: Points,
        w: Points,
        unlabeled_v: Points,
        unlabeled_w: Points,
    ) -> Result<Self> {
        let s = Self {
            x,
            v,
            y,
            w,
            unlabeled_v,
            unlabeled_w,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let pair = |a: &Points, b: &Points| {
            if a.len() != b.len() {
                Err(Error::LengthMismatch {
                    left: a.len(),
                    right: b.len(),
                })
            } else {
                Ok(())
            }
        };
        let same_dim = |a: &Points, b: &Points| {
            if a.dim() != b.dim() {
                Err(Error::DimensionMismatch {
                    expected: a.dim(),
                    found: b.dim(),
                })
            } else {
                Ok(())
            }
        };
        pair(&self.x, &self.v)?;
        pair(&self.y, &self.w)?;
        same_dim(&self.x, &self.y)?;
        same_dim(&self.v, &self.unlabeled_v)?;
        same_dim(&self.w, &self.unlabeled_w)?;
        Ok(())
    }

    pub fn n1(&self) -> usize {
        self.x.len()
    }

    pub fn n2(&self) -> usize {
        self.y.len()
    }

    pub fn m1(&self) -> usize {
        self.unlabeled_v.len()
    }

    pub fn m2(&self) -> usize {
        self.unlabeled_w.len()
    }

    /// The same data with the X side and Y side exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            x: self.y.clone(),
            v: self.w.clone(),
            y: self.x.clone(),
            w: self.v.clone(),
            unlabeled_v: self.unlabeled_w.clone(),
            unlabeled_w: self.unlabeled_v.clone(),
        }
    }

    /// Joint labeled observations `(X, V)` and `(Y, W)`.
    pub fn joint(&self) -> Result<(Points, Points)> {
        if self.v.dim() != self.w.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.v.dim(),
                found: self.w.dim(),
            });
        }
        Ok((self.x.concat_columns(&self.v)?, self.y.concat_columns(&self.w)?))
    }
}
