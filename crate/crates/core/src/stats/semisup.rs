//! Semi-supervised mean/variance estimators and the xssMMD / oracle tests.
//!
//! For one side with projections `f_i` on `n` labeled points and conditional
//! mean estimates `u_i` on the `n` labeled plus `m` unlabeled covariates:
//!
//! ```text
//! mu   = n^-1 sum_i (f_i - u_i) + (n + m)^-1 sum_{i <= n + m} u_i
//! var1 = empirical variance of (f_i - u_i) over the labeled points
//! var2 = empirical variance of u_i over all n + m points
//! var  = n^-1 var1 + (n + m)^-1 var2
//! ```
//!
//! Empirical variances divide by the count. The two-sample statistic is
//! `(mu_x - mu_y) / sqrt(var_x + var_y)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::witness::Witness;
use super::xmmd::{split_and_project, xmmd_statistic};
use super::{z_decision, SemiSupervisedSample, Sided, TestOutcome};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::points::Points;
use crate::regression::{crossfit_split, Predictor, Regressor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsMoments {
    pub mu_dagger: f64,
    pub var1_dagger: f64,
    pub var2_dagger: f64,
    pub combined_var: f64,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn empirical_var(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

fn check_lengths(f: &[f64], uhat_labeled: &[f64]) -> Result<()> {
    if f.len() != uhat_labeled.len() {
        return Err(Error::LengthMismatch {
            left: f.len(),
            right: uhat_labeled.len(),
        });
    }
    Ok(())
}

/// Semi-supervised mean: labeled residual mean plus pooled prediction mean.
pub fn ss_mean(f: &[f64], uhat_labeled: &[f64], uhat_unlabeled: &[f64]) -> Result<f64> {
    check_lengths(f, uhat_labeled)?;
    if f.is_empty() {
        return Err(Error::TooFewPoints {
            what: "semi-supervised mean",
            needed: 1,
            found: 0,
        });
    }
    let n = f.len() as f64;
    let resid = f.iter().zip(uhat_labeled).map(|(a, u)| a - u).sum::<f64>() / n;
    let total: f64 = uhat_labeled.iter().chain(uhat_unlabeled).sum();
    Ok(resid + total / (n + uhat_unlabeled.len() as f64))
}

/// Mean and variance components of the semi-supervised estimator.
pub fn ss_variance(f: &[f64], uhat_labeled: &[f64], uhat_unlabeled: &[f64]) -> Result<SsMoments> {
    check_lengths(f, uhat_labeled)?;
    let n = f.len();
    if n < 2 {
        return Err(Error::TooFewPoints {
            what: "semi-supervised variance",
            needed: 2,
            found: n,
        });
    }
    let m = uhat_unlabeled.len();
    let resid: Vec<f64> = f.iter().zip(uhat_labeled).map(|(a, u)| a - u).collect();
    let pooled: Vec<f64> = uhat_labeled.iter().chain(uhat_unlabeled).copied().collect();
    let var1 = empirical_var(&resid);
    let var2 = empirical_var(&pooled);
    Ok(SsMoments {
        mu_dagger: ss_mean(f, uhat_labeled, uhat_unlabeled)?,
        var1_dagger: var1,
        var2_dagger: var2,
        combined_var: var1 / n as f64 + var2 / (n + m) as f64,
    })
}

/// `(mu_x - mu_y) / sqrt(var_x + var_y)`.
pub fn ss_statistic(x: &SsMoments, y: &SsMoments) -> Result<f64> {
    let var = x.combined_var + y.combined_var;
    if !(var > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    Ok((x.mu_dagger - y.mu_dagger) / var.sqrt())
}

/// Cross-fitted conditional-mean predictions for one side.
///
/// Returns `(labeled predictions, unlabeled predictions, hyperparameters)`.
/// A regressor trained on fold a predicts the fold-b points and vice versa.
fn crossfit_predictions<R: Regressor + ?Sized>(
    f: &[f64],
    covariates: &Points,
    unlabeled: &Points,
    regressor: &R,
) -> Result<(Vec<f64>, Vec<f64>, Vec<(&'static str, f64)>)> {
    check_lengths(f, &vec![0.0; covariates.len()])?;
    if covariates.dim() != unlabeled.dim() {
        return Err(Error::DimensionMismatch {
            expected: covariates.dim(),
            found: unlabeled.dim(),
        });
    }
    let folds = crossfit_split(f.len(), unlabeled.len())?;
    let mut uhat_l = vec![0.0; f.len()];
    let mut uhat_u = vec![0.0; unlabeled.len()];
    let mut hyper = Vec::new();
    let passes = [
        (&folds.labeled_a, &folds.labeled_b, &folds.unlabeled_b, "a"),
        (&folds.labeled_b, &folds.labeled_a, &folds.unlabeled_a, "b"),
    ];
    for (train, eval_l, eval_u, tag) in passes {
        if train.is_empty() {
            return Err(Error::TooFewPoints {
                what: "cross-fitting training fold",
                needed: 1,
                found: 0,
            });
        }
        let responses: Vec<f64> = train.iter().map(|&i| f[i]).collect();
        let fitted = regressor.fit(&covariates.select(train), &responses)?;
        for (&i, p) in eval_l
            .iter()
            .zip(fitted.predict_many(&covariates.select(eval_l))?)
        {
            uhat_l[i] = p;
        }
        for (&j, p) in eval_u
            .iter()
            .zip(fitted.predict_many(&unlabeled.select(eval_u))?)
        {
            uhat_u[j] = p;
        }
        if tag == "a" {
            hyper = fitted.hyperparameters();
        }
    }
    Ok((uhat_l, uhat_u, hyper))
}

/// Cross-fitted semi-supervised moments of one projected sample.
pub fn crossfit_moments<R: Regressor + ?Sized>(
    f: &[f64],
    covariates: &Points,
    unlabeled: &Points,
    regressor: &R,
) -> Result<SsMoments> {
    let (ul, uu, _) = crossfit_predictions(f, covariates, unlabeled, regressor)?;
    ss_variance(f, &ul, &uu)
}

fn insert_moments(diag: &mut BTreeMap<String, f64>, side: &str, m: &SsMoments) {
    diag.insert(format!("mu_{side}"), m.mu_dagger);
    diag.insert(format!("var1_{side}"), m.var1_dagger);
    diag.insert(format!("var2_{side}"), m.var2_dagger);
}

/// Cross-fitted semi-supervised MMD test.
///
/// The first half of each labeled sample trains the witness (its covariates
/// are not used); the second half is projected and combined with every
/// unlabeled covariate through cross-fitted regression. When both unlabeled
/// pools are empty the statistic is the xMMD statistic on the same split.
pub fn xssmmd_test<R: Regressor + ?Sized>(
    sample: &SemiSupervisedSample,
    kernel: &KernelSpec,
    regressor: &R,
    alpha: f64,
    sided: Sided,
) -> Result<TestOutcome> {
    sample.validate()?;
    let proj = split_and_project(&sample.x, &sample.y, kernel)?;
    let mut diagnostics = proj.diagnostics;
    diagnostics.insert("m1".into(), sample.m1() as f64);
    diagnostics.insert("m2".into(), sample.m2() as f64);

    let statistic = if sample.m1() == 0 && sample.m2() == 0 {
        diagnostics.insert("m0_dispatch".into(), 1.0);
        xmmd_statistic(&proj.fx, &proj.fy)?
    } else {
        let v_test = sample.v.slice_rows(proj.x_test.start, proj.x_test.end);
        let w_test = sample.w.slice_rows(proj.y_test.start, proj.y_test.end);
        let (ulx, uux, hyper) = crossfit_predictions(&proj.fx, &v_test, &sample.unlabeled_v, regressor)?;
        let (uly, uuy, _) = crossfit_predictions(&proj.fy, &w_test, &sample.unlabeled_w, regressor)?;
        let mx = ss_variance(&proj.fx, &ulx, &uux)?;
        let my = ss_variance(&proj.fy, &uly, &uuy)?;
        insert_moments(&mut diagnostics, "x", &mx);
        insert_moments(&mut diagnostics, "y", &my);
        for (k, v) in hyper {
            diagnostics.insert(k.into(), v);
        }
        ss_statistic(&mx, &my)?
    };
    let (threshold, reject) = z_decision(statistic, alpha, sided)?;
    Ok(TestOutcome {
        test_name: format!("xssmmd({})", regressor.label()),
        statistic,
        alpha,
        sided,
        reject,
        p_value: None,
        threshold: Some(threshold),
        diagnostics,
    })
}

/// Semi-supervised test with caller-supplied true conditional means.
///
/// `condmean_x(witness, v)` must return `E[f(X) | V = v]` for the witness
/// estimated on the first halves; likewise for `condmean_y`. No cross-fitting
/// is involved.
pub fn oracle_test<FX, FY>(
    sample: &SemiSupervisedSample,
    kernel: &KernelSpec,
    condmean_x: FX,
    condmean_y: FY,
    alpha: f64,
    sided: Sided,
) -> Result<TestOutcome>
where
    FX: Fn(&Witness, &[f64]) -> f64,
    FY: Fn(&Witness, &[f64]) -> f64,
{
    sample.validate()?;
    let proj = split_and_project(&sample.x, &sample.y, kernel)?;
    let wit = &proj.witness;
    let side = |f: &[f64], cov: &Points, unl: &Points, cm: &dyn Fn(&Witness, &[f64]) -> f64| {
        let ul: Vec<f64> = cov.rows().map(|v| cm(wit, v)).collect();
        let uu: Vec<f64> = unl.rows().map(|v| cm(wit, v)).collect();
        ss_variance(f, &ul, &uu)
    };
    let v_test = sample.v.slice_rows(proj.x_test.start, proj.x_test.end);
    let w_test = sample.w.slice_rows(proj.y_test.start, proj.y_test.end);
    let mx = side(&proj.fx, &v_test, &sample.unlabeled_v, &condmean_x)?;
    let my = side(&proj.fy, &w_test, &sample.unlabeled_w, &condmean_y)?;
    let statistic = ss_statistic(&mx, &my)?;
    let (threshold, reject) = z_decision(statistic, alpha, sided)?;
    let mut diagnostics = proj.diagnostics;
    insert_moments(&mut diagnostics, "x", &mx);
    insert_moments(&mut diagnostics, "y", &my);
    Ok(TestOutcome {
        test_name: "xssmmd(oracle)".into(),
        statistic,
        alpha,
        sided,
        reject,
        p_value: None,
        threshold: Some(threshold),
        diagnostics,
    })
}
