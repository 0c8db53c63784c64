use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::normal_cdf;

/// Asymptotic Kolmogorov critical constant at level 0.01.
pub const KS_C_001: f64 = 1.628;
pub const KS_MIN_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub distance: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// One-sample Kolmogorov-Smirnov distance to the standard normal.
///
/// Passes at level 0.01 iff `D < 1.628 / sqrt(N)`.
pub fn ks_normality(stats: &[f64]) -> Result<KsResult> {
    if stats.len() < KS_MIN_SAMPLES {
        return Err(Error::TooFewPoints {
            what: "KS normality check",
            needed: KS_MIN_SAMPLES,
            found: stats.len(),
        });
    }
    if stats.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("KS input contains non-finite values"));
    }
    let mut sorted = stats.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let distance = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let threshold = KS_C_001 / n.sqrt();
    Ok(KsResult {
        distance,
        threshold,
        pass: distance < threshold,
    })
}
