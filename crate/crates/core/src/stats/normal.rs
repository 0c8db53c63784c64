//! Standard normal CDF and quantile.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

fn standard() -> Normal {
    Normal::standard()
}

pub fn normal_cdf(x: f64) -> f64 {
    standard().cdf(x)
}

/// Inverse standard normal CDF on `(0, 1)`.
pub fn z_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!(
            "quantile level must lie in (0, 1), got {p}"
        )));
    }
    Ok(standard().inverse_cdf(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference quantiles from a 50-digit mpmath evaluation of sqrt(2) * erfinv(2p - 1).
    const REFERENCE: [(f64, f64); 7] = [
        (0.5, 0.0),
        (0.95, 1.644_853_626_951_472_7),
        (0.975, 1.959_963_984_540_054),
        (0.99, 2.326_347_874_040_841),
        (0.05, -1.644_853_626_951_472_7),
        (0.001, -3.090_232_306_167_813_5),
        (0.999_999, 4.753_424_308_822_899),
    ];

    #[test]
    fn quantile_matches_reference() {
        for (p, z) in REFERENCE {
            let got = z_quantile(p).unwrap();
            assert!((got - z).abs() <= 1e-8, "p={p}: {got} vs {z}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for i in 1..100 {
            let p = i as f64 / 100.0;
            assert!((normal_cdf(z_quantile(p).unwrap()) - p).abs() < 1e-9);
        }
    }

    #[test]
    fn quantile_domain() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(z_quantile(p).is_err());
        }
    }
}
