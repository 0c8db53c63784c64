use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::points::{dot, Points};

/// Empirical MMD witness `f(t) = mean_i k(x_i, t) - mean_j k(y_j, t)`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub x_refs: Points,
    pub y_refs: Points,
    pub kernel: Kernel,
    // For the linear kernel the witness collapses to <mean(x) - mean(y), t>.
    linear_direction: Option<Vec<f64>>,
}

pub fn witness_estimate(x_train: &Points, y_train: &Points, kernel: Kernel) -> Result<Witness> {
    if x_train.is_empty() || y_train.is_empty() {
        return Err(Error::TooFewPoints {
            what: "witness training fold",
            needed: 1,
            found: x_train.len().min(y_train.len()),
        });
    }
    if x_train.dim() != y_train.dim() {
        return Err(Error::DimensionMismatch {
            expected: x_train.dim(),
            found: y_train.dim(),
        });
    }
    let linear_direction = match kernel {
        Kernel::Linear => {
            let mx = column_means(x_train);
            let my = column_means(y_train);
            Some(mx.iter().zip(&my).map(|(a, b)| a - b).collect())
        }
        Kernel::Gaussian { .. } => None,
    };
    Ok(Witness {
        x_refs: x_train.clone(),
        y_refs: y_train.clone(),
        kernel,
        linear_direction,
    })
}

fn column_means(p: &Points) -> Vec<f64> {
    let mut m = vec![0.0; p.dim()];
    for r in p.rows() {
        for (acc, v) in m.iter_mut().zip(r) {
            *acc += v;
        }
    }
    let n = p.len() as f64;
    m.iter_mut().for_each(|v| *v /= n);
    m
}

impl Witness {
    pub fn dim(&self) -> usize {
        self.x_refs.dim()
    }

    pub fn eval(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: t.len(),
            });
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: &[f64]) -> f64 {
        if let Some(dir) = &self.linear_direction {
            return dot(dir, t);
        }
        let mean = |refs: &Points| {
            refs.rows()
                .map(|r| self.kernel.eval_unchecked(r, t))
                .sum::<f64>()
                / refs.len() as f64
        };
        mean(&self.x_refs) - mean(&self.y_refs)
    }

    /// Projections `f(p_i)` of every point.
    pub fn project(&self, points: &Points) -> Result<Vec<f64>> {
        if points.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: points.dim(),
            });
        }
        Ok(points.rows().map(|t| self.eval_unchecked(t)).collect())
    }
}
