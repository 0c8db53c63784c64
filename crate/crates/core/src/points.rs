//! Dense row-major point sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A list of points in `R^dim` stored row-major in one buffer.
///
/// An empty set still carries its dimension so that empty unlabeled pools can
/// be validated against the labeled covariates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Points {
    dim: usize,
    data: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("point dimension must be at least 1"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "buffer of length {} is not a multiple of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn empty(dim: usize) -> Self {
        assert!(dim > 0, "point dimension must be at least 1");
        Self {
            dim,
            data: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, rows: usize) -> Self {
        assert!(dim > 0, "point dimension must be at least 1");
        Self {
            dim,
            data: Vec::with_capacity(dim * rows),
        }
    }

    /// Builds a point set from rows, all of which must share one length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::invalid("cannot infer dimension from zero rows"))?;
        let dim = first.as_ref().len();
        let mut out = Points::new(dim, Vec::with_capacity(dim * rows.len()))?;
        for r in rows {
            out.push(r.as_ref())?;
        }
        Ok(out)
    }

    /// One-dimensional points from scalars.
    pub fn from_scalars(values: &[f64]) -> Self {
        Self {
            dim: 1,
            data: values.to_vec(),
        }
    }

    pub fn push(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: row.len(),
            });
        }
        self.data.extend_from_slice(row);
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Rows at the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Points {
        let mut out = Points::with_capacity(self.dim, indices.len());
        for &i in indices {
            out.data.extend_from_slice(self.row(i));
        }
        out
    }

    /// Contiguous row range `[start, end)`.
    pub fn slice_rows(&self, start: usize, end: usize) -> Points {
        Points {
            dim: self.dim,
            data: self.data[start * self.dim..end * self.dim].to_vec(),
        }
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn concat_rows(&self, other: &Points) -> Result<Points> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Ok(Points {
            dim: self.dim,
            data,
        })
    }

    /// Row-wise concatenation of coordinates: `(a_i, b_i)`.
    pub fn concat_columns(&self, other: &Points) -> Result<Points> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        let dim = self.dim + other.dim;
        let mut data = Vec::with_capacity(dim * self.len());
        for (a, b) in self.rows().zip(other.rows()) {
            data.extend_from_slice(a);
            data.extend_from_slice(b);
        }
        Ok(Points { dim, data })
    }

    /// Keeps only the listed (0-based) coordinates of every row.
    pub fn columns(&self, cols: &[usize]) -> Result<Points> {
        if cols.is_empty() {
            return Err(Error::invalid("column selection is empty"));
        }
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.dim) {
            return Err(Error::invalid(format!(
                "column {bad} out of range for dimension {}",
                self.dim
            )));
        }
        let mut data = Vec::with_capacity(cols.len() * self.len());
        for r in self.rows() {
            data.extend(cols.iter().map(|&c| r[c]));
        }
        Ok(Points {
            dim: cols.len(),
            data,
        })
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_select() {
        let p = Points::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.row(1), &[3.0, 4.0]);
        assert_eq!(p.select(&[2, 0]).as_slice(), &[5.0, 6.0, 1.0, 2.0]);
        assert_eq!(p.columns(&[1]).unwrap().as_slice(), &[2.0, 4.0, 6.0]);
    }

    #[test]
    fn concat_columns_pairs_rows() {
        let a = Points::from_scalars(&[1.0, 2.0]);
        let b = Points::from_rows(&[[10.0, 11.0], [20.0, 21.0]]).unwrap();
        let j = a.concat_columns(&b).unwrap();
        assert_eq!(j.dim(), 3);
        assert_eq!(j.row(1), &[2.0, 20.0, 21.0]);
    }

    #[test]
    fn rejects_ragged_push() {
        let mut p = Points::empty(2);
        assert!(matches!(
            p.push(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(Points::new(2, vec![1.0, 2.0, 3.0]).is_err());
    }
}
