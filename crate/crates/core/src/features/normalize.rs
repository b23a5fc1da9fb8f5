use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-dimension z-score statistics fit on a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    /// Population standard deviation; `0` marks a constant dimension.
    pub std_dev: Vec<f64>,
}

impl Normalizer {
    pub fn fit<V: AsRef<[f64]>>(vectors: &[V]) -> Result<Self> {
        if vectors.len() < 2 {
            return Err(Error::input(format!(
                "normalizer needs at least 2 vectors, got {}",
                vectors.len()
            )));
        }
        Self::fit_iter(vectors.iter().map(AsRef::as_ref))
    }

    /// Fit over any sequence of equal-length rows (at least one).
    pub fn fit_iter<'a, I>(rows: I) -> Result<Self>
    where
        I: Iterator<Item = &'a [f64]> + Clone,
    {
        let mut first = rows.clone();
        let dim = first
            .next()
            .ok_or_else(|| Error::input("normalizer needs at least one vector"))?
            .len();
        let mut count = 0usize;
        let mut sum = vec![0.0; dim];
        let mut constant = vec![true; dim];
        let reference = rows.clone().next().unwrap_or_default();
        for row in rows.clone() {
            if row.len() != dim {
                return Err(Error::input(format!(
                    "feature dimension mismatch: {} vs {dim}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                sum[j] += v;
                constant[j] &= v == reference[j];
            }
            count += 1;
        }
        let n = count as f64;
        let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
        let mut sq = vec![0.0; dim];
        for row in rows {
            for (j, &v) in row.iter().enumerate() {
                let d = v - mean[j];
                sq[j] += d * d;
            }
        }
        let std_dev = sq
            .iter()
            .zip(&constant)
            .map(|(s, &c)| if c { 0.0 } else { (s / n).sqrt() })
            .collect();
        Ok(Self { mean, std_dev })
    }

    /// Normalizer that leaves vectors unchanged.
    pub fn identity(dim: usize) -> Self {
        Self {
            mean: vec![0.0; dim],
            std_dev: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, vector: &[f64]) -> Result<Vec<f64>> {
        if vector.len() != self.dim() {
            return Err(Error::input(format!(
                "feature dimension mismatch: {} vs {}",
                vector.len(),
                self.dim()
            )));
        }
        Ok(vector
            .iter()
            .enumerate()
            .map(|(j, &v)| self.apply_one(j, v))
            .collect())
    }

    #[inline]
    pub(crate) fn apply_one(&self, j: usize, v: f64) -> f64 {
        let sd = self.std_dev[j];
        if sd == 0.0 {
            0.0
        } else {
            (v - self.mean[j]) / sd
        }
    }
}
