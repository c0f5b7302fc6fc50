use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::pipeline::NUM_CLASSES;

/// Counts indexed `[actual][predicted]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; NUM_CLASSES]; NUM_CLASSES],
}

/// Precision, recall and F1 of one class. The `*_undefined` flags mark a
/// zero denominator, in which case the value is reported as 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    pub precision_undefined: bool,
    pub recall_undefined: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowNormalized {
    pub rows: [[f64; NUM_CLASSES]; NUM_CLASSES],
    /// Rows with no samples; left as zeros.
    pub zero_rows: Vec<usize>,
}

impl ConfusionMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: [[u64; NUM_CLASSES]; NUM_CLASSES]) -> Self {
        Self { counts }
    }

    pub fn accumulate(&mut self, actual: usize, predicted: usize) -> Result<(), MetricsError> {
        for l in [actual, predicted] {
            if l >= NUM_CLASSES {
                return Err(MetricsError::LabelOutOfRange(l));
            }
        }
        self.counts[actual][predicted] += 1;
        Ok(())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, MetricsError> {
        let mut m = Self::new();
        for (a, p) in pairs {
            m.accumulate(a, p)?;
        }
        Ok(m)
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (r, o) in self.counts.iter_mut().zip(&other.counts) {
            for (c, x) in r.iter_mut().zip(o) {
                *c += x;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..NUM_CLASSES).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, r: usize) -> u64 {
        self.counts[r].iter().sum()
    }

    pub fn col_sum(&self, c: usize) -> u64 {
        self.counts.iter().map(|r| r[c]).sum()
    }

    pub fn accuracy(&self) -> Result<f64, MetricsError> {
        match self.total() {
            0 => Err(MetricsError::EmptyMatrix),
            n => Ok(self.trace() as f64 / n as f64),
        }
    }

    /// Micro-averaged F1. For single-label multiclass data this is
    /// `trace / total`, i.e. the accuracy.
    pub fn micro_f1(&self) -> Result<f64, MetricsError> {
        self.accuracy()
    }

    pub fn per_class(&self) -> Result<[ClassScores; NUM_CLASSES], MetricsError> {
        if self.total() == 0 {
            return Err(MetricsError::EmptyMatrix);
        }
        Ok(std::array::from_fn(|k| {
            let tp = self.counts[k][k] as f64;
            let predicted = self.col_sum(k);
            let support = self.row_sum(k);
            let precision = if predicted == 0 { 0.0 } else { tp / predicted as f64 };
            let recall = if support == 0 { 0.0 } else { tp / support as f64 };
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ClassScores {
                precision,
                recall,
                f1,
                support,
                precision_undefined: predicted == 0,
                recall_undefined: support == 0,
            }
        }))
    }

    /// Unweighted mean of the per-class F1 scores.
    pub fn macro_f1(&self) -> Result<f64, MetricsError> {
        let s = self.per_class()?;
        Ok(s.iter().map(|c| c.f1).sum::<f64>() / NUM_CLASSES as f64)
    }

    pub fn row_normalize(&self) -> RowNormalized {
        let mut rows = [[0.0; NUM_CLASSES]; NUM_CLASSES];
        let mut zero_rows = Vec::new();
        for (r, out) in rows.iter_mut().enumerate() {
            let sum = self.row_sum(r);
            if sum == 0 {
                zero_rows.push(r);
                continue;
            }
            for (c, v) in out.iter_mut().enumerate() {
                *v = self.counts[r][c] as f64 / sum as f64;
            }
        }
        RowNormalized { rows, zero_rows }
    }

    /// Relabel classes: entry `[a][p]` moves to `[perm[a]][perm[p]]`.
    pub fn permute(&self, perm: [usize; NUM_CLASSES]) -> Self {
        let mut out = Self::new();
        for a in 0..NUM_CLASSES {
            for p in 0..NUM_CLASSES {
                out.counts[perm[a]][perm[p]] = self.counts[a][p];
            }
        }
        out
    }
}

impl AddAssign<&ConfusionMatrix> for ConfusionMatrix {
    fn add_assign(&mut self, rhs: &ConfusionMatrix) {
        self.merge(rhs);
    }
}

impl Add for ConfusionMatrix {
    type Output = ConfusionMatrix;

    fn add(mut self, rhs: ConfusionMatrix) -> ConfusionMatrix {
        self.merge(&rhs);
        self
    }
}
