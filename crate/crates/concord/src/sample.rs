//! Paired measurements of one quantity by two techniques.

use crate::error::{Error, Result};
use crate::stats::check_finite;

pub const MIN_SUBJECTS: usize = 3;

/// Per-subject repeated measurements, kept alongside the collapsed means so
/// the error-variance ratio can still be estimated from within-subject spread.
#[derive(Debug, Clone, PartialEq)]
pub struct Replicates {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
}

/// n subjects measured once (or repeatedly) by a reference technique `x` and
/// a candidate technique `y`. For replicated designs, `x` and `y` hold the
/// per-subject means and the raw values stay in `replicates`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    pub subject_ids: Vec<String>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub replicates: Option<Replicates>,
    pub unit_label: Option<String>,
}

impl PairedSample {
    pub fn new(subject_ids: Vec<String>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || subject_ids.len() != x.len() {
            return Err(Error::LengthMismatch {
                x_len: x.len(),
                y_len: y.len(),
            });
        }
        if x.len() < MIN_SUBJECTS {
            return Err(Error::TooFewSubjects {
                min: MIN_SUBJECTS,
                got: x.len(),
            });
        }
        check_finite(&x)?;
        check_finite(&y)?;
        Ok(PairedSample {
            subject_ids,
            x,
            y,
            replicates: None,
            unit_label: None,
        })
    }

    /// Builds a replicated sample; `x` and `y` become per-subject means.
    pub fn with_replicates(
        subject_ids: Vec<String>,
        x_reps: Vec<Vec<f64>>,
        y_reps: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if x_reps.len() != y_reps.len() || subject_ids.len() != x_reps.len() {
            return Err(Error::LengthMismatch {
                x_len: x_reps.len(),
                y_len: y_reps.len(),
            });
        }
        for (subject, (xr, yr)) in x_reps.iter().zip(&y_reps).enumerate() {
            if xr.len() < 2 || yr.len() < 2 {
                return Err(Error::NoReplicates { subject });
            }
            check_finite(xr)?;
            check_finite(yr)?;
        }
        let x: Vec<f64> = x_reps.iter().map(|r| mean(r)).collect();
        let y: Vec<f64> = y_reps.iter().map(|r| mean(r)).collect();
        let mut sample = PairedSample::new(subject_ids, x, y)?;
        sample.replicates = Some(Replicates {
            x: x_reps,
            y: y_reps,
        });
        Ok(sample)
    }

    pub fn with_unit_label(mut self, label: impl Into<String>) -> Self {
        self.unit_label = Some(label.into());
        self
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Per-subject differences y - x (candidate minus reference).
    pub fn differences(&self) -> Vec<f64> {
        self.x.iter().zip(&self.y).map(|(&x, &y)| y - x).collect()
    }

    /// Per-subject sums x + y, the precision-test predictor.
    pub fn sums(&self) -> Vec<f64> {
        self.x.iter().zip(&self.y).map(|(&x, &y)| x + y).collect()
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
