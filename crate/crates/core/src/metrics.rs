//! Classification metrics on thresholded 0/1 predictions, and fitness.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("label and prediction lengths differ ({labels} vs {predictions})")]
    LengthMismatch { labels: usize, predictions: usize },
    #[error("metrics need at least one sample")]
    Empty,
    #[error("fitness inputs must lie in [0, 1], got ({0}, {1})")]
    Domain(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub mae: f64,
    pub rmse: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Positive class is 1. F1 is defined as 0 when `2tp + fp + fn = 0`.
pub fn compute_metrics(labels: &[u8], predicted: &[u8]) -> Result<MetricsReport, MetricsError> {
    if labels.len() != predicted.len() {
        return Err(MetricsError::LengthMismatch {
            labels: labels.len(),
            predictions: predicted.len(),
        });
    }
    if labels.is_empty() {
        return Err(MetricsError::Empty);
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    let mut abs_err = 0.0;
    let mut sq_err = 0.0;
    for (&y, &p) in labels.iter().zip(predicted) {
        match (y != 0, p != 0) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
            (true, false) => fn_ += 1,
        }
        let d = y as f64 - p as f64;
        abs_err += d.abs();
        sq_err += d * d;
    }
    let n = labels.len() as f64;
    let f1_den = 2 * tp + fp + fn_;
    Ok(MetricsReport {
        accuracy: (tp + tn) as f64 / n,
        mae: abs_err / n,
        rmse: (sq_err / n).sqrt(),
        f1: if f1_den == 0 {
            0.0
        } else {
            2.0 * tp as f64 / f1_den as f64
        },
        tp,
        fp,
        tn,
        fn_,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitnessMode {
    /// validation accuracy × test F1
    #[default]
    Product,
    TestF1,
}

pub fn fitness(validation_accuracy: f64, test_f1: f64) -> Result<f64, MetricsError> {
    let unit = 0.0..=1.0;
    if !unit.contains(&validation_accuracy) || !unit.contains(&test_f1) {
        return Err(MetricsError::Domain(validation_accuracy, test_f1));
    }
    Ok(validation_accuracy * test_f1)
}

impl FitnessMode {
    pub fn score(self, validation_accuracy: f64, test_f1: f64) -> Result<f64, MetricsError> {
        match self {
            FitnessMode::Product => fitness(validation_accuracy, test_f1),
            FitnessMode::TestF1 => fitness(1.0, test_f1),
        }
    }
}
