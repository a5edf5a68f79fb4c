//! Binary classification metrics: confusion counts, precision, sensitivity,
//! specificity, ROC and AUC, plus the serialized evaluation report.
//!
//! Label 1 is the positive class (Pneumonia in stage one, Covid in stage two).

mod report;
mod roc;

pub use report::{evaluate, positive_scores, write_json, write_roc_csv, EvalReport, Provenance, ReportMeta, TrainingSetting};
pub use roc::{auc, auc_pair_counting, roc_curve, RocPoint};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decision threshold: a score at or above it predicts the positive class.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        Self { tp, tn, fp, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// TP / (TP + FP)
    pub fn precision(&self) -> Result<f64> {
        ratio(self.tp, self.tp + self.fp, "precision")
    }

    /// TP / (TP + FN)
    pub fn sensitivity(&self) -> Result<f64> {
        ratio(self.tp, self.tp + self.fn_, "sensitivity")
    }

    /// TN / (TN + FP)
    pub fn specificity(&self) -> Result<f64> {
        ratio(self.tn, self.tn + self.fp, "specificity")
    }

    pub fn accuracy(&self) -> Result<f64> {
        ratio(self.tp + self.tn, self.total(), "accuracy")
    }
}

fn ratio(num: u64, den: u64, metric: &'static str) -> Result<f64> {
    if den == 0 {
        return Err(Error::UndefinedMetric(metric));
    }
    Ok(num as f64 / den as f64)
}

pub fn precision(c: &ConfusionCounts) -> Result<f64> {
    c.precision()
}

pub fn sensitivity(c: &ConfusionCounts) -> Result<f64> {
    c.sensitivity()
}

pub fn specificity(c: &ConfusionCounts) -> Result<f64> {
    c.specificity()
}

pub(crate) fn check_scores(scores: &[f64], labels: &[u8]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::shape(
            "metrics",
            "length",
            format!("{} scores but {} labels", scores.len(), labels.len()),
        ));
    }
    if scores.is_empty() {
        return Err(Error::InvalidArgument("no scores to evaluate".into()));
    }
    if let Some(&label) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::LabelOutOfRange {
            label: label as usize,
            classes: 2,
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite { op: "metrics" });
    }
    Ok(())
}

/// Counts predictions `score >= threshold` against the 0/1 labels.
pub fn confusion_at_threshold(scores: &[f64], labels: &[u8], threshold: f64) -> Result<ConfusionCounts> {
    check_scores(scores, labels)?;
    let mut c = ConfusionCounts::default();
    for (&s, &l) in scores.iter().zip(labels) {
        match (s >= threshold, l == 1) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}
