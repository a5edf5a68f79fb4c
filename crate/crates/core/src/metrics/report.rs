use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{auc, confusion_at_threshold, roc_curve, ConfusionCounts, RocPoint, DEFAULT_THRESHOLD};
use crate::data::{Distribution, LabeledDataset, Stage};
use crate::error::{Error, Result};
use crate::lenet::{forward_image, ModelWeights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainingSetting {
    Centralized,
    Federated,
}

impl std::fmt::Display for TrainingSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrainingSetting::Centralized => "centralized",
            TrainingSetting::Federated => "federated",
        })
    }
}

impl std::str::FromStr for TrainingSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centralized" => Ok(TrainingSetting::Centralized),
            "federated" => Ok(TrainingSetting::Federated),
            _ => Err(Error::Config(format!(
                "unknown mode `{s}` (expected centralized or federated)"
            ))),
        }
    }
}

/// Where a stage-two model's initial weights came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub path: String,
    /// SHA-256 of the weight file's bytes.
    pub checksum: String,
}

impl Provenance {
    pub fn of_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Ok(Self {
            path: path.display().to_string(),
            checksum: crate::lenet::sha256_hex(&bytes),
        })
    }
}

/// Row labels of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportMeta {
    pub stage: Stage,
    pub setting: TrainingSetting,
    pub distribution: Option<Distribution>,
    pub interval: Option<usize>,
    pub rounds: usize,
    pub pretrained: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub stage: Stage,
    pub setting: TrainingSetting,
    pub distribution: Option<Distribution>,
    pub interval: Option<usize>,
    pub rounds: usize,
    pub test_examples: usize,
    pub confusion: ConfusionCounts,
    pub accuracy: f64,
    pub auc: f64,
    /// `None` when the denominator is zero.
    pub precision: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub weights_checksum: String,
    pub pretrained: Option<Provenance>,
    pub roc: Vec<RocPoint>,
}

fn defined(metric: Result<f64>) -> Result<Option<f64>> {
    match metric {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedMetric(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Positive-class probability of every example, in dataset order.
pub fn positive_scores(weights: &ModelWeights, data: &LabeledDataset) -> Result<Vec<f64>> {
    data.images()
        .par_iter()
        .map(|img| Ok(forward_image(weights.tensors(), img)?.data()[1] as f64))
        .collect()
}

pub fn evaluate(weights: &ModelWeights, test: &LabeledDataset, meta: ReportMeta) -> Result<EvalReport> {
    let scores = positive_scores(weights, test)?;
    let confusion = confusion_at_threshold(&scores, test.labels(), DEFAULT_THRESHOLD)?;
    let roc = roc_curve(&scores, test.labels())?;
    Ok(EvalReport {
        stage: meta.stage,
        setting: meta.setting,
        distribution: meta.distribution,
        interval: meta.interval,
        rounds: meta.rounds,
        test_examples: test.len(),
        accuracy: confusion.accuracy()?,
        auc: auc(&roc)?,
        precision: defined(confusion.precision())?,
        sensitivity: defined(confusion.sensitivity())?,
        specificity: defined(confusion.specificity())?,
        confusion,
        weights_checksum: weights.checksum(),
        pretrained: meta.pretrained,
        roc,
    })
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Two-column `fpr,tpr` CSV.
pub fn write_roc_csv(roc: &[RocPoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::from("fpr,tpr\n");
    for p in roc {
        text.push_str(&format!("{},{}\n", p.fpr, p.tpr));
    }
    fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}
