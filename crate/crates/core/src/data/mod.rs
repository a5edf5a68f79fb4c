//! Image ingestion, stage dataset assembly, splitting, client partitioning and
//! synthetic data.

mod assemble;
mod partition;
mod pgm;
mod resize;
mod synth;

pub use assemble::{build_stage_datasets, load_category, stage_sizes, CATEGORY_DIRS};
pub use partition::{
    partition_clients, partition_indices, split_indices, split_train_test, Distribution,
    PartitionKind, PartitionScheme, UNBALANCED_FRACTIONS,
};
pub use pgm::{encode_pgm, load_pgm, parse_pgm, write_pgm, GrayImage};
pub use resize::resize_bilinear;
pub use synth::{render_category, synth_dataset, write_synthetic_tree, Category, SynthTask};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lenet::IMAGE_SIDE;
use crate::tensor::Tensor;

/// Which of the two classification tasks a dataset or run belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Healthy (0) vs Pneumonia (1).
    StageOne,
    /// Non-Covid Pneumonia (0) vs Covid Pneumonia (1).
    StageTwo,
}

impl Stage {
    pub fn category_names(self) -> [&'static str; 2] {
        match self {
            Stage::StageOne => ["Healthy", "Pneumonia"],
            Stage::StageTwo => ["Non-Covid Pneumonia", "Covid Pneumonia"],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::StageOne => "stage_one",
            Stage::StageTwo => "stage_two",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "one" | "stage_one" | "stage-one" => Ok(Stage::StageOne),
            "2" | "two" | "stage_two" | "stage-two" => Ok(Stage::StageTwo),
            _ => Err(Error::Config(format!("unknown stage `{s}` (expected one or two)"))),
        }
    }
}

/// `[1, 28, 28]` images in `[0, 1]` with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    images: Vec<Tensor<f32>>,
    labels: Vec<u8>,
    stage: Stage,
}

impl LabeledDataset {
    pub fn new(images: Vec<Tensor<f32>>, labels: Vec<u8>, stage: Stage) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} images but {} labels",
                images.len(),
                labels.len()
            )));
        }
        for img in &images {
            if img.shape() != [1, IMAGE_SIDE, IMAGE_SIDE] {
                return Err(Error::shape(
                    "dataset",
                    "image",
                    format!("expected [1, 28, 28], got {:?}", img.shape()),
                ));
            }
            if img.data().iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidArgument("pixel values must lie in [0, 1]".into()));
            }
        }
        if let Some(&l) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::LabelOutOfRange {
                label: l as usize,
                classes: 2,
            });
        }
        Ok(Self { images, labels, stage })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn images(&self) -> &[Tensor<f32>] {
        &self.images
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn category_names(&self) -> [&'static str; 2] {
        self.stage.category_names()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.len() - ones, ones]
    }

    /// Examples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            images: indices.iter().map(|&i| self.images[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            stage: self.stage,
        }
    }

    /// Both classes present; required before training or evaluation.
    pub fn ensure_both_classes(&self) -> Result<()> {
        let counts = self.class_counts();
        for (label, &n) in counts.iter().enumerate() {
            if n == 0 {
                return Err(Error::EmptyCategory(self.category_names()[label].to_string()));
            }
        }
        Ok(())
    }
}
