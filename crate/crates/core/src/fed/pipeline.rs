use std::path::PathBuf;

use super::{derive_seed, initial_weights, run_stage, train_centralized, FedConfig, StageRun};
use crate::data::{
    build_stage_datasets, partition_clients, split_train_test, synth_dataset, Distribution, LabeledDataset,
    PartitionScheme, Stage, SynthTask,
};
use crate::error::{Error, Result};
use crate::lenet::save_weights;
use crate::metrics::{evaluate, EvalReport, Provenance, ReportMeta, TrainingSetting};

/// Where stage datasets come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// A root holding `healthy/`, `covid/` and `non_covid/` PGM folders.
    Directory(PathBuf),
    /// Generated shapes, `per_class` examples of each label per stage.
    Synthetic { per_class: usize, seed: u64 },
}

impl DataSource {
    pub fn load_both(&self) -> Result<(LabeledDataset, LabeledDataset)> {
        match self {
            DataSource::Directory(root) => build_stage_datasets(root),
            DataSource::Synthetic { .. } => Ok((self.load(Stage::StageOne)?, self.load(Stage::StageTwo)?)),
        }
    }

    pub fn load(&self, stage: Stage) -> Result<LabeledDataset> {
        match self {
            DataSource::Directory(root) => {
                let (one, two) = build_stage_datasets(root)?;
                Ok(match stage {
                    Stage::StageOne => one,
                    Stage::StageTwo => two,
                })
            }
            DataSource::Synthetic { per_class, seed } => {
                let seed = match stage {
                    Stage::StageOne => *seed,
                    Stage::StageTwo => derive_seed(*seed, 2),
                };
                synth_dataset(*per_class, seed, SynthTask::for_stage(stage))
            }
        }
    }
}

/// Settings shared by both stages of a pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub setting: TrainingSetting,
    pub distribution: Distribution,
    pub split_ratio: f64,
    /// Drives the train/test split and the client partition of each stage.
    pub data_seed: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            setting: TrainingSetting::Federated,
            distribution: Distribution::Balanced,
            split_ratio: 0.8,
            data_seed: 0,
        }
    }
}

impl PipelineOptions {
    pub fn split_seed(&self, stage: Stage) -> u64 {
        derive_seed(self.data_seed, 10 + stage_tag(stage))
    }

    pub fn partition_seed(&self, stage: Stage) -> u64 {
        derive_seed(self.data_seed, 20 + stage_tag(stage))
    }

    /// Stratified split of a stage dataset with this run's seed.
    pub fn split(&self, data: &LabeledDataset) -> Result<(LabeledDataset, LabeledDataset)> {
        split_train_test(data, self.split_ratio, self.split_seed(data.stage()))
    }

    /// Client shards of a training set per the configured distribution.
    pub fn partition(&self, train: &LabeledDataset, clients: usize) -> Result<Vec<LabeledDataset>> {
        let scheme = PartitionScheme::for_distribution(self.distribution, clients);
        partition_clients(train, &scheme, self.partition_seed(train.stage()))
    }
}

fn stage_tag(stage: Stage) -> u64 {
    match stage {
        Stage::StageOne => 1,
        Stage::StageTwo => 2,
    }
}

#[derive(Debug, Clone)]
pub struct StageResult {
    pub run: StageRun,
    pub report: EvalReport,
    /// Training examples per client; a single entry for centralized runs.
    pub shard_sizes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TwoStageOutcome {
    pub stage_one: StageResult,
    pub stage_two: StageResult,
}

/// Trains one stage on an already split dataset and evaluates the final model.
pub fn train_and_evaluate(
    config: &FedConfig,
    options: &PipelineOptions,
    train: &LabeledDataset,
    test: &LabeledDataset,
) -> Result<StageResult> {
    config.validate()?;
    if train.stage() != config.stage || test.stage() != config.stage {
        return Err(Error::Config(format!(
            "{} config given {} training data and {} test data",
            config.stage,
            train.stage(),
            test.stage()
        )));
    }
    let pretrained = match (&config.stage, &config.pretrained) {
        (Stage::StageTwo, Some(path)) if path.is_file() => Some(Provenance::of_file(path)?),
        _ => None,
    };
    let (run, shard_sizes, distribution, interval) = match options.setting {
        TrainingSetting::Federated => {
            let shards = options.partition(train, config.clients)?;
            let sizes = shards.iter().map(LabeledDataset::len).collect();
            (run_stage(config, &shards)?, sizes, Some(options.distribution), Some(config.interval))
        }
        TrainingSetting::Centralized => {
            let initial = initial_weights(config)?;
            let run = train_centralized(
                &initial,
                train,
                config.rounds,
                config.lr,
                config.batch_size,
                config.shuffle_seed_base,
            )?;
            if let (Stage::StageOne, Some(path)) = (config.stage, &config.save_to) {
                save_weights(&run.weights, path)?;
            }
            (run, vec![train.len()], None, None)
        }
    };
    let report = evaluate(
        &run.weights,
        test,
        ReportMeta {
            stage: config.stage,
            setting: options.setting,
            distribution,
            interval,
            rounds: config.rounds,
            pretrained,
        },
    )?;
    Ok(StageResult {
        run,
        report,
        shard_sizes,
    })
}

/// Stage one on Healthy vs Pneumonia, persisted to `stage_one.save_to`, then
/// stage two on Non-Covid vs Covid initialised from `stage_two.pretrained`.
pub fn run_two_stage(
    stage_one: &FedConfig,
    stage_two: &FedConfig,
    source: &DataSource,
    options: &PipelineOptions,
) -> Result<TwoStageOutcome> {
    if stage_one.stage != Stage::StageOne || stage_two.stage != Stage::StageTwo {
        return Err(Error::StageOrdering("configs must be given as (stage one, stage two)".into()));
    }
    if stage_one.save_to.is_none() {
        return Err(Error::StageOrdering("stage one has no weight file to persist to".into()));
    }
    stage_one.validate()?;
    stage_two.validate()?;
    let (data_one, data_two) = source.load_both()?;
    let (train, test) = options.split(&data_one)?;
    let one = train_and_evaluate(stage_one, options, &train, &test)?;
    let (train, test) = options.split(&data_two)?;
    let two = train_and_evaluate(stage_two, options, &train, &test)?;
    Ok(TwoStageOutcome {
        stage_one: one,
        stage_two: two,
    })
}
