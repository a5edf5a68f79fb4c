//! The federated round loop: broadcast, local training, size-weighted averaging.
//!
//! Server-side entry points only ever see [`ModelWeights`] and shard sizes; the
//! client datasets stay inside [`train_client`].

mod pipeline;

pub use pipeline::{run_two_stage, train_and_evaluate, DataSource, PipelineOptions, StageResult, TwoStageOutcome};

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{LabeledDataset, Stage};
use crate::error::{Error, Result};
use crate::lenet::{init_weights, load_weights, save_weights, train_epoch, ModelWeights};
use crate::tensor::{NamedTensors, Tensor};

#[derive(Debug, Clone, PartialEq)]
pub struct FedConfig {
    /// Total training rounds.
    pub rounds: usize,
    /// Local epochs per round (the federated averaging interval).
    pub interval: usize,
    pub clients: usize,
    pub stage: Stage,
    pub lr: f32,
    pub batch_size: usize,
    pub init_seed: u64,
    pub shuffle_seed_base: u64,
    /// Stage-one weights; required for stage two.
    pub pretrained: Option<PathBuf>,
    /// Where stage one persists its final weights.
    pub save_to: Option<PathBuf>,
    /// Train the clients of a round on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl FedConfig {
    pub fn new(stage: Stage) -> Self {
        Self {
            rounds: match stage {
                Stage::StageOne => 20,
                Stage::StageTwo => 10,
            },
            interval: 1,
            clients: 5,
            stage,
            lr: 0.001,
            batch_size: 32,
            init_seed: 0,
            shuffle_seed_base: 0,
            pretrained: None,
            save_to: None,
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds < 1 {
            return Err(Error::Config("rounds must be at least 1".into()));
        }
        if self.interval < 1 {
            return Err(Error::Config("averaging interval must be at least 1".into()));
        }
        if self.clients < 1 {
            return Err(Error::Config("at least one client is required".into()));
        }
        if !(self.lr > 0.0) || !self.lr.is_finite() {
            return Err(Error::Config(format!("learning rate must be positive, got {}", self.lr)));
        }
        if self.batch_size < 1 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.stage == Stage::StageTwo && self.pretrained.is_none() {
            return Err(Error::StageOrdering("no pretrained weight file given for stage two".into()));
        }
        Ok(())
    }
}

/// History entry for one broadcast/train/aggregate cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    /// Mean local training loss of each client, in client order.
    pub client_losses: Vec<f64>,
    /// SHA-256 of the aggregated weights in weight-file encoding.
    pub checksum: String,
    /// Wall-clock time; kept out of serialized history so reruns compare byte-for-byte.
    #[serde(skip)]
    pub duration: Duration,
}

impl RoundRecord {
    pub fn mean_client_loss(&self) -> f64 {
        self.client_losses.iter().sum::<f64>() / self.client_losses.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct StageRun {
    pub initial: ModelWeights,
    pub weights: ModelWeights,
    pub history: Vec<RoundRecord>,
}

#[derive(Debug, Clone)]
pub struct LocalUpdate {
    pub weights: ModelWeights,
    /// Example-weighted mean training loss over all local epochs.
    pub mean_loss: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable mix of a base seed with a tag.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    splitmix64(base ^ splitmix64(tag))
}

/// Shuffle seed of client `client` (0-based) in round `round` (1-based):
/// `base XOR hash(round, client)`. Independent of execution order.
pub fn client_seed(base: u64, round: usize, client: usize) -> u64 {
    base ^ splitmix64(splitmix64(round as u64) ^ client as u64)
}

/// Seed of local epoch `epoch` (1-based) for a client seeded with `seed`; every
/// local epoch reshuffles.
pub fn local_epoch_seed(seed: u64, epoch: usize) -> u64 {
    if epoch == 1 {
        seed
    } else {
        derive_seed(seed, epoch as u64)
    }
}

/// Size-weighted mean of client weights, accumulated in 64-bit in client order.
pub fn federated_average(client_weights: &[ModelWeights], client_sizes: &[usize]) -> Result<ModelWeights> {
    if client_weights.is_empty() {
        return Err(Error::InvalidArgument("no client weights to average".into()));
    }
    if client_weights.len() != client_sizes.len() {
        return Err(Error::InvalidArgument(format!(
            "{} client weights but {} sizes",
            client_weights.len(),
            client_sizes.len()
        )));
    }
    if let Some(i) = client_sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyShard(i));
    }
    let total: f64 = client_sizes.iter().map(|&s| s as f64).sum();
    let reference = client_weights[0].tensors();
    let mut out = NamedTensors::new();
    for (name, t0) in reference.iter() {
        let mut acc = vec![0.0f64; t0.len()];
        for (i, (w, &size)) in client_weights.iter().zip(client_sizes).enumerate() {
            let t = w.get(name).ok_or_else(|| Error::MissingGradient(name.to_string()))?;
            if t.shape() != t0.shape() {
                return Err(Error::shape(
                    "federated_average",
                    "parameter",
                    format!("client {i} `{name}` is {:?}, client 0 has {:?}", t.shape(), t0.shape()),
                ));
            }
            let s = size as f64;
            for (a, &v) in acc.iter_mut().zip(t.data()) {
                *a += s * v as f64;
            }
        }
        let data = acc.into_iter().map(|a| (a / total) as f32).collect();
        out.push(name, Tensor::new(t0.shape().to_vec(), data)?);
    }
    ModelWeights::from_tensors(out)
}

/// Local training: `interval` epochs over the client's own data starting from
/// a copy of the global weights.
pub fn train_client(
    global: &ModelWeights,
    data: &LabeledDataset,
    interval: usize,
    lr: f32,
    batch_size: usize,
    shuffle_seed: u64,
) -> Result<LocalUpdate> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("client holds no data".into()));
    }
    let mut weights = global.clone();
    let mut loss_sum = 0.0;
    for epoch in 1..=interval {
        let out = train_epoch(&weights, data, lr, batch_size, local_epoch_seed(shuffle_seed, epoch))?;
        loss_sum += out.mean_loss;
        weights = out.weights;
    }
    Ok(LocalUpdate {
        weights,
        mean_loss: loss_sum / interval as f64,
    })
}

/// Initial global weights: fresh Glorot init for stage one, the stage-one file for stage two.
pub fn initial_weights(config: &FedConfig) -> Result<ModelWeights> {
    match config.stage {
        Stage::StageOne => Ok(init_weights(config.init_seed)),
        Stage::StageTwo => {
            let path = config
                .pretrained
                .as_ref()
                .ok_or_else(|| Error::StageOrdering("no pretrained weight file given for stage two".into()))?;
            load_weights(path).map_err(|e| match e {
                Error::WeightFileMissing(p) => Error::StageOrdering(format!("{} does not exist", p.display())),
                other => other,
            })
        }
    }
}

/// Runs all rounds of one stage over the given client shards.
pub fn run_stage(config: &FedConfig, shards: &[LabeledDataset]) -> Result<StageRun> {
    config.validate()?;
    if shards.len() != config.clients {
        return Err(Error::ShardCount {
            expected: config.clients,
            found: shards.len(),
        });
    }
    if let Some(i) = shards.iter().position(LabeledDataset::is_empty) {
        return Err(Error::EmptyShard(i));
    }
    let sizes: Vec<usize> = shards.iter().map(LabeledDataset::len).collect();
    let initial = initial_weights(config)?;
    let mut global = initial.clone();
    let mut history = Vec::with_capacity(config.rounds);
    for round in 1..=config.rounds {
        let started = Instant::now();
        let train = |(i, shard): (usize, &LabeledDataset)| {
            train_client(
                &global,
                shard,
                config.interval,
                config.lr,
                config.batch_size,
                client_seed(config.shuffle_seed_base, round, i),
            )
        };
        let updates: Vec<LocalUpdate> = if config.parallel {
            shards.par_iter().enumerate().map(train).collect::<Result<_>>()?
        } else {
            shards.iter().enumerate().map(train).collect::<Result<_>>()?
        };
        let client_losses = updates.iter().map(|u| u.mean_loss).collect();
        let locals: Vec<ModelWeights> = updates.into_iter().map(|u| u.weights).collect();
        global = federated_average(&locals, &sizes)?;
        let record = RoundRecord {
            round,
            client_losses,
            checksum: global.checksum(),
            duration: started.elapsed(),
        };
        log::info!(
            "{} round {round}/{}: mean client loss {:.5} ({:.2?})",
            config.stage,
            config.rounds,
            record.mean_client_loss(),
            record.duration
        );
        history.push(record);
    }
    if config.stage == Stage::StageOne {
        if let Some(path) = &config.save_to {
            save_weights(&global, path)?;
        }
    }
    Ok(StageRun {
        initial,
        weights: global,
        history,
    })
}

/// Single-site baseline: `epochs` passes over the whole training set, seeded
/// exactly like client 0 of a one-client federated run with interval 1.
pub fn train_centralized(
    initial: &ModelWeights,
    data: &LabeledDataset,
    epochs: usize,
    lr: f32,
    batch_size: usize,
    shuffle_seed_base: u64,
) -> Result<StageRun> {
    if epochs < 1 {
        return Err(Error::Config("epochs must be at least 1".into()));
    }
    let mut weights = initial.clone();
    let mut history = Vec::with_capacity(epochs);
    for epoch in 1..=epochs {
        let started = Instant::now();
        let seed = local_epoch_seed(client_seed(shuffle_seed_base, epoch, 0), 1);
        let out = train_epoch(&weights, data, lr, batch_size, seed)?;
        weights = out.weights;
        history.push(RoundRecord {
            round: epoch,
            client_losses: vec![out.mean_loss],
            checksum: weights.checksum(),
            duration: started.elapsed(),
        });
    }
    Ok(StageRun {
        initial: initial.clone(),
        weights,
        history,
    })
}
