use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::network::batch_loss_and_grad;
use super::{Batch, ModelWeights};
use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct EpochOutcome {
    pub weights: ModelWeights,
    /// Example-weighted mean of the pre-update batch losses.
    pub mean_loss: f64,
    pub batch_sizes: Vec<usize>,
}

fn step(weights: &ModelWeights, images: &[&Tensor<f32>], labels: &[usize], lr: f32) -> Result<(ModelWeights, f64)> {
    let (loss, grads) = batch_loss_and_grad(weights.tensors(), images, labels)?;
    Ok((weights.sgd_step(&grads, lr)?, loss))
}

/// One SGD step on the mean cross-entropy of `batch`. Returns the new weights and
/// the loss measured before the update.
pub fn train_batch(weights: &ModelWeights, batch: &Batch, lr: f32) -> Result<(ModelWeights, f64)> {
    if batch.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    let images: Vec<Tensor<f32>> = (0..batch.len()).map(|i| batch.image(i)).collect();
    let refs: Vec<&Tensor<f32>> = images.iter().collect();
    step(weights, &refs, batch.labels(), lr)
}

/// Seeded shuffle of `0..n` cut into consecutive batches of `batch_size`; the
/// final short batch is kept.
pub fn batch_plan(n: usize, batch_size: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order.chunks(batch_size.max(1)).map(<[usize]>::to_vec).collect()
}

/// One pass over `dataset` in the order given by [`batch_plan`].
pub fn train_epoch(
    weights: &ModelWeights,
    dataset: &LabeledDataset,
    lr: f32,
    batch_size: usize,
    shuffle_seed: u64,
) -> Result<EpochOutcome> {
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("cannot train on an empty dataset".into()));
    }
    if batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be at least 1".into()));
    }
    let mut current = weights.clone();
    let mut weighted_loss = 0.0;
    let mut batch_sizes = Vec::new();
    for idx in batch_plan(dataset.len(), batch_size, shuffle_seed) {
        let images: Vec<&Tensor<f32>> = idx.iter().map(|&i| &dataset.images()[i]).collect();
        let labels: Vec<usize> = idx.iter().map(|&i| dataset.labels()[i] as usize).collect();
        let (next, loss) = step(&current, &images, &labels, lr)?;
        weighted_loss += loss * idx.len() as f64;
        batch_sizes.push(idx.len());
        current = next;
    }
    Ok(EpochOutcome {
        weights: current,
        mean_loss: weighted_loss / dataset.len() as f64,
        batch_sizes,
    })
}
