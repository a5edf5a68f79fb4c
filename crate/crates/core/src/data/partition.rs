use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::error::{Error, Result};

/// Client shares of the unbalanced five-client setting.
pub const UNBALANCED_FRACTIONS: [f64; 5] = [0.30, 0.25, 0.20, 0.15, 0.10];

// guards floor() against products like 0.29 * 100 = 28.999999999999996
const FLOOR_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Balanced,
    Unbalanced,
}

impl std::str::FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balanced" => Ok(Distribution::Balanced),
            "unbalanced" => Ok(Distribution::Unbalanced),
            _ => Err(Error::Config(format!(
                "unknown distribution `{s}` (expected balanced or unbalanced)"
            ))),
        }
    }
}

impl std::fmt::Display for Distribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Distribution::Balanced => "balanced",
            Distribution::Unbalanced => "unbalanced",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionKind {
    /// Equal shares.
    Balanced,
    /// 30/25/20/15/10 percent over five clients.
    Unbalanced,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionScheme {
    pub kind: PartitionKind,
    pub clients: usize,
}

impl PartitionScheme {
    pub fn balanced(clients: usize) -> Self {
        Self {
            kind: PartitionKind::Balanced,
            clients,
        }
    }

    pub fn unbalanced() -> Self {
        Self {
            kind: PartitionKind::Unbalanced,
            clients: UNBALANCED_FRACTIONS.len(),
        }
    }

    pub fn explicit(fractions: Vec<f64>) -> Self {
        Self {
            clients: fractions.len(),
            kind: PartitionKind::Explicit(fractions),
        }
    }

    pub fn for_distribution(distribution: Distribution, clients: usize) -> Self {
        match distribution {
            Distribution::Balanced => Self::balanced(clients),
            Distribution::Unbalanced => Self {
                kind: PartitionKind::Unbalanced,
                clients,
            },
        }
    }

    /// Validated client fractions.
    pub fn fractions(&self) -> Result<Vec<f64>> {
        if self.clients == 0 {
            return Err(Error::Partition("at least one client is required".into()));
        }
        let fractions = match &self.kind {
            PartitionKind::Balanced => vec![1.0 / self.clients as f64; self.clients],
            PartitionKind::Unbalanced => UNBALANCED_FRACTIONS.to_vec(),
            PartitionKind::Explicit(f) => f.clone(),
        };
        if fractions.len() != self.clients {
            return Err(Error::Partition(format!(
                "{} clients but {} fractions",
                self.clients,
                fractions.len()
            )));
        }
        if fractions.iter().any(|&f| !(f > 0.0)) {
            return Err(Error::Partition("every fraction must be positive".into()));
        }
        let sum: f64 = fractions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Partition(format!("fractions sum to {sum}, not 1")));
        }
        Ok(fractions)
    }
}

/// Per-class stratified split: each class contributes `floor(ratio * size)`
/// examples to train, chosen by a seeded shuffle within the class. Returned index
/// lists are ascending.
pub fn split_indices(labels: &[u8], ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidArgument(format!("split ratio {ratio} must lie in (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut classes: Vec<u8> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    for class in classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < 2 {
            return Err(Error::ClassTooSmall {
                label: class,
                count: members.len(),
            });
        }
        members.shuffle(&mut rng);
        let n_train = (ratio * members.len() as f64 + FLOOR_SLACK).floor() as usize;
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split_train_test(dataset: &LabeledDataset, ratio: f64, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    let (train, test) = split_indices(dataset.labels(), ratio, seed)?;
    Ok((dataset.subset(&train), dataset.subset(&test)))
}

/// Seeded shuffle of `0..n`, then contiguous shards of `floor(f_i * n)` with the
/// leftover examples handed out one per client starting from the first.
pub fn partition_indices(n: usize, scheme: &PartitionScheme, seed: u64) -> Result<Vec<Vec<usize>>> {
    let fractions = scheme.fractions()?;
    let mut sizes: Vec<usize> = fractions
        .iter()
        .map(|f| (f * n as f64 + FLOOR_SLACK).floor() as usize)
        .collect();
    let assigned: usize = sizes.iter().sum();
    if assigned > n {
        return Err(Error::Partition(format!("shard sizes {sizes:?} exceed {n} examples")));
    }
    let remainder = n - assigned;
    if remainder > sizes.len() {
        return Err(Error::Partition(format!("{remainder} leftover examples for {} clients", sizes.len())));
    }
    for s in sizes.iter_mut().take(remainder) {
        *s += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut shards = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for size in sizes {
        shards.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(shards)
}

pub fn partition_clients(train: &LabeledDataset, scheme: &PartitionScheme, seed: u64) -> Result<Vec<LabeledDataset>> {
    Ok(partition_indices(train.len(), scheme, seed)?
        .iter()
        .map(|idx| train.subset(idx))
        .collect())
}
