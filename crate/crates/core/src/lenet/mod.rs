//! The fixed LeNet used for both stages:
//! `1x28x28 -> conv 6@5x5 -> ReLU -> pool -> conv 16@5x5 -> ReLU -> pool -> fc 120 -> ReLU -> fc 2 -> softmax`.

mod io;
mod network;
mod train;

pub use io::{decode_weights, encode_weights, load_weights, save_weights, MAGIC, VERSION};
pub use network::{batch_loss_and_grad, forward, forward_image, BatchObjective, Batch};
pub use train::{batch_plan, train_batch, train_epoch, EpochOutcome};

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::tensor::{sgd_step, NamedTensors, Tensor};

pub const IMAGE_SIDE: usize = 28;
pub const NUM_CLASSES: usize = 2;

/// Parameter names and shapes, in storage order.
pub const PARAM_SPECS: [(&str, &[usize]); 8] = [
    ("conv1.kernels", &[6, 1, 5, 5]),
    ("conv1.bias", &[6]),
    ("conv2.kernels", &[16, 6, 5, 5]),
    ("conv2.bias", &[16]),
    ("fc1.weight", &[120, 256]),
    ("fc1.bias", &[120]),
    ("fc2.weight", &[2, 120]),
    ("fc2.bias", &[2]),
];

/// The eight LeNet parameter tensors. Immutable once built; training returns new values.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelWeights {
    tensors: NamedTensors<f32>,
}

impl ModelWeights {
    /// Validates names, order, shapes and finiteness against [`PARAM_SPECS`].
    pub fn from_tensors(tensors: NamedTensors<f32>) -> Result<Self> {
        if tensors.len() != PARAM_SPECS.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} parameter tensors, got {}",
                PARAM_SPECS.len(),
                tensors.len()
            )));
        }
        for (index, ((name, t), (want, shape))) in tensors.iter().zip(PARAM_SPECS).enumerate() {
            if name != want {
                return Err(Error::UnexpectedTensor {
                    index,
                    expected: want.to_string(),
                    found: name.to_string(),
                });
            }
            if t.shape() != shape {
                return Err(Error::WeightShape {
                    name: name.to_string(),
                    expected: shape.to_vec(),
                    found: t.shape().to_vec(),
                });
            }
            if !t.all_finite() {
                return Err(Error::NonFinite { op: "model weights" });
            }
        }
        Ok(Self { tensors })
    }

    pub fn zeros() -> Self {
        let mut tensors = NamedTensors::new();
        for (name, shape) in PARAM_SPECS {
            tensors.push(name, Tensor::zeros(shape));
        }
        Self { tensors }
    }

    pub fn tensors(&self) -> &NamedTensors<f32> {
        &self.tensors
    }

    pub fn into_tensors(self) -> NamedTensors<f32> {
        self.tensors
    }

    pub fn get(&self, name: &str) -> Option<&Tensor<f32>> {
        self.tensors.get(name)
    }

    pub fn sgd_step(&self, grads: &NamedTensors<f32>, lr: f32) -> Result<Self> {
        Ok(Self {
            tensors: sgd_step(&self.tensors, grads, lr)?,
        })
    }

    /// Hex SHA-256 of the serialized weight file; equals the checksum of a file
    /// written by [`save_weights`].
    pub fn checksum(&self) -> String {
        sha256_hex(&encode_weights(self))
    }

    /// True when every value is bit-identical.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.tensors.iter().zip(other.tensors.iter()).all(|((_, a), (_, b))| {
            a.data()
                .iter()
                .zip(b.data())
                .all(|(x, y)| x.to_bits() == y.to_bits())
        })
    }
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `(fan_in, fan_out)` for a kernel `[C_out, C_in, kH, kW]` or a dense weight `[n_out, n_in]`.
fn fans(shape: &[usize]) -> (usize, usize) {
    match shape {
        [out, inp, kh, kw] => (inp * kh * kw, out * kh * kw),
        [out, inp] => (*inp, *out),
        _ => unreachable!("biases have no fan"),
    }
}

/// Glorot-uniform kernels and weights, zero biases, fully determined by `seed`.
pub fn init_weights(seed: u64) -> ModelWeights {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tensors = NamedTensors::new();
    for (name, shape) in PARAM_SPECS {
        let t = if shape.len() == 1 {
            Tensor::zeros(shape)
        } else {
            let (fan_in, fan_out) = fans(shape);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt() as f32;
            let dist = Uniform::new_inclusive(-limit, limit);
            let n = shape.iter().product();
            Tensor::new(shape.to_vec(), (0..n).map(|_| dist.sample(&mut rng)).collect())
                .expect("shape matches length")
        };
        tensors.push(name, t);
    }
    ModelWeights { tensors }
}
