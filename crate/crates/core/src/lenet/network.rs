use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;

use super::{ModelWeights, IMAGE_SIDE, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::tensor::{
    conv2d_backward, conv2d_forward, dense_backward, dense_forward, maxpool2x2_backward,
    maxpool2x2_forward, relu_backward, relu_forward, softmax_cross_entropy, NamedTensors, Objective,
    PoolIndex, Real, Tensor,
};

const IMAGE_SHAPE: [usize; 3] = [1, IMAGE_SIDE, IMAGE_SIDE];
const CONV1_OUT: [usize; 3] = [6, 24, 24];
const POOL1_OUT: [usize; 3] = [6, 12, 12];
const CONV2_OUT: [usize; 3] = [16, 8, 8];
const POOL2_OUT: [usize; 3] = [16, 4, 4];
const FLAT: usize = 256;
const HIDDEN: usize = 120;

/// A batch of `b` single-channel images `[b, 1, 28, 28]` with class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    images: Tensor<f32>,
    labels: Vec<usize>,
}

impl Batch {
    pub fn new(images: Tensor<f32>, labels: Vec<usize>) -> Result<Self> {
        let s = images.shape();
        if s.len() != 4 || s[1..] != IMAGE_SHAPE {
            return Err(Error::shape(
                "batch",
                "image",
                format!("expected [b, 1, 28, 28], got {s:?}"),
            ));
        }
        if labels.len() != s[0] {
            return Err(Error::shape(
                "batch",
                "labels",
                format!("{} images but {} labels", s[0], labels.len()),
            ));
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= NUM_CLASSES) {
            return Err(Error::LabelOutOfRange {
                label: l,
                classes: NUM_CLASSES,
            });
        }
        if images.data().iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument("pixel values must lie in [0, 1]".into()));
        }
        Ok(Self { images, labels })
    }

    /// Stacks `[1, 28, 28]` images.
    pub fn from_images(images: &[&Tensor<f32>], labels: &[usize]) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::InvalidArgument("empty batch".into()));
        }
        let mut data = Vec::with_capacity(images.len() * IMAGE_SIDE * IMAGE_SIDE);
        for img in images {
            check_image(img)?;
            data.extend_from_slice(img.data());
        }
        let tensor = Tensor::new(vec![images.len(), 1, IMAGE_SIDE, IMAGE_SIDE], data)?;
        Self::new(tensor, labels.to_vec())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn images(&self) -> &Tensor<f32> {
        &self.images
    }

    /// Copy of image `i` as `[1, 28, 28]`.
    pub fn image(&self, i: usize) -> Tensor<f32> {
        let n = IMAGE_SIDE * IMAGE_SIDE;
        Tensor::new(IMAGE_SHAPE.to_vec(), self.images.data()[i * n..(i + 1) * n].to_vec())
            .expect("image slice")
    }
}

fn check_image<T: Real>(img: &Tensor<T>) -> Result<()> {
    if img.shape() != IMAGE_SHAPE {
        return Err(Error::shape(
            "lenet forward",
            "image",
            format!("expected [1, 28, 28], got {:?}", img.shape()),
        ));
    }
    Ok(())
}

fn param<'a, T: Real>(p: &'a NamedTensors<T>, name: &str) -> Result<&'a Tensor<T>> {
    p.get(name)
        .ok_or_else(|| Error::InvalidArgument(format!("missing parameter `{name}`")))
}

fn expect_shape<T: Real>(t: &Tensor<T>, shape: &[usize], stage: &'static str) -> Result<()> {
    if t.shape() != shape {
        return Err(Error::shape(
            "lenet forward",
            stage,
            format!("expected {shape:?}, got {:?}", t.shape()),
        ));
    }
    Ok(())
}

/// Intermediate values of one forward pass, kept for backpropagation.
struct Trace<T> {
    input: Tensor<T>,
    conv1: Tensor<T>,
    pool1_index: PoolIndex,
    pool1: Tensor<T>,
    conv2: Tensor<T>,
    pool2_index: PoolIndex,
    flat: Tensor<T>,
    fc1: Tensor<T>,
    hidden: Tensor<T>,
    logits: Tensor<T>,
}

impl<T: Real> Trace<T> {
    fn regime(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for t in [&self.conv1, &self.conv2, &self.fc1] {
            for v in t.data() {
                (*v > T::zero()).hash(&mut h);
            }
        }
        self.pool1_index.hash(&mut h);
        self.pool2_index.hash(&mut h);
        h.finish()
    }
}

fn forward_trace<T: Real>(p: &NamedTensors<T>, image: &Tensor<T>) -> Result<Trace<T>> {
    check_image(image)?;
    let conv1 = conv2d_forward(image, param(p, "conv1.kernels")?, param(p, "conv1.bias")?)?;
    expect_shape(&conv1, &CONV1_OUT, "conv1")?;
    let (pool1, pool1_index) = maxpool2x2_forward(&relu_forward(&conv1))?;
    expect_shape(&pool1, &POOL1_OUT, "pool1")?;
    let conv2 = conv2d_forward(&pool1, param(p, "conv2.kernels")?, param(p, "conv2.bias")?)?;
    expect_shape(&conv2, &CONV2_OUT, "conv2")?;
    let (pool2, pool2_index) = maxpool2x2_forward(&relu_forward(&conv2))?;
    expect_shape(&pool2, &POOL2_OUT, "pool2")?;
    let flat = pool2.reshape(&[FLAT])?;
    let fc1 = dense_forward(&flat, param(p, "fc1.weight")?, param(p, "fc1.bias")?)?;
    expect_shape(&fc1, &[HIDDEN], "fc1")?;
    let hidden = relu_forward(&fc1);
    let logits = dense_forward(&hidden, param(p, "fc2.weight")?, param(p, "fc2.bias")?)?;
    expect_shape(&logits, &[NUM_CLASSES], "fc2")?;
    Ok(Trace {
        input: image.clone(),
        conv1,
        pool1_index,
        pool1,
        conv2,
        pool2_index,
        flat,
        fc1,
        hidden,
        logits,
    })
}

/// Adds the parameter gradients of one example into `acc`.
fn backward_into<T: Real>(
    p: &NamedTensors<T>,
    trace: &Trace<T>,
    grad_logits: &Tensor<T>,
    acc: &mut NamedTensors<T>,
) -> Result<()> {
    let fc2 = dense_backward(&trace.hidden, param(p, "fc2.weight")?, grad_logits)?;
    let d_fc1 = relu_backward(&trace.fc1, &fc2.input)?;
    let fc1 = dense_backward(&trace.flat, param(p, "fc1.weight")?, &d_fc1)?;
    let d_pool2 = fc1.input.clone().reshape(&POOL2_OUT)?;
    let d_relu2 = maxpool2x2_backward(&trace.pool2_index, &d_pool2)?;
    let d_conv2 = relu_backward(&trace.conv2, &d_relu2)?;
    let conv2 = conv2d_backward(&trace.pool1, param(p, "conv2.kernels")?, &d_conv2)?;
    let d_relu1 = maxpool2x2_backward(&trace.pool1_index, &conv2.input)?;
    let d_conv1 = relu_backward(&trace.conv1, &d_relu1)?;
    let conv1 = conv2d_backward(&trace.input, param(p, "conv1.kernels")?, &d_conv1)?;

    let pieces = [
        ("conv1.kernels", conv1.param("kernels")),
        ("conv1.bias", conv1.param("bias")),
        ("conv2.kernels", conv2.param("kernels")),
        ("conv2.bias", conv2.param("bias")),
        ("fc1.weight", fc1.param("weight")),
        ("fc1.bias", fc1.param("bias")),
        ("fc2.weight", fc2.param("weight")),
        ("fc2.bias", fc2.param("bias")),
    ];
    for (name, g) in pieces {
        let g = g.expect("layer emits this gradient");
        let dst = acc
            .get_mut(name)
            .ok_or_else(|| Error::MissingGradient(name.to_string()))?;
        for (d, &v) in dst.data_mut().iter_mut().zip(g.data()) {
            *d += v;
        }
    }
    Ok(())
}

/// Class probabilities `[2]` for a single `[1, 28, 28]` image.
pub fn forward_image<T: Real>(params: &NamedTensors<T>, image: &Tensor<T>) -> Result<Tensor<T>> {
    let trace = forward_trace(params, image)?;
    softmax_probs(&trace.logits)
}

fn softmax_probs<T: Real>(logits: &Tensor<T>) -> Result<Tensor<T>> {
    Ok(softmax_cross_entropy(logits, 0)?.probs)
}

/// Probabilities `[b, 2]`; rows come back in batch order.
pub fn forward(weights: &ModelWeights, batch: &Batch) -> Result<Tensor<f32>> {
    let rows: Vec<Tensor<f32>> = (0..batch.len())
        .into_par_iter()
        .map(|i| forward_image(weights.tensors(), &batch.image(i)))
        .collect::<Result<_>>()?;
    let data = rows.into_iter().flat_map(Tensor::into_data).collect();
    Tensor::new(vec![batch.len(), NUM_CLASSES], data)
}

/// Mean cross-entropy over the examples (accumulated in 64-bit) and the mean
/// parameter gradient. Examples are summed in the given order.
pub fn batch_loss_and_grad<T: Real>(
    params: &NamedTensors<T>,
    images: &[&Tensor<T>],
    labels: &[usize],
) -> Result<(f64, NamedTensors<T>)> {
    if images.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    if images.len() != labels.len() {
        return Err(Error::shape(
            "batch_loss_and_grad",
            "labels",
            format!("{} images but {} labels", images.len(), labels.len()),
        ));
    }
    let mut acc = params.zeros_like();
    let mut total = 0.0f64;
    for (img, &label) in images.iter().zip(labels) {
        let trace = forward_trace(params, img)?;
        let sm = softmax_cross_entropy(&trace.logits, label)?;
        total += sm.loss;
        backward_into(params, &trace, &sm.grad_logits, &mut acc)?;
    }
    let n = T::of_f64(images.len() as f64);
    for (_, t) in acc.iter_mut() {
        for v in t.data_mut() {
            *v = *v / n;
        }
    }
    Ok((total / images.len() as f64, acc))
}

/// Mean batch loss of LeNet as a gradient-check objective, evaluated in 64-bit.
pub struct BatchObjective {
    pub images: Vec<Tensor<f64>>,
    pub labels: Vec<usize>,
}

impl BatchObjective {
    pub fn from_batch(batch: &Batch) -> Self {
        Self {
            images: (0..batch.len()).map(|i| batch.image(i).cast()).collect(),
            labels: batch.labels().to_vec(),
        }
    }
}

impl Objective for BatchObjective {
    fn loss(&self, params: &NamedTensors<f64>) -> Result<f64> {
        Ok(self.loss_with_regime(params)?.0)
    }

    fn gradient(&self, params: &NamedTensors<f64>) -> Result<NamedTensors<f64>> {
        let refs: Vec<&Tensor<f64>> = self.images.iter().collect();
        Ok(batch_loss_and_grad(params, &refs, &self.labels)?.1)
    }

    fn loss_with_regime(&self, params: &NamedTensors<f64>) -> Result<(f64, Option<u64>)> {
        let mut h = DefaultHasher::new();
        let mut total = 0.0;
        for (img, &label) in self.images.iter().zip(&self.labels) {
            let trace = forward_trace(params, img)?;
            trace.regime().hash(&mut h);
            total += softmax_cross_entropy(&trace.logits, label)?.loss;
        }
        Ok((total / self.images.len() as f64, Some(h.finish())))
    }
}
