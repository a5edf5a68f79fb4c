use super::{Real, Tensor};
use crate::error::{Error, Result};

/// Gradients produced by a layer's backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads<T = f32> {
    pub params: Vec<(&'static str, Tensor<T>)>,
    pub input: Tensor<T>,
}

impl<T: Real> LayerGrads<T> {
    pub fn param(&self, name: &str) -> Option<&Tensor<T>> {
        self.params.iter().find(|(n, _)| *n == name).map(|(_, t)| t)
    }
}

fn expect_rank<T: Real>(t: &Tensor<T>, rank: usize, op: &'static str, what: &'static str) -> Result<()> {
    if t.rank() != rank {
        return Err(Error::shape(
            op,
            what,
            format!("expected rank {rank}, got shape {:?}", t.shape()),
        ));
    }
    Ok(())
}

/// Valid, stride-1 cross-correlation.
///
/// `input` is `[C_in, H, W]`, `kernels` is `[C_out, C_in, kH, kW]`, `bias` is `[C_out]`.
pub fn conv2d_forward<T: Real>(
    input: &Tensor<T>,
    kernels: &Tensor<T>,
    bias: &Tensor<T>,
) -> Result<Tensor<T>> {
    const OP: &str = "conv2d_forward";
    let (c_in, h, w, c_out, kh, kw) = conv_dims(input, kernels, OP)?;
    if bias.shape() != [c_out] {
        return Err(Error::shape(
            OP,
            "bias",
            format!("expected [{c_out}], got {:?}", bias.shape()),
        ));
    }
    let (oh, ow) = (h - kh + 1, w - kw + 1);
    let x = input.data();
    let k = kernels.data();
    let mut out = vec![T::zero(); c_out * oh * ow];
    for o in 0..c_out {
        let plane = &mut out[o * oh * ow..(o + 1) * oh * ow];
        plane.fill(bias.data()[o]);
        for c in 0..c_in {
            let src = &x[c * h * w..(c + 1) * h * w];
            for i in 0..kh {
                for j in 0..kw {
                    let kv = k[((o * c_in + c) * kh + i) * kw + j];
                    for y in 0..oh {
                        let row = &src[(y + i) * w + j..(y + i) * w + j + ow];
                        let dst = &mut plane[y * ow..(y + 1) * ow];
                        for (d, &s) in dst.iter_mut().zip(row) {
                            *d += kv * s;
                        }
                    }
                }
            }
        }
    }
    Tensor::new(vec![c_out, oh, ow], out)?.ensure_finite(OP)
}

/// Gradients of [`conv2d_forward`] w.r.t. kernels (`"kernels"`), bias (`"bias"`) and input.
pub fn conv2d_backward<T: Real>(
    input: &Tensor<T>,
    kernels: &Tensor<T>,
    upstream: &Tensor<T>,
) -> Result<LayerGrads<T>> {
    const OP: &str = "conv2d_backward";
    let (c_in, h, w, c_out, kh, kw) = conv_dims(input, kernels, OP)?;
    let (oh, ow) = (h - kh + 1, w - kw + 1);
    if upstream.shape() != [c_out, oh, ow] {
        return Err(Error::shape(
            OP,
            "upstream",
            format!("expected [{c_out}, {oh}, {ow}], got {:?}", upstream.shape()),
        ));
    }
    let x = input.data();
    let k = kernels.data();
    let g = upstream.data();
    let mut dk = vec![T::zero(); k.len()];
    let mut db = vec![T::zero(); c_out];
    let mut dx = vec![T::zero(); x.len()];
    for o in 0..c_out {
        let gplane = &g[o * oh * ow..(o + 1) * oh * ow];
        let mut acc = T::zero();
        for &v in gplane {
            acc += v;
        }
        db[o] = acc;
        for c in 0..c_in {
            let src = &x[c * h * w..(c + 1) * h * w];
            let dsrc = &mut dx[c * h * w..(c + 1) * h * w];
            for i in 0..kh {
                for j in 0..kw {
                    let kidx = ((o * c_in + c) * kh + i) * kw + j;
                    let kv = k[kidx];
                    let mut acc = T::zero();
                    for y in 0..oh {
                        let off = (y + i) * w + j;
                        let grow = &gplane[y * ow..(y + 1) * ow];
                        let row = &src[off..off + ow];
                        for (&gv, &s) in grow.iter().zip(row) {
                            acc += gv * s;
                        }
                        let drow = &mut dsrc[off..off + ow];
                        for (d, &gv) in drow.iter_mut().zip(grow) {
                            *d += kv * gv;
                        }
                    }
                    dk[kidx] = acc;
                }
            }
        }
    }
    Ok(LayerGrads {
        params: vec![
            ("kernels", Tensor::new(kernels.shape().to_vec(), dk)?.ensure_finite(OP)?),
            ("bias", Tensor::new(vec![c_out], db)?.ensure_finite(OP)?),
        ],
        input: Tensor::new(input.shape().to_vec(), dx)?.ensure_finite(OP)?,
    })
}

fn conv_dims<T: Real>(
    input: &Tensor<T>,
    kernels: &Tensor<T>,
    op: &'static str,
) -> Result<(usize, usize, usize, usize, usize, usize)> {
    expect_rank(input, 3, op, "input")?;
    expect_rank(kernels, 4, op, "kernels")?;
    let (c_in, h, w) = (input.shape()[0], input.shape()[1], input.shape()[2]);
    let ks = kernels.shape();
    let (c_out, kc, kh, kw) = (ks[0], ks[1], ks[2], ks[3]);
    if kc != c_in {
        return Err(Error::shape(
            op,
            "input channels",
            format!("input has {c_in} channels, kernels expect {kc}"),
        ));
    }
    if kh > h {
        return Err(Error::shape(op, "height", format!("kernel height {kh} exceeds input height {h}")));
    }
    if kw > w {
        return Err(Error::shape(op, "width", format!("kernel width {kw} exceeds input width {w}")));
    }
    Ok((c_in, h, w, c_out, kh, kw))
}

/// Winning flat input index for every pooled cell, plus the input shape it indexes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PoolIndex {
    pub input_shape: Vec<usize>,
    pub argmax: Vec<usize>,
}

/// Disjoint 2x2 max-pooling. Ties go to the first cell in row-major scan order.
pub fn maxpool2x2_forward<T: Real>(input: &Tensor<T>) -> Result<(Tensor<T>, PoolIndex)> {
    const OP: &str = "maxpool2x2_forward";
    expect_rank(input, 3, OP, "input")?;
    let (c, h, w) = (input.shape()[0], input.shape()[1], input.shape()[2]);
    if h % 2 != 0 {
        return Err(Error::shape(OP, "height", format!("height {h} is odd")));
    }
    if w % 2 != 0 {
        return Err(Error::shape(OP, "width", format!("width {w} is odd")));
    }
    let (ph, pw) = (h / 2, w / 2);
    let x = input.data();
    let mut out = Vec::with_capacity(c * ph * pw);
    let mut argmax = Vec::with_capacity(c * ph * pw);
    for ch in 0..c {
        for y in 0..ph {
            for xo in 0..pw {
                let base = ch * h * w + 2 * y * w + 2 * xo;
                let cands = [base, base + 1, base + w, base + w + 1];
                let mut best = cands[0];
                for &idx in &cands[1..] {
                    if x[idx] > x[best] {
                        best = idx;
                    }
                }
                out.push(x[best]);
                argmax.push(best);
            }
        }
    }
    Ok((
        Tensor::new(vec![c, ph, pw], out)?,
        PoolIndex {
            input_shape: input.shape().to_vec(),
            argmax,
        },
    ))
}

/// Routes each upstream value to the input cell that won its window.
pub fn maxpool2x2_backward<T: Real>(index: &PoolIndex, upstream: &Tensor<T>) -> Result<Tensor<T>> {
    let s = &index.input_shape;
    let pooled = [s[0], s[1] / 2, s[2] / 2];
    if upstream.shape() != pooled {
        return Err(Error::shape(
            "maxpool2x2_backward",
            "upstream",
            format!("expected {pooled:?}, got {:?}", upstream.shape()),
        ));
    }
    let mut dx = Tensor::zeros(s);
    let d = dx.data_mut();
    for (&idx, &g) in index.argmax.iter().zip(upstream.data()) {
        d[idx] += g;
    }
    Ok(dx)
}

/// `weight · input + bias` with `weight` shaped `[n_out, n_in]`.
pub fn dense_forward<T: Real>(input: &Tensor<T>, weight: &Tensor<T>, bias: &Tensor<T>) -> Result<Tensor<T>> {
    const OP: &str = "dense_forward";
    let (n_out, n_in) = dense_dims(input, weight, OP)?;
    if bias.shape() != [n_out] {
        return Err(Error::shape(OP, "bias", format!("expected [{n_out}], got {:?}", bias.shape())));
    }
    let x = input.data();
    let out = weight
        .data()
        .chunks_exact(n_in)
        .zip(bias.data())
        .map(|(row, &b)| {
            let mut acc = b;
            for (&wv, &xv) in row.iter().zip(x) {
                acc += wv * xv;
            }
            acc
        })
        .collect();
    Tensor::new(vec![n_out], out)?.ensure_finite(OP)
}

pub fn dense_backward<T: Real>(
    input: &Tensor<T>,
    weight: &Tensor<T>,
    upstream: &Tensor<T>,
) -> Result<LayerGrads<T>> {
    const OP: &str = "dense_backward";
    let (n_out, n_in) = dense_dims(input, weight, OP)?;
    if upstream.shape() != [n_out] {
        return Err(Error::shape(
            OP,
            "upstream",
            format!("expected [{n_out}], got {:?}", upstream.shape()),
        ));
    }
    let x = input.data();
    let g = upstream.data();
    let mut dw = Vec::with_capacity(n_out * n_in);
    for &gv in g {
        dw.extend(x.iter().map(|&xv| gv * xv));
    }
    let mut dx = vec![T::zero(); n_in];
    for (row, &gv) in weight.data().chunks_exact(n_in).zip(g) {
        for (d, &wv) in dx.iter_mut().zip(row) {
            *d += wv * gv;
        }
    }
    Ok(LayerGrads {
        params: vec![
            ("weight", Tensor::new(vec![n_out, n_in], dw)?.ensure_finite(OP)?),
            ("bias", upstream.clone()),
        ],
        input: Tensor::new(input.shape().to_vec(), dx)?.ensure_finite(OP)?,
    })
}

fn dense_dims<T: Real>(input: &Tensor<T>, weight: &Tensor<T>, op: &'static str) -> Result<(usize, usize)> {
    expect_rank(weight, 2, op, "weight")?;
    let (n_out, n_in) = (weight.shape()[0], weight.shape()[1]);
    if input.len() != n_in || input.rank() != 1 {
        return Err(Error::shape(
            op,
            "input features",
            format!("weight expects [{n_in}], got {:?}", input.shape()),
        ));
    }
    Ok((n_out, n_in))
}

pub fn relu_forward<T: Real>(input: &Tensor<T>) -> Tensor<T> {
    input.map(|v| if v > T::zero() { v } else { T::zero() })
}

/// Passes `upstream` where `input > 0`; the derivative at exactly zero is zero.
pub fn relu_backward<T: Real>(input: &Tensor<T>, upstream: &Tensor<T>) -> Result<Tensor<T>> {
    if input.shape() != upstream.shape() {
        return Err(Error::shape(
            "relu_backward",
            "upstream",
            format!("expected {:?}, got {:?}", input.shape(), upstream.shape()),
        ));
    }
    let data = input
        .data()
        .iter()
        .zip(upstream.data())
        .map(|(&x, &g)| if x > T::zero() { g } else { T::zero() })
        .collect();
    Tensor::new(input.shape().to_vec(), data)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxOutput<T = f32> {
    pub loss: f64,
    pub grad_logits: Tensor<T>,
    pub probs: Tensor<T>,
}

/// Max-shifted softmax followed by the negative log-likelihood of `label`.
/// Evaluated in 64-bit regardless of `T`.
pub fn softmax_cross_entropy<T: Real>(logits: &Tensor<T>, label: usize) -> Result<SoftmaxOutput<T>> {
    const OP: &str = "softmax_cross_entropy";
    let k = logits.len();
    if logits.rank() != 1 || k < 2 {
        return Err(Error::shape(
            OP,
            "classes",
            format!("expected a vector of at least 2 logits, got {:?}", logits.shape()),
        ));
    }
    if label >= k {
        return Err(Error::LabelOutOfRange { label, classes: k });
    }
    if !logits.all_finite() {
        return Err(Error::NonFinite { op: OP });
    }
    let z: Vec<f64> = logits.data().iter().map(|v| v.as_f64()).collect();
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    let probs: Vec<f64> = exps.iter().map(|&e| e / sum).collect();
    let log_p = (z[label] - max) - sum.ln();
    let grad: Vec<f64> = probs
        .iter()
        .enumerate()
        .map(|(i, &p)| if i == label { p - 1.0 } else { p })
        .collect();
    Ok(SoftmaxOutput {
        loss: -log_p,
        grad_logits: Tensor::from_f64_slice(&[k], &grad)?,
        probs: Tensor::from_f64_slice(&[k], &probs)?,
    })
}
