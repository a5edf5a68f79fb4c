use super::{NamedTensors, Real};
use crate::error::{Error, Result};

/// Plain SGD: `w <- w - lr * g` for every parameter, matched by name.
pub fn sgd_step<T: Real>(
    weights: &NamedTensors<T>,
    grads: &NamedTensors<T>,
    lr: T,
) -> Result<NamedTensors<T>> {
    let mut next = weights.clone();
    for (name, w) in next.iter_mut() {
        let g = grads
            .get(name)
            .ok_or_else(|| Error::MissingGradient(name.to_string()))?;
        if g.shape() != w.shape() {
            return Err(Error::shape(
                "sgd_step",
                "gradient",
                format!("`{name}`: weight {:?}, gradient {:?}", w.shape(), g.shape()),
            ));
        }
        for (wv, &gv) in w.data_mut().iter_mut().zip(g.data()) {
            *wv = *wv - lr * gv;
        }
        if !w.all_finite() {
            return Err(Error::NonFinite { op: "sgd_step" });
        }
    }
    Ok(next)
}
