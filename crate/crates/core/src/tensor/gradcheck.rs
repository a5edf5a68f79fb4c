//! Central-difference verification of analytic gradients.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::NamedTensors;
use crate::error::{Error, Result};

/// A scalar loss over a set of 64-bit parameters together with its analytic gradient.
pub trait Objective {
    fn loss(&self, params: &NamedTensors<f64>) -> Result<f64>;

    fn gradient(&self, params: &NamedTensors<f64>) -> Result<NamedTensors<f64>>;

    /// Loss plus a fingerprint of the piecewise-linear regime (ReLU masks, pooling
    /// winners). A check whose perturbed evaluations land in a different regime
    /// than the unperturbed point straddles a kink and is skipped.
    fn loss_with_regime(&self, params: &NamedTensors<f64>) -> Result<(f64, Option<u64>)> {
        Ok((self.loss(params)?, None))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GradCheckOptions {
    pub epsilon: f64,
    /// Lower bound on the number of compared entries (capped by the parameter count).
    pub min_samples: usize,
    pub seed: u64,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            min_samples: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    pub checked: usize,
    /// Entries skipped because the perturbation crossed a kink.
    pub skipped: usize,
    /// Parameter name and flat index of the worst entry.
    pub worst: Option<(String, usize)>,
}

/// `|a - n| / max(|a|, |n|, 1e-8)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Compares the analytic gradient of `objective` against central differences
/// `(L(w+eps) - L(w-eps)) / 2eps` on a seeded sample spread over every tensor.
/// Small tensors are checked exhaustively.
pub fn gradient_check<O: Objective + ?Sized>(
    objective: &O,
    params: &NamedTensors<f64>,
    options: GradCheckOptions,
) -> Result<GradCheckReport> {
    if !(options.epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let analytic = objective.gradient(params)?;
    let (_, base_regime) = objective.loss_with_regime(params)?;

    let total: usize = params.iter().map(|(_, t)| t.len()).sum();
    let budget = options.min_samples.min(total);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut queues: Vec<(&str, Vec<usize>)> = params
        .iter()
        .map(|(name, t)| {
            let mut order: Vec<usize> = (0..t.len()).collect();
            order.shuffle(&mut rng);
            order.reverse();
            (name, order)
        })
        .collect();

    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        checked: 0,
        skipped: 0,
        worst: None,
    };
    let eps = options.epsilon;
    // round-robin over tensors; kinked entries do not count toward the budget
    while report.checked < budget && queues.iter().any(|(_, q)| !q.is_empty()) {
        for (name, queue) in queues.iter_mut() {
            if report.checked == budget {
                break;
            }
            let Some(idx) = queue.pop() else { continue };
            let grad = analytic
                .get(name)
                .ok_or_else(|| Error::MissingGradient(name.to_string()))?;
            let mut probe = params.clone();
            let orig = params.get(name).expect("present").data()[idx];
            set_entry(&mut probe, name, idx, orig + eps);
            let (plus, plus_regime) = objective.loss_with_regime(&probe)?;
            set_entry(&mut probe, name, idx, orig - eps);
            let (minus, minus_regime) = objective.loss_with_regime(&probe)?;
            if plus_regime != base_regime || minus_regime != base_regime {
                report.skipped += 1;
                continue;
            }
            let numeric = (plus - minus) / (2.0 * eps);
            let err = relative_error(grad.data()[idx], numeric);
            if err > report.max_relative_error || report.worst.is_none() {
                report.max_relative_error = report.max_relative_error.max(err);
                report.worst = Some((name.to_string(), idx));
            }
            report.checked += 1;
        }
    }
    Ok(report)
}

fn set_entry(params: &mut NamedTensors<f64>, name: &str, idx: usize, value: f64) {
    params.get_mut(name).expect("present").data_mut()[idx] = value;
}
