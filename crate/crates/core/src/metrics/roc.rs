use serde::{Deserialize, Serialize};

use super::check_scores;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

fn class_totals(labels: &[u8]) -> Result<(u64, u64)> {
    let pos = labels.iter().filter(|&&l| l == 1).count() as u64;
    let neg = labels.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok((pos, neg))
}

/// Sweeps the threshold from +inf down through every distinct score. Tied
/// scores move together, so each distinct score adds exactly one point.
pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<Vec<RocPoint>> {
    check_scores(scores, labels)?;
    let (pos, neg) = class_totals(labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
        });
    }
    Ok(points)
}

/// Trapezoidal area under a ROC curve.
pub fn auc(points: &[RocPoint]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::MalformedRoc(format!("{} points", points.len())));
    }
    let first = points[0];
    let last = points[points.len() - 1];
    if first != (RocPoint { fpr: 0.0, tpr: 0.0 }) || last != (RocPoint { fpr: 1.0, tpr: 1.0 }) {
        return Err(Error::MalformedRoc(format!(
            "curve must run from (0,0) to (1,1), got ({},{})..({},{})",
            first.fpr, first.tpr, last.fpr, last.tpr
        )));
    }
    let mut area = 0.0;
    for (k, w) in points.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if !(b.fpr >= a.fpr && b.tpr >= a.tpr) || b.fpr > 1.0 || b.tpr > 1.0 {
            return Err(Error::MalformedRoc(format!("point {} decreases or leaves the unit square", k + 1)));
        }
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    Ok(area)
}

/// Mann-Whitney form: fraction of (positive, negative) pairs where the positive
/// scores higher, ties counting one half.
pub fn auc_pair_counting(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_scores(scores, labels)?;
    let (pos, neg) = class_totals(labels)?;
    let mut twice_wins = 0u64;
    for (&sp, _) in scores.iter().zip(labels).filter(|(_, &l)| l == 1) {
        for (&sn, _) in scores.iter().zip(labels).filter(|(_, &l)| l == 0) {
            twice_wins += if sp > sn {
                2
            } else if sp == sn {
                1
            } else {
                0
            };
        }
    }
    Ok(twice_wins as f64 / (2 * pos * neg) as f64)
}
