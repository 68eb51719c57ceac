//! Precision-recall curves and the area under them.

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub recall: f64,
    pub precision: f64,
}

/// Operating points ordered by descending threshold, hence non-decreasing recall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
    pub auc: f64,
}

/// One point per distinct score: predicting positive for every score at or
/// above the threshold. Tied scores enter together. With `weights`, counts
/// become weight sums.
pub fn pr_curve(scores: &[f64], labels: &[bool], weights: Option<&[f64]>) -> Result<PrCurve> {
    if scores.len() != labels.len() || weights.is_some_and(|w| w.len() != scores.len()) {
        return Err(Error::InvalidArgument("scores, labels and weights must have equal length".into()));
    }
    if let Some(s) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidArgument(format!("score {s} is not finite")));
    }
    let weight = |i: usize| weights.map_or(1.0, |w| w[i]);
    let total_pos: f64 = (0..scores.len()).filter(|&i| labels[i]).map(weight).sum();
    if !(total_pos > 0.0) {
        return Err(Error::NoPositives);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));

    let mut points = Vec::new();
    let (mut tp, mut fp) = (0.0, 0.0);
    let mut k = 0;
    while k < order.len() {
        let threshold = scores[order[k]];
        while k < order.len() && scores[order[k]] == threshold {
            let i = order[k];
            if labels[i] {
                tp += weight(i);
            } else {
                fp += weight(i);
            }
            k += 1;
        }
        let predicted = tp + fp;
        points.push(PrPoint {
            threshold,
            recall: tp / total_pos,
            precision: if predicted > 0.0 { tp / predicted } else { 0.0 },
        });
    }
    let auc = auc_pr(&points);
    Ok(PrCurve { points, auc })
}

/// Trapezoidal area over recall, with the first point's precision carried
/// back to recall 0.
pub fn auc_pr(points: &[PrPoint]) -> f64 {
    let Some(first) = points.first() else {
        return 0.0;
    };
    let mut area = first.recall * first.precision;
    for pair in points.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        area += (b.recall - a.recall) * (a.precision + b.precision) / 2.0;
    }
    area
}

impl PrCurve {
    /// CSV `threshold,recall,precision`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["threshold", "recall", "precision"])?;
        for p in &self.points {
            w.write_record([p.threshold.to_string(), p.recall.to_string(), p.precision.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<curve>", e))?;
        Ok(())
    }
}
