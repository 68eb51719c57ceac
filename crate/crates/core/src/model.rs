//! Sample-weighted logistic regression and candidate ranking.
//!
//! Training maximizes the unregularized weighted log-likelihood
//! `sum_i w_i [y_i ln p_i + (1 - y_i) ln(1 - p_i)]` with damped Newton steps on
//! internally standardized features. Coefficients are reported on the
//! original feature scale.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Feature values keyed by parallel names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Self {
        assert_eq!(names.len(), values.len());
        FeatureVector { names, values }
    }
}

/// A training or evaluation matrix: one row per example.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Design {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
    pub weights: Vec<f64>,
    /// Human-readable example names used in error messages.
    pub ids: Vec<String>,
}

impl Design {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn check_finite(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature {
                    feature: self.feature_names[j].clone(),
                    example: self.ids.get(i).cloned().unwrap_or_else(|| format!("#{i}")),
                });
            }
        }
        Ok(())
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Design {
        assert_eq!(weights.len(), self.len());
        Design {
            weights,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Stop once the max-norm of the log-likelihood gradient falls to this
    /// times the total sample weight.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Largest absolute standardized coefficient before the data are treated
    /// as separable and training stops.
    pub coefficient_cap: f64,
    /// Recorded for provenance; training itself draws no random numbers.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            tolerance: 1e-8,
            max_iterations: 200,
            coefficient_cap: 100.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub feature_names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub config: TrainConfig,
    pub iterations: usize,
    pub converged: bool,
    pub separated: bool,
    pub log_likelihood: f64,
}

impl Model {
    pub fn linear_predictor(&self, values: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(values).map(|(c, x)| c * x).sum::<f64>()
    }

    /// Probability for values given in `feature_names` order.
    pub fn predict_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.coefficients.len());
        sigmoid(self.linear_predictor(values))
    }

    pub fn predict(&self, features: &FeatureVector) -> Result<f64> {
        if features.names != self.feature_names {
            return Err(Error::FeatureMismatch {
                expected: self.feature_names.clone(),
                found: features.names.clone(),
            });
        }
        Ok(self.predict_values(&features.values))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let model: Model = serde_json::from_str(json)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                what: "model",
                found: model.format_version,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        if model.coefficients.len() != model.feature_names.len() {
            return Err(Error::InvalidArgument(format!(
                "model has {} coefficients for {} features",
                model.coefficients.len(),
                model.feature_names.len()
            )));
        }
        Ok(model)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn linear(intercept: f64, coefficients: &[f64], row: &[f64]) -> f64 {
    intercept + coefficients.iter().zip(row).map(|(c, x)| c * x).sum::<f64>()
}

/// Weighted log-likelihood of `design` under the given parameters.
pub fn weighted_log_likelihood(intercept: f64, coefficients: &[f64], design: &Design) -> f64 {
    design
        .rows
        .iter()
        .zip(&design.labels)
        .zip(&design.weights)
        .map(|((row, &y), &w)| {
            let z = linear(intercept, coefficients, row);
            // y ln p + (1 - y) ln(1 - p) = y z - ln(1 + e^z)
            w * (if y { z } else { 0.0 } - softplus(z))
        })
        .sum()
}

/// Gradient of [`weighted_log_likelihood`], intercept first.
pub fn log_likelihood_gradient(intercept: f64, coefficients: &[f64], design: &Design) -> Vec<f64> {
    let mut grad = vec![0.0; coefficients.len() + 1];
    for ((row, &y), &w) in design.rows.iter().zip(&design.labels).zip(&design.weights) {
        let residual = w * (if y { 1.0 } else { 0.0 } - sigmoid(linear(intercept, coefficients, row)));
        grad[0] += residual;
        for (g, x) in grad[1..].iter_mut().zip(row) {
            *g += residual * x;
        }
    }
    grad
}

struct Standardized {
    means: Vec<f64>,
    scales: Vec<f64>,
    /// Rows with a leading 1 for the intercept.
    rows: Vec<Vec<f64>>,
}

fn standardize(design: &Design) -> Standardized {
    let p = design.feature_names.len();
    let n = design.len() as f64;
    let mut means = vec![0.0; p];
    for row in &design.rows {
        for (m, x) in means.iter_mut().zip(row) {
            *m += x;
        }
    }
    means.iter_mut().for_each(|m| *m /= n);
    let mut scales = vec![0.0; p];
    for row in &design.rows {
        for ((s, x), m) in scales.iter_mut().zip(row).zip(&means) {
            *s += (x - m) * (x - m);
        }
    }
    for s in &mut scales {
        *s = (*s / n).sqrt();
        // constant columns carry no information; they stay at zero
        if !(*s > 1e-12) {
            *s = 0.0;
        }
    }
    let rows = design
        .rows
        .iter()
        .map(|row| {
            std::iter::once(1.0)
                .chain(row.iter().zip(&means).zip(&scales).map(|((x, m), s)| if *s > 0.0 { (x - m) / s } else { 0.0 }))
                .collect()
        })
        .collect();
    Standardized { means, scales, rows }
}

/// Solves `a x = b` for symmetric positive definite `a` via Cholesky; `None`
/// when a pivot is not positive.
fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > 0.0) {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    Some(x)
}

fn ll_std(beta: &[f64], rows: &[Vec<f64>], design: &Design) -> f64 {
    rows.iter()
        .zip(&design.labels)
        .zip(&design.weights)
        .map(|((row, &y), &w)| {
            let z: f64 = beta.iter().zip(row).map(|(b, x)| b * x).sum();
            w * (if y { z } else { 0.0 } - softplus(z))
        })
        .sum()
}

/// Fits a weighted logistic regression on every column of `design`.
pub fn train(design: &Design, config: &TrainConfig) -> Result<Model> {
    if design.labels.len() != design.len() || design.weights.len() != design.len() {
        return Err(Error::InvalidArgument("labels and weights must match the row count".into()));
    }
    if !design.labels.iter().any(|&y| y) || design.labels.iter().all(|&y| y) {
        return Err(Error::SingleClass);
    }
    if design.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidArgument("sample weights must be finite and non-negative".into()));
    }
    design.check_finite()?;

    let std = standardize(design);
    let dim = design.feature_names.len() + 1;
    let mut beta = vec![0.0; dim];
    let mut ll = ll_std(&beta, &std.rows, design);
    let mut iterations = 0;
    let mut converged = false;
    let mut separated = false;
    let tolerance = config.tolerance * design.weights.iter().sum::<f64>().max(1.0);

    while iterations < config.max_iterations {
        let mut grad = vec![0.0; dim];
        let mut hess = vec![vec![0.0; dim]; dim];
        for ((row, &y), &w) in std.rows.iter().zip(&design.labels).zip(&design.weights) {
            let z: f64 = beta.iter().zip(row).map(|(b, x)| b * x).sum();
            let p = sigmoid(z);
            let r = w * (if y { 1.0 } else { 0.0 } - p);
            let h = w * p * (1.0 - p);
            for i in 0..dim {
                grad[i] += r * row[i];
                if row[i] == 0.0 {
                    continue;
                }
                for j in 0..=i {
                    hess[i][j] += h * row[i] * row[j];
                }
            }
        }
        if grad.iter().all(|g| g.abs() <= tolerance) {
            converged = true;
            break;
        }
        iterations += 1;

        let lower = hess.clone();
        for (j, row) in hess.iter_mut().enumerate() {
            for (i, v) in row.iter_mut().enumerate().skip(j + 1) {
                *v = lower[i][j];
            }
        }
        // a small relative ridge keeps collinear or constant columns solvable
        // without moving the optimum, since it only rescales the step
        let scale = hess.iter().enumerate().map(|(i, r)| r[i]).fold(0.0, f64::max).max(1e-300);
        let mut damping = 1e-10 * scale;
        let step = loop {
            let damped: Vec<Vec<f64>> = hess
                .iter()
                .enumerate()
                .map(|(i, r)| r.iter().enumerate().map(|(j, v)| if i == j { v + damping } else { *v }).collect())
                .collect();
            if let Some(step) = cholesky_solve(&damped, &grad) {
                break step;
            }
            damping *= 100.0;
        };

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b + t * s).collect();
            let trial_ll = ll_std(&trial, &std.rows, design);
            if trial_ll >= ll {
                accepted = Some((trial, trial_ll));
                break;
            }
            t *= 0.5;
        }
        let Some((next, next_ll)) = accepted else {
            // no ascent direction left at working precision
            converged = grad.iter().all(|g| g.abs() <= tolerance.sqrt());
            break;
        };
        let stalled = next == beta;
        beta = next;
        ll = next_ll;
        if beta.iter().skip(1).any(|b| b.abs() > config.coefficient_cap) {
            log::warn!(
                "coefficient exceeded the cap of {} after {iterations} iterations; data look separable",
                config.coefficient_cap
            );
            separated = true;
            break;
        }
        if stalled {
            converged = grad.iter().all(|g| g.abs() <= tolerance.sqrt());
            break;
        }
    }
    if !converged && !separated {
        log::warn!("logistic regression stopped after {iterations} iterations without reaching the gradient tolerance");
    }

    let mut intercept = beta[0];
    let mut coefficients = vec![0.0; dim - 1];
    for j in 0..dim - 1 {
        if std.scales[j] > 0.0 {
            coefficients[j] = beta[j + 1] / std.scales[j];
            intercept -= coefficients[j] * std.means[j];
        }
    }
    let log_likelihood = weighted_log_likelihood(intercept, &coefficients, design);
    Ok(Model {
        format_version: MODEL_FORMAT_VERSION,
        name: None,
        feature_names: design.feature_names.clone(),
        coefficients,
        intercept,
        config: config.clone(),
        iterations,
        converged,
        separated,
        log_likelihood,
    })
}

/// Candidates by descending probability, ties in lexicographic phrase order.
pub fn rank(model: &Model, candidates: &[(String, FeatureVector)]) -> Result<Vec<(String, f64)>> {
    let mut scored = candidates
        .iter()
        .map(|(phrase, fv)| Ok((phrase.clone(), model.predict(fv)?)))
        .collect::<Result<Vec<_>>>()?;
    sort_ranked(&mut scored);
    Ok(scored)
}

pub fn sort_ranked(scored: &mut [(String, f64)]) {
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(rows: Vec<Vec<f64>>, labels: Vec<bool>, weights: Vec<f64>) -> Design {
        let p = rows.first().map_or(0, Vec::len);
        Design {
            feature_names: (0..p).map(|j| format!("x{j}")).collect(),
            ids: (0..rows.len()).map(|i| format!("row{i}")).collect(),
            rows,
            labels,
            weights,
        }
    }

    #[test]
    fn intercept_only_optimum() {
        let d = design(
            vec![vec![0.0]; 5],
            vec![true, false, false, true, false],
            vec![1.0, 0.1, 0.1, 1.0, 0.1],
        );
        let m = train(&d, &TrainConfig::default()).unwrap();
        assert!(m.converged);
        let expected = 2.0 / 2.3;
        assert!((m.predict_values(&[0.0]) - expected).abs() < 1e-10);
        assert_eq!(m.coefficients, [0.0]);
    }

    #[test]
    fn separable_slope_is_positive() {
        let d = design(
            vec![vec![1.0], vec![1.0], vec![0.0], vec![0.0]],
            vec![true, true, false, false],
            vec![1.0; 4],
        );
        let m = train(&d, &TrainConfig::default()).unwrap();
        assert!(m.coefficients[0] > 0.0);
        assert!(m.predict_values(&[1.0]) > 0.99);
    }

    #[test]
    fn predict_checks_names() {
        let m = Model {
            format_version: MODEL_FORMAT_VERSION,
            name: None,
            feature_names: vec!["a".into()],
            coefficients: vec![0.0],
            intercept: 0.0,
            config: TrainConfig::default(),
            iterations: 0,
            converged: true,
            separated: false,
            log_likelihood: 0.0,
        };
        assert_eq!(m.predict(&FeatureVector::new(vec!["a".into()], vec![3.0])).unwrap(), 0.5);
        assert!(matches!(
            m.predict(&FeatureVector::new(vec!["b".into()], vec![3.0])),
            Err(Error::FeatureMismatch { .. })
        ));
        let saturated = Model { intercept: 20.0, ..m.clone() };
        assert!(saturated.predict_values(&[0.0]) >= 0.9999999);
        let back = Model::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rank_ties_are_lexicographic() {
        let m = Model {
            format_version: MODEL_FORMAT_VERSION,
            name: None,
            feature_names: vec!["a".into()],
            coefficients: vec![1.0],
            intercept: 0.0,
            config: TrainConfig::default(),
            iterations: 0,
            converged: true,
            separated: false,
            log_likelihood: 0.0,
        };
        let fv = |v| FeatureVector::new(vec!["a".into()], vec![v]);
        let ranked = rank(
            &m,
            &[("zeta".into(), fv(1.0)), ("alpha".into(), fv(1.0)), ("mid".into(), fv(2.0))],
        )
        .unwrap();
        let order: Vec<&str> = ranked.iter().map(|r| r.0.as_str()).collect();
        assert_eq!(order, ["mid", "alpha", "zeta"]);
    }

    #[test]
    fn rejects_bad_input() {
        let one_class = design(vec![vec![1.0], vec![2.0]], vec![true, true], vec![1.0; 2]);
        assert!(matches!(train(&one_class, &TrainConfig::default()), Err(Error::SingleClass)));
        let nan = design(vec![vec![f64::NAN], vec![2.0]], vec![true, false], vec![1.0; 2]);
        match train(&nan, &TrainConfig::default()) {
            Err(Error::NonFiniteFeature { feature, example }) => assert_eq!((feature.as_str(), example.as_str()), ("x0", "row0")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn collinear_columns_still_fit() {
        // two identical columns plus a column that sums with a third to one
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let x = (i % 7) as f64;
                let b = (i % 2) as f64;
                vec![x, x, b, 1.0 - b]
            })
            .collect();
        let labels: Vec<bool> = (0..40).map(|i| (i * 37 % 11) < 5).collect();
        let d = design(rows, labels, vec![1.0; 40]);
        let m = train(&d, &TrainConfig::default()).unwrap();
        assert!(m.converged, "{m:?}");
        let g = log_likelihood_gradient(m.intercept, &m.coefficients, &d);
        assert!(g.iter().all(|v| v.abs() < 1e-6), "{g:?}");
    }
}
