//! Model configurations and their side-by-side comparison.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::commonness::commonness_bin;
use crate::error::{Error, Result};
use crate::eval::{pr_curve, PrCurve};
use crate::features::{commonness_bin_name, Dataset, COMMONNESS};
use crate::freq::FREQUENCY_FEATURES;
use crate::grammar::{PARSE_FEATURES, POS_FEATURES};
use crate::model::{train, Design, Model, TrainConfig};
use crate::positional::POSITIONAL_FEATURES;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    /// A column of the dataset, used as is.
    Feature(String),
    /// The raw commonness column expanded into this many one-hot bins.
    CommonnessBins(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub columns: Vec<Column>,
}

impl ModelSpec {
    pub fn new<S: AsRef<str>>(name: &str, features: &[S]) -> Self {
        ModelSpec {
            name: name.to_string(),
            columns: features.iter().map(|f| Column::Feature(f.as_ref().to_string())).collect(),
        }
    }

    pub fn with_commonness_bins(mut self, num_bins: usize) -> Self {
        self.columns.push(Column::CommonnessBins(num_bins));
        self
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns
            .iter()
            .flat_map(|c| match c {
                Column::Feature(name) => vec![name.clone()],
                Column::CommonnessBins(k) => (0..*k).map(|b| commonness_bin_name(b, *k)).collect(),
            })
            .collect()
    }

    /// Dataset columns this spec reads.
    pub fn required_features(&self) -> BTreeSet<&str> {
        self.columns
            .iter()
            .map(|c| match c {
                Column::Feature(name) => name.as_str(),
                Column::CommonnessBins(_) => COMMONNESS,
            })
            .collect()
    }
}

fn strs(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// The five configurations: frequency statistics; log(tf) with commonness;
/// that plus all grammatical features; all features; and the corpus-independent
/// model of log(tf), positional and the four part-of-speech features.
pub fn standard_models() -> Vec<ModelSpec> {
    let grammar: Vec<&str> = PARSE_FEATURES.iter().chain(&POS_FEATURES).copied().collect();
    let mut all = strs(&FREQUENCY_FEATURES);
    all.push(COMMONNESS.into());
    all.extend(strs(&grammar));
    all.extend(strs(&POSITIONAL_FEATURES));
    let mut with_grammar = strs(&["log_tf", COMMONNESS]);
    with_grammar.extend(strs(&grammar));
    let mut independent = strs(&["log_tf"]);
    independent.extend(strs(&POSITIONAL_FEATURES));
    independent.extend(strs(&POS_FEATURES));
    vec![
        ModelSpec::new("frequency", &FREQUENCY_FEATURES),
        ModelSpec::new("log_tf+commonness", &["log_tf", COMMONNESS]),
        ModelSpec::new("log_tf+commonness+grammar", &with_grammar),
        ModelSpec::new("all_features", &all),
        ModelSpec::new("corpus_independent", &independent),
    ]
}

/// log(tf) plus commonness expanded into 2..=20 bins.
pub fn commonness_bin_sweep() -> Vec<ModelSpec> {
    (2..=20)
        .map(|k| ModelSpec::new(&format!("log_tf+commonness_{k}bins"), &["log_tf"]).with_commonness_bins(k))
        .collect()
}

/// One model per frequency statistic.
pub fn single_feature_baselines() -> Vec<ModelSpec> {
    FREQUENCY_FEATURES.iter().map(|f| ModelSpec::new(f, &[f])).collect()
}

impl Dataset {
    /// Training matrix for `spec` over the rows selected by `keep`.
    pub fn design(&self, spec: &ModelSpec, keep: impl Fn(usize) -> bool) -> Result<Design> {
        enum Source {
            Copy(usize),
            Bins(usize, usize),
        }
        let sources = spec
            .columns
            .iter()
            .map(|c| match c {
                Column::Feature(name) => self.column(name).map(Source::Copy),
                Column::CommonnessBins(k) => self.column(COMMONNESS).map(|i| Source::Bins(i, *k)),
            })
            .collect::<Result<Vec<_>>>()?;
        let mut design = Design {
            feature_names: spec.column_names(),
            ..Default::default()
        };
        for (_, row) in self.rows.iter().enumerate().filter(|(i, _)| keep(*i)) {
            let mut values = Vec::with_capacity(design.feature_names.len());
            for source in &sources {
                match *source {
                    Source::Copy(j) => values.push(row.values[j]),
                    Source::Bins(j, k) => {
                        let hot = commonness_bin(row.values[j], k)?;
                        values.extend((0..k).map(|b| if b == hot { 1.0 } else { 0.0 }));
                    }
                }
            }
            design.rows.push(values);
            design.labels.push(row.label.is_positive());
            design.weights.push(row.weight);
            design.ids.push(format!("{}:{}", row.doc_id, row.phrase));
        }
        Ok(design)
    }

    pub fn full_design(&self, spec: &ModelSpec) -> Result<Design> {
        self.design(spec, |_| true)
    }
}

/// Which rows train and which evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Split {
    /// Train and evaluate on every row.
    InSample,
    /// Hold out a seeded random fraction of documents for evaluation.
    HeldOut { fraction: f64, seed: u64 },
}

impl Split {
    /// Per-row flag: true for evaluation rows.
    pub fn evaluation_mask(&self, dataset: &Dataset) -> Result<Vec<bool>> {
        match *self {
            Split::InSample => Ok(vec![true; dataset.rows.len()]),
            Split::HeldOut { fraction, seed } => {
                if !(fraction > 0.0 && fraction < 1.0) {
                    return Err(Error::InvalidArgument(format!("held-out fraction must be in (0, 1), got {fraction}")));
                }
                let docs: BTreeSet<&str> = dataset.rows.iter().map(|r| r.doc_id.as_str()).collect();
                let mut docs: Vec<&str> = docs.into_iter().collect();
                docs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                let n_eval = ((docs.len() as f64 * fraction).round() as usize).clamp(1, docs.len().saturating_sub(1).max(1));
                let held: BTreeSet<&str> = docs[..n_eval].iter().copied().collect();
                Ok(dataset.rows.iter().map(|r| held.contains(r.doc_id.as_str())).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub name: String,
    pub auc: f64,
    pub curve: PrCurve,
    pub model: Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub split: Split,
    /// Weight precision/recall counts by sample weight instead of counting examples.
    pub weighted_curves: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            split: Split::InSample,
            weighted_curves: false,
        }
    }
}

pub fn train_spec(dataset: &Dataset, spec: &ModelSpec, train_rows: &[bool], config: &TrainConfig) -> Result<Model> {
    let design = dataset.design(spec, |i| train_rows[i])?;
    let mut model = train(&design, config)?;
    model.name = Some(spec.name.clone());
    Ok(model)
}

pub fn evaluate(dataset: &Dataset, spec: &ModelSpec, model: &Model, eval_rows: &[bool], weighted: bool) -> Result<PrCurve> {
    let design = dataset.design(spec, |i| eval_rows[i])?;
    let scores: Vec<f64> = design.rows.iter().map(|r| model.predict_values(r)).collect();
    pr_curve(&scores, &design.labels, weighted.then_some(design.weights.as_slice()))
}

/// Trains and evaluates every spec on the same split. Reports are sorted by
/// descending AUC, ties by name.
pub fn compare_models(
    specs: &[ModelSpec],
    dataset: &Dataset,
    options: &CompareOptions,
    config: &TrainConfig,
) -> Result<Vec<ModelReport>> {
    let eval_rows = options.split.evaluation_mask(dataset)?;
    let train_rows: Vec<bool> = match options.split {
        Split::InSample => vec![true; eval_rows.len()],
        Split::HeldOut { .. } => eval_rows.iter().map(|e| !e).collect(),
    };
    let mut reports = Vec::with_capacity(specs.len());
    for spec in specs {
        let model = train_spec(dataset, spec, &train_rows, config)?;
        let curve = evaluate(dataset, spec, &model, &eval_rows, options.weighted_curves)?;
        log::info!("{}: AUC {:.4}", spec.name, curve.auc);
        reports.push(ModelReport {
            name: spec.name.clone(),
            auc: curve.auc,
            curve,
            model,
        });
    }
    reports.sort_by(|a, b| b.auc.total_cmp(&a.auc).then_with(|| a.name.cmp(&b.name)));
    Ok(reports)
}
