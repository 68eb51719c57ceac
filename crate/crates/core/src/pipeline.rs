//! File-based pipeline stages with provenance tracking.
//!
//! Every stage writes into one output directory and records, in
//! `provenance.json`, the SHA-256 of each artifact together with the hash of
//! the configuration that produced it. Later stages refuse inputs whose
//! recorded configuration hash differs from the current one, or whose bytes
//! no longer match the recorded digest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{
    commonness_histogram, extractive_fraction, first_sentence_stats, grammatical_category_fractions,
    keyphrase_count_histogram, phrase_length_histogram, AnalysisSummary, Histogram, COMMONNESS_HISTOGRAM_BINS,
};
use crate::candidates::{
    assignments, load_responses, run_filters, sample_negatives, unique_positives, write_examples_jsonl, Blocklist,
    Funnel, NEGATIVE_WEIGHT,
};
use crate::commonness::NgramIndex;
use crate::corpus::{Corpus, Role};
use crate::error::{Error, Result};
use crate::experiment::{
    commonness_bin_sweep, evaluate, standard_models, train_spec, CompareOptions, ModelSpec, Split,
};
use crate::features::{Dataset, FeatureFamilies, FeaturizeStats, Featurizer};
use crate::model::{Model, TrainConfig};

pub const INDEX_FILE: &str = "index.json";
pub const FEATURES_FILE: &str = "features.csv";
pub const EXAMPLES_FILE: &str = "examples.jsonl";
pub const PROVENANCE_FILE: &str = "provenance.json";
pub const MODELS_DIR: &str = "models";
pub const CURVES_DIR: &str = "curves";
pub const AUC_FILE: &str = "auc.csv";
pub const ANALYSIS_DIR: &str = "analysis";
pub const COMMONNESS_CUTOFFS: [u64; 5] = [0, 5, 10, 15, 20];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    /// Directory of foreground `.txt` documents.
    pub foreground: PathBuf,
    /// Directory of background `.txt` documents.
    #[serde(default)]
    pub background: Option<PathBuf>,
    /// Directory of `<doc_id>.ann` annotation files.
    #[serde(default)]
    pub annotations: Option<PathBuf>,
    /// CSV `doc_id,assignment_id,phrase`.
    pub responses: PathBuf,
    /// One spurious response per line; the built-in list when absent.
    #[serde(default)]
    pub blocklist: Option<PathBuf>,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: Paths,
    pub negative_ratio: usize,
    pub negative_weight: f64,
    pub max_phrase_words: usize,
    pub n_max: usize,
    /// One-hot commonness bins added to the feature matrix; 0 keeps only the raw value.
    pub commonness_bins: usize,
    pub features: FeatureFamilies,
    pub seed: u64,
    pub split: Split,
    pub weighted_curves: bool,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            paths: Paths::default(),
            negative_ratio: 10,
            negative_weight: NEGATIVE_WEIGHT,
            max_phrase_words: 5,
            n_max: 5,
            commonness_bins: 0,
            features: FeatureFamilies::default(),
            seed: 0,
            split: Split::InSample,
            weighted_curves: false,
            train: TrainConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.negative_ratio == 0 {
            return bad("negative_ratio must be positive".into());
        }
        if !(self.negative_weight > 0.0 && self.negative_weight.is_finite()) {
            return bad(format!("negative_weight must be positive, got {}", self.negative_weight));
        }
        if self.max_phrase_words == 0 || self.n_max == 0 {
            return bad("max_phrase_words and n_max must be positive".into());
        }
        if self.max_phrase_words > self.n_max {
            return bad(format!(
                "max_phrase_words ({}) exceeds n_max ({}); longer positives would have no background statistics",
                self.max_phrase_words, self.n_max
            ));
        }
        if self.commonness_bins == 1 || self.commonness_bins > 20 {
            return bad(format!("commonness_bins must be 0 or in 2..=20, got {}", self.commonness_bins));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex(&Sha256::digest(&json))
    }

    fn out(&self, name: &str) -> PathBuf {
        self.paths.output.join(name)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub sha256: String,
    pub config_hash: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub artifacts: BTreeMap<String, ArtifactRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub funnel: Option<Funnel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub featurize: Option<FeaturizeStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(PROVENANCE_FILE);
        match fs::read_to_string(&path) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Provenance::default()),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    fn save(&self, dir: &Path) -> Result<()> {
        write_file(&dir.join(PROVENANCE_FILE), (serde_json::to_string_pretty(self)? + "\n").as_bytes())
    }

    fn record(&mut self, name: &str, bytes: &[u8], config: &RunConfig) {
        self.artifacts.insert(
            name.to_string(),
            ArtifactRecord {
                sha256: hex(&Sha256::digest(bytes)),
                config_hash: config.hash(),
            },
        );
    }

    /// Reads an artifact, checking it against its provenance record.
    pub fn read_verified(&self, dir: &Path, name: &str, config: &RunConfig) -> Result<Vec<u8>> {
        let record = self
            .artifacts
            .get(name)
            .ok_or_else(|| Error::Provenance(format!("{name} has no provenance record; run the stage that produces it")))?;
        if record.config_hash != config.hash() {
            return Err(Error::Provenance(format!(
                "{name} was produced by config {} but the current config is {}",
                record.config_hash,
                config.hash()
            )));
        }
        let path = dir.join(name);
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        if hex(&Sha256::digest(&bytes)) != record.sha256 {
            return Err(Error::Provenance(format!("{name} was modified after it was written")));
        }
        Ok(bytes)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_artifact(prov: &mut Provenance, config: &RunConfig, name: &str, bytes: &[u8]) -> Result<()> {
    write_file(&config.out(name), bytes)?;
    prov.record(name, bytes, config);
    Ok(())
}

fn load_foreground(config: &RunConfig) -> Result<Corpus> {
    let mut corpus = Corpus::load(&config.paths.foreground, Role::Foreground)?;
    if let Some(dir) = &config.paths.annotations {
        let missing = corpus.attach_annotations(dir)?;
        if !missing.is_empty() {
            log::warn!("{} foreground documents have no annotation file", missing.len());
        }
    }
    Ok(corpus)
}

fn load_blocklist(config: &RunConfig) -> Result<Blocklist> {
    match &config.paths.blocklist {
        Some(path) => Blocklist::load(path),
        None => Ok(Blocklist::default()),
    }
}

fn load_index(prov: &Provenance, config: &RunConfig) -> Result<NgramIndex> {
    let bytes = prov.read_verified(&config.paths.output, INDEX_FILE, config)?;
    let index = NgramIndex::from_bytes(&bytes)?;
    if index.n_max < config.n_max {
        return Err(Error::InvalidArgument(format!(
            "index covers n-grams up to {} but n_max is {}",
            index.n_max, config.n_max
        )));
    }
    Ok(index)
}

/// Builds the background n-gram index.
pub fn cmd_index(config: &RunConfig) -> Result<NgramIndex> {
    config.validate()?;
    let dir = config
        .paths
        .background
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("no background corpus configured".into()))?;
    let corpus = Corpus::load(dir, Role::Background)?;
    let index = NgramIndex::build(&corpus, config.n_max)?;
    let mut prov = Provenance::load(&config.paths.output)?;
    write_artifact(&mut prov, config, INDEX_FILE, &index.to_bytes()?)?;
    prov.save(&config.paths.output)?;
    log::info!("indexed {} background documents, {} tokens", index.n_docs, index.total_tokens);
    Ok(index)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeaturizeOutput {
    pub dataset: Dataset,
    pub funnel: Funnel,
    pub stats: FeaturizeStats,
}

/// Filters responses, samples negatives and writes the feature matrix.
pub fn cmd_featurize(config: &RunConfig) -> Result<FeaturizeOutput> {
    config.validate()?;
    let mut prov = Provenance::load(&config.paths.output)?;
    let index = if config.features.needs_index() {
        Some(load_index(&prov, config)?)
    } else {
        None
    };
    let corpus = load_foreground(config)?;
    let (responses, blank) = load_responses(&config.paths.responses)?;
    let filtered = run_filters(&responses, &load_blocklist(config)?, &corpus, config.max_phrase_words)?;
    let positives = unique_positives(&filtered.extractive);
    let negatives = sample_negatives(
        &corpus,
        &positives,
        config.negative_ratio,
        config.n_max,
        config.negative_weight,
        config.seed,
    )?;
    let funnel = Funnel {
        responses: responses.len() + blank,
        blank_skipped: blank,
        after_spurious: filtered.after_spurious.len(),
        after_length: filtered.after_length.len(),
        after_extractive: filtered.extractive.len(),
        unique_positives: positives.len(),
        negatives: negatives.len(),
    };
    log::info!("funnel: {funnel:?}");

    let mut examples = positives;
    examples.extend(negatives);
    let mut featurizer = Featurizer::new(&corpus, index.as_ref());
    featurizer.families = config.features;
    featurizer.n_max = config.n_max;
    featurizer.commonness_bins = config.commonness_bins;
    let (dataset, stats) = featurizer.featurize(&examples)?;

    let mut jsonl = Vec::new();
    write_examples_jsonl(&mut jsonl, &examples)?;
    write_artifact(&mut prov, config, EXAMPLES_FILE, &jsonl)?;
    let mut csv = Vec::new();
    dataset.write_csv(&mut csv)?;
    write_artifact(&mut prov, config, FEATURES_FILE, &csv)?;
    prov.funnel = Some(funnel.clone());
    prov.featurize = Some(stats.clone());
    prov.seed = Some(config.seed);
    prov.save(&config.paths.output)?;
    Ok(FeaturizeOutput { dataset, funnel, stats })
}

/// Reads the verified feature matrix.
pub fn load_dataset(config: &RunConfig) -> Result<Dataset> {
    let prov = Provenance::load(&config.paths.output)?;
    Dataset::read_csv(prov.read_verified(&config.paths.output, FEATURES_FILE, config)?.as_slice())
}

/// The five standard configurations plus the commonness bin sweep, keeping
/// those whose columns are all present.
pub fn experiment_specs(dataset: &Dataset) -> Vec<ModelSpec> {
    standard_models()
        .into_iter()
        .chain(commonness_bin_sweep())
        .filter(|spec| {
            let missing: Vec<&str> = spec
                .required_features()
                .into_iter()
                .filter(|f| !dataset.feature_names.iter().any(|n| n == f))
                .collect();
            if !missing.is_empty() {
                log::warn!("skipping model {}: feature matrix lacks {}", spec.name, missing.join(", "));
            }
            missing.is_empty()
        })
        .collect()
}

fn model_file(name: &str) -> String {
    format!("{MODELS_DIR}/{name}.json")
}

fn curve_file(name: &str) -> String {
    format!("{CURVES_DIR}/{name}.csv")
}

fn train_rows(config: &RunConfig, dataset: &Dataset) -> Result<(Vec<bool>, Vec<bool>)> {
    let eval = config.split.evaluation_mask(dataset)?;
    let train = match config.split {
        Split::InSample => vec![true; eval.len()],
        Split::HeldOut { .. } => eval.iter().map(|e| !e).collect(),
    };
    Ok((train, eval))
}

/// Trains every experiment model on the training rows.
pub fn cmd_train(config: &RunConfig) -> Result<Vec<Model>> {
    config.validate()?;
    let dataset = load_dataset(config)?;
    let (train, _) = train_rows(config, &dataset)?;
    let mut prov = Provenance::load(&config.paths.output)?;
    let mut models = Vec::new();
    for spec in experiment_specs(&dataset) {
        let model = train_spec(&dataset, &spec, &train, &config.train)?;
        write_artifact(&mut prov, config, &model_file(&spec.name), model.to_json()?.as_bytes())?;
        models.push(model);
    }
    prov.save(&config.paths.output)?;
    Ok(models)
}

/// Evaluates the trained models; writes one curve per model and the AUC table
/// sorted by descending AUC.
pub fn cmd_eval(config: &RunConfig) -> Result<Vec<(String, f64)>> {
    config.validate()?;
    let dataset = load_dataset(config)?;
    let (_, eval) = train_rows(config, &dataset)?;
    let mut prov = Provenance::load(&config.paths.output)?;
    let options = CompareOptions {
        split: config.split,
        weighted_curves: config.weighted_curves,
    };
    let mut table = Vec::new();
    for spec in experiment_specs(&dataset) {
        let bytes = prov.read_verified(&config.paths.output, &model_file(&spec.name), config)?;
        let model = Model::from_json(std::str::from_utf8(&bytes).map_err(|_| Error::NotUtf8 {
            path: model_file(&spec.name).into(),
        })?)?;
        if model.feature_names != spec.column_names() {
            return Err(Error::FeatureMismatch {
                expected: spec.column_names(),
                found: model.feature_names,
            });
        }
        let curve = evaluate(&dataset, &spec, &model, &eval, options.weighted_curves)?;
        let mut csv = Vec::new();
        curve.write_csv(&mut csv)?;
        write_artifact(&mut prov, config, &curve_file(&spec.name), &csv)?;
        table.push((spec.name, curve.auc));
    }
    table.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["model", "auc"])?;
    for (name, auc) in &table {
        csv.write_record([name.clone(), auc.to_string()])?;
    }
    let bytes = csv.into_inner().map_err(|e| Error::io(AUC_FILE, e.into_error()))?;
    write_artifact(&mut prov, config, AUC_FILE, &bytes)?;
    prov.save(&config.paths.output)?;
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutput {
    pub summary: AnalysisSummary,
    pub histograms: BTreeMap<String, Histogram>,
}

/// Descriptive statistics. Phrase lengths, the extractive share and the
/// first-sentence share use responses after the spurious filter; keyphrase
/// counts use every response; grammatical categories and commonness use the
/// extractive responses. Commonness histograms need the index.
pub fn cmd_analyze(config: &RunConfig) -> Result<AnalysisOutput> {
    config.validate()?;
    let mut prov = Provenance::load(&config.paths.output)?;
    let corpus = load_foreground(config)?;
    let (responses, _) = load_responses(&config.paths.responses)?;
    let filtered = run_filters(&responses, &load_blocklist(config)?, &corpus, config.max_phrase_words)?;

    let mut histograms = BTreeMap::new();
    histograms.insert("phrase_length".to_string(), phrase_length_histogram(&filtered.after_spurious, 10));
    histograms.insert("keyphrase_count".to_string(), keyphrase_count_histogram(&responses)?);
    if prov.artifacts.contains_key(INDEX_FILE) {
        let index = load_index(&prov, config)?;
        for cutoff in COMMONNESS_CUTOFFS {
            histograms.insert(
                format!("commonness_cutoff{cutoff}"),
                commonness_histogram(&filtered.extractive, &index, cutoff, COMMONNESS_HISTOGRAM_BINS)?,
            );
        }
    } else {
        log::warn!("no background index; skipping commonness histograms");
    }

    let mut populations: BTreeMap<String, String> =
        histograms.iter().map(|(k, h)| (k.clone(), h.population.clone())).collect();
    populations.insert("extractive_percentage".into(), "responses after the spurious filter".into());
    populations.insert("first_sentence".into(), "responses after the spurious filter; body unigrams per document".into());
    populations.insert("grammar".into(), "unique extractive (document, phrase) pairs".into());
    if let Some(h) = histograms.get_mut("phrase_length") {
        h.population = "responses after the spurious filter".into();
        populations.insert("phrase_length".into(), h.population.clone());
    }
    let summary = AnalysisSummary {
        responses: responses.len(),
        assignments: assignments(&responses).len(),
        extractive_percentage: extractive_fraction(&filtered.after_spurious, &corpus)?,
        first_sentence: first_sentence_stats(&filtered.after_spurious, &corpus)?,
        grammar: grammatical_category_fractions(&filtered.extractive, &corpus)?,
        populations,
    };

    for (name, h) in &histograms {
        let mut csv = Vec::new();
        h.write_csv(&mut csv)?;
        write_artifact(&mut prov, config, &format!("{ANALYSIS_DIR}/{name}.csv"), &csv)?;
    }
    let json = serde_json::to_string_pretty(&summary)? + "\n";
    write_artifact(&mut prov, config, &format!("{ANALYSIS_DIR}/summary.json"), json.as_bytes())?;
    prov.save(&config.paths.output)?;
    Ok(AnalysisOutput { summary, histograms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_hash() {
        let c = RunConfig::default();
        assert_eq!((c.negative_ratio, c.negative_weight, c.max_phrase_words, c.n_max), (10, 0.1, 5, 5));
        let mut d = c.clone();
        assert_eq!(c.hash(), d.hash());
        d.seed = 1;
        assert_ne!(c.hash(), d.hash());
    }

    #[test]
    fn config_validation() {
        let ok = RunConfig::default();
        assert!(ok.validate().is_ok());
        assert!(RunConfig { negative_weight: 0.0, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { commonness_bins: 1, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { max_phrase_words: 6, ..ok }.validate().is_err());
    }

    #[test]
    fn partial_config_json() {
        let json = r#"{"paths": {"foreground": "f", "responses": "r.csv", "output": "o"}, "seed": 7}"#;
        let c: RunConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.negative_ratio, 10);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sede": 1}"#).is_err());
    }
}
