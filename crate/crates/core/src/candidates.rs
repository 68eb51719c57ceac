//! Human responses, the filtering funnel, n-gram candidates and negative sampling.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::text::tokenize;

/// Default spurious-response blocklist, one phrase per line.
pub const DEFAULT_BLOCKLIST: &str = include_str!("../data/spurious.txt");

pub const POSITIVE_WEIGHT: f64 = 1.0;
pub const NEGATIVE_WEIGHT: f64 = 0.1;

/// One keyphrase typed by one annotator for one abstract.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Response {
    pub doc_id: String,
    pub assignment_id: String,
    pub phrase: String,
    /// Lowercased tokens of `phrase`.
    pub phrase_tokens: Vec<String>,
}

impl Response {
    /// `None` when the phrase is blank after trimming.
    pub fn new(doc_id: impl Into<String>, assignment_id: impl Into<String>, phrase: &str) -> Option<Self> {
        let phrase = phrase.trim();
        if phrase.is_empty() {
            return None;
        }
        Some(Response {
            doc_id: doc_id.into(),
            assignment_id: assignment_id.into(),
            phrase: phrase.to_string(),
            phrase_tokens: tokenize(phrase).into_iter().map(|t| t.lowercased).collect(),
        })
    }
}

#[derive(Debug, Deserialize)]
struct ResponseRow {
    doc_id: String,
    assignment_id: String,
    phrase: String,
}

/// Reads a `doc_id,assignment_id,phrase` CSV. Blank phrases are skipped and counted.
pub fn read_responses<R: std::io::Read>(reader: R) -> Result<(Vec<Response>, usize)> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::Headers).from_reader(reader);
    let mut responses = Vec::new();
    let mut blank = 0;
    for row in csv.deserialize() {
        let row: ResponseRow = row?;
        match Response::new(row.doc_id.trim(), row.assignment_id.trim(), &row.phrase) {
            Some(r) => responses.push(r),
            None => blank += 1,
        }
    }
    Ok((responses, blank))
}

pub fn load_responses(path: impl AsRef<Path>) -> Result<(Vec<Response>, usize)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_responses(file)
}

/// Spurious phrases, matched exactly after trimming and case folding.
#[derive(Debug, Clone)]
pub struct Blocklist {
    entries: HashSet<String>,
}

impl Default for Blocklist {
    /// The built-in list.
    fn default() -> Self {
        Blocklist::parse(DEFAULT_BLOCKLIST)
    }
}

impl Blocklist {
    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty())
            .map(str::to_lowercase)
            .collect();
        Blocklist { entries }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        std::fs::read_to_string(path)
            .map(|t| Blocklist::parse(&t))
            .map_err(|e| Error::io(path, e))
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.entries.contains(&phrase.trim().to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl std::str::FromStr for Blocklist {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(Blocklist::parse(s))
    }
}

/// A response is spurious when it is a blocklist entry or reproduces the
/// document's whole title or whole abstract.
pub fn is_spurious(response: &Response, blocklist: &Blocklist, documents: &Corpus) -> bool {
    if blocklist.contains(&response.phrase) {
        return true;
    }
    let Some(doc) = documents.get(&response.doc_id) else {
        return false;
    };
    let tokens: Vec<&str> = response.phrase_tokens.iter().map(String::as_str).collect();
    !tokens.is_empty() && (tokens == doc.title_terms() || tokens == doc.body_terms())
}

pub fn filter_spurious(responses: &[Response], blocklist: &Blocklist, documents: &Corpus) -> Vec<Response> {
    responses
        .iter()
        .filter(|r| !is_spurious(r, blocklist, documents))
        .cloned()
        .collect()
}

pub fn filter_length(responses: &[Response], max_words: usize) -> Vec<Response> {
    responses
        .iter()
        .filter(|r| r.phrase_tokens.len() <= max_words)
        .cloned()
        .collect()
}

pub fn is_extractive(response: &Response, documents: &Corpus) -> Result<bool> {
    Ok(documents.require(&response.doc_id)?.contains_phrase(&response.phrase_tokens))
}

/// Keeps responses whose token sequence occurs contiguously in their document.
pub fn filter_extractive(responses: &[Response], documents: &Corpus) -> Result<Vec<Response>> {
    let mut kept = Vec::new();
    for r in responses {
        if is_extractive(r, documents)? {
            kept.push(r.clone());
        }
    }
    Ok(kept)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    pub fn as_f64(self) -> f64 {
        if self.is_positive() {
            1.0
        } else {
            0.0
        }
    }
}

/// A (document, phrase) pair with its training label and sample weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub doc_id: String,
    pub phrase_tokens: Vec<String>,
    pub label: Label,
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub features: Vec<(String, f64)>,
}

impl LabeledExample {
    pub fn positive(doc_id: impl Into<String>, phrase_tokens: Vec<String>) -> Self {
        LabeledExample {
            doc_id: doc_id.into(),
            phrase_tokens,
            label: Label::Positive,
            weight: POSITIVE_WEIGHT,
            features: Vec::new(),
        }
    }

    pub fn negative(doc_id: impl Into<String>, phrase_tokens: Vec<String>, weight: f64) -> Self {
        LabeledExample {
            doc_id: doc_id.into(),
            phrase_tokens,
            label: Label::Negative,
            weight,
            features: Vec::new(),
        }
    }

    pub fn phrase(&self) -> String {
        self.phrase_tokens.join(" ")
    }
}

/// Unique (doc_id, token sequence) positives, in first-seen order.
pub fn unique_positives(responses: &[Response]) -> Vec<LabeledExample> {
    let mut seen = HashSet::new();
    responses
        .iter()
        .filter(|r| !r.phrase_tokens.is_empty())
        .filter(|r| seen.insert((r.doc_id.as_str(), r.phrase_tokens.as_slice())))
        .map(|r| LabeledExample::positive(r.doc_id.clone(), r.phrase_tokens.clone()))
        .collect()
}

/// Distinct lowercased n-grams (1 <= n <= `n_max`) that stay inside one
/// sentence, in order of first appearance.
pub fn enumerate_ngrams(document: &Document, n_max: usize) -> Vec<Vec<String>> {
    let terms = document.terms();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for sentence in &document.sentences {
        for start in sentence.start..sentence.end {
            for n in 1..=n_max.min(sentence.end - start) {
                let gram = &terms[start..start + n];
                if seen.insert(gram) {
                    out.push(gram.iter().map(|s| s.to_string()).collect());
                }
            }
        }
    }
    out
}

/// Draws `ratio * positives.len()` distinct (document, n-gram) pairs that are
/// not positives, uniformly and without replacement. The result is in corpus
/// order (documents by id, n-grams by first appearance) and depends only on
/// the inputs and `seed`.
pub fn sample_negatives(
    corpus: &Corpus,
    positives: &[LabeledExample],
    ratio: usize,
    n_max: usize,
    weight: f64,
    seed: u64,
) -> Result<Vec<LabeledExample>> {
    if ratio == 0 {
        return Err(Error::InvalidArgument("negative ratio must be at least 1".into()));
    }
    let taken: HashSet<(&str, &[String])> = positives
        .iter()
        .map(|p| (p.doc_id.as_str(), p.phrase_tokens.as_slice()))
        .collect();
    let mut universe = Vec::new();
    for doc in &corpus.documents {
        for gram in enumerate_ngrams(doc, n_max) {
            if !taken.contains(&(doc.id.as_str(), gram.as_slice())) {
                universe.push((doc.id.as_str(), gram));
            }
        }
    }
    let needed = ratio * positives.len();
    if needed > universe.len() {
        return Err(Error::InsufficientNgrams {
            needed,
            available: universe.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = index::sample(&mut rng, universe.len(), needed).into_vec();
    picks.sort_unstable();
    Ok(picks
        .into_iter()
        .map(|i| LabeledExample::negative(universe[i].0, universe[i].1.clone(), weight))
        .collect())
}

/// Counts after each stage of the response funnel.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Funnel {
    pub responses: usize,
    pub blank_skipped: usize,
    pub after_spurious: usize,
    pub after_length: usize,
    pub after_extractive: usize,
    pub unique_positives: usize,
    pub negatives: usize,
}

#[derive(Debug, Clone)]
pub struct FilteredResponses {
    pub after_spurious: Vec<Response>,
    pub after_length: Vec<Response>,
    pub extractive: Vec<Response>,
}

pub fn run_filters(
    responses: &[Response],
    blocklist: &Blocklist,
    documents: &Corpus,
    max_words: usize,
) -> Result<FilteredResponses> {
    let after_spurious = filter_spurious(responses, blocklist, documents);
    let after_length = filter_length(&after_spurious, max_words);
    let extractive = filter_extractive(&after_length, documents)?;
    Ok(FilteredResponses {
        after_spurious,
        after_length,
        extractive,
    })
}

pub fn write_examples_jsonl<W: Write>(mut out: W, examples: &[LabeledExample]) -> Result<()> {
    for e in examples {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n").map_err(|e| Error::io("<examples>", e))?;
    }
    Ok(())
}

pub fn read_examples_jsonl<R: BufRead>(input: R) -> Result<Vec<LabeledExample>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| Error::io("<examples>", e))?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Responses grouped by assignment id.
pub fn assignments(responses: &[Response]) -> BTreeMap<&str, Vec<&Response>> {
    let mut map: BTreeMap<&str, Vec<&Response>> = BTreeMap::new();
    for r in responses {
        map.entry(r.assignment_id.as_str()).or_default().push(r);
    }
    map
}

/// Distinct (doc_id, tokens) pairs, in sorted order.
pub fn unique_phrases(responses: &[Response]) -> BTreeSet<(&str, &[String])> {
    responses
        .iter()
        .filter(|r| !r.phrase_tokens.is_empty())
        .map(|r| (r.doc_id.as_str(), r.phrase_tokens.as_slice()))
        .collect()
}
