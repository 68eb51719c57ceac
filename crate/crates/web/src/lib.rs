//! Browser bindings for three small demos: ranking the n-grams of a pasted
//! document by term weight, highlighting technical-term spans in tagged
//! text, and drawing a precision-recall curve from scored labels.
//!
//! Each export takes and returns plain strings (JSON out) so the page needs
//! no generated TypeScript types.

use keyphrase_core::candidates::enumerate_ngrams;
use keyphrase_core::commonness::{commonness, NgramIndex};
use keyphrase_core::freq::{DocumentProfile, FrequencyFeatures};
use keyphrase_core::grammar::TermSpans;
use keyphrase_core::{pr_curve, Corpus, Document, FrequencyFeatureConfig, PrCurve, Role};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const N_MAX: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermRow {
    pub phrase: String,
    pub t_doc: f64,
    pub t_ref: f64,
    #[serde(flatten)]
    pub weights: FrequencyFeatures,
    pub commonness: f64,
}

impl TermRow {
    fn key(&self, name: &str) -> Option<f64> {
        Some(match name {
            "log_tf" => self.weights.log_tf,
            "tf_idf" => self.weights.tf_idf,
            "g2" => self.weights.g2,
            "bm25" => self.weights.bm25,
            "log_odds" => self.weights.log_odds,
            "commonness" => self.commonness,
            _ => return None,
        })
    }
}

/// The first line of `document` is its title. Background documents are
/// separated by blank lines.
pub fn rank_terms(document: &str, background: &str, sort_by: &str, top: usize) -> Result<Vec<TermRow>, String> {
    let (title, body) = document.trim().split_once('\n').unwrap_or((document.trim(), ""));
    let doc = Document::new("input", title, body);
    if doc.tokens.is_empty() {
        return Err("the document has no words".into());
    }
    let docs: Vec<Document> = background
        .split("\n\n")
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(i, t)| Document::new(format!("bg{i:04}"), "", t))
        .collect();
    let index = NgramIndex::build(&Corpus::new(Role::Background, docs), N_MAX).map_err(|e| e.to_string())?;
    let profile = DocumentProfile::new(&doc, N_MAX);
    let config = FrequencyFeatureConfig::default();
    let mut rows = enumerate_ngrams(&doc, N_MAX)
        .into_iter()
        .map(|gram| {
            let stats = profile.term_statistics(&gram, &index);
            TermRow {
                phrase: gram.join(" "),
                t_doc: stats.t_doc,
                t_ref: stats.t_ref,
                weights: FrequencyFeatures::from_stats(&stats, &config),
                commonness: commonness(&gram, &index),
            }
        })
        .collect::<Vec<_>>();
    if rows[0].key(sort_by).is_none() {
        return Err(format!("unknown weight {sort_by:?}"));
    }
    rows.sort_by(|a, b| {
        let (x, y) = (a.key(sort_by).unwrap(), b.key(sort_by).unwrap());
        y.total_cmp(&x).then_with(|| a.phrase.cmp(&b.phrase))
    });
    rows.truncate(top);
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaggedToken {
    pub word: String,
    pub tag: String,
    /// Index of the maximal technical term covering this token.
    pub technical: Option<usize>,
    /// Index of the maximal compound technical term covering this token.
    pub compound: Option<usize>,
}

/// Input is whitespace-separated `word/TAG` tokens, one sentence per line.
pub fn highlight(tagged: &str) -> Result<Vec<Vec<TaggedToken>>, String> {
    let mut sentences = Vec::new();
    for (n, line) in tagged.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let mut words = Vec::new();
        let mut tags = Vec::new();
        for item in line.split_whitespace() {
            let (w, t) = item
                .rsplit_once('/')
                .filter(|(w, t)| !w.is_empty() && !t.is_empty())
                .ok_or_else(|| format!("line {}: {item:?} is not word/TAG", n + 1))?;
            words.push(w.to_string());
            tags.push(t.to_uppercase());
        }
        let spans = TermSpans::for_sentence(&words, &tags);
        let covering = |list: &[keyphrase_core::Span], i: usize| list.iter().position(|s| s.start <= i && i < s.end);
        sentences.push(
            words
                .into_iter()
                .zip(tags)
                .enumerate()
                .map(|(i, (word, tag))| TaggedToken {
                    word,
                    tag,
                    technical: covering(&spans.technical, i),
                    compound: covering(&spans.compound, i),
                })
                .collect(),
        );
    }
    Ok(sentences)
}

fn parse_label(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "pos" => Some(true),
        "0" | "false" | "no" | "neg" => Some(false),
        _ => None,
    }
}

/// Lines of `score,label[,weight]`; `#` starts a comment.
pub fn curve(text: &str) -> Result<PrCurve, String> {
    let (mut scores, mut labels, mut weights) = (Vec::new(), Vec::new(), Vec::new());
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split([',', '\t', ' ']).filter(|f| !f.is_empty()).collect();
        let bad = || format!("line {}: expected score,label[,weight], got {line:?}", n + 1);
        if !(2..=3).contains(&fields.len()) {
            return Err(bad());
        }
        scores.push(fields[0].parse::<f64>().map_err(|_| bad())?);
        labels.push(parse_label(fields[1]).ok_or_else(bad)?);
        weights.push(match fields.get(2) {
            Some(w) => w.parse::<f64>().ok().filter(|w| *w >= 0.0).ok_or_else(bad)?,
            None => 1.0,
        });
    }
    if !labels.contains(&true) {
        return Err("need at least one positive example".into());
    }
    let weighted = weights.iter().any(|&w| w != 1.0);
    pr_curve(&scores, &labels, weighted.then_some(weights.as_slice())).map_err(|e| e.to_string())
}

fn to_js<T: Serialize>(result: Result<T, String>) -> Result<String, JsError> {
    let value = result.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = rankTerms)]
pub fn rank_terms_js(document: &str, background: &str, sort_by: &str, top: usize) -> Result<String, JsError> {
    to_js(rank_terms(document, background, sort_by, top))
}

#[wasm_bindgen(js_name = highlightTerms)]
pub fn highlight_js(tagged: &str) -> Result<String, JsError> {
    to_js(highlight(tagged))
}

#[wasm_bindgen(js_name = prCurve)]
pub fn curve_js(text: &str) -> Result<String, JsError> {
    to_js(curve(text))
}
