//! Descriptive statistics over annotator responses.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::candidates::{assignments, is_extractive, unique_phrases, Response};
use crate::commonness::{commonness, commonness_bin, NgramIndex};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::grammar::grammatical_features;
use crate::text::Span;

/// Counts per labeled bin with their share of the total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// What was counted, e.g. "responses" or "unique n-grams".
    pub population: String,
    pub labels: Vec<String>,
    pub counts: Vec<usize>,
    pub percentages: Vec<f64>,
    pub total: usize,
}

impl Histogram {
    /// Percentages are all zero when nothing was counted.
    pub fn from_counts(population: impl Into<String>, labels: Vec<String>, counts: Vec<usize>) -> Self {
        assert_eq!(labels.len(), counts.len());
        let total: usize = counts.iter().sum();
        let percentages = counts
            .iter()
            .map(|&c| if total == 0 { 0.0 } else { 100.0 * c as f64 / total as f64 })
            .collect();
        Histogram {
            population: population.into(),
            labels,
            counts,
            percentages,
            total,
        }
    }

    pub fn count(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label).map(|i| self.counts[i])
    }

    pub fn percentage(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.percentages[i])
    }

    /// CSV `bin,count,percentage`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin", "count", "percentage"])?;
        for ((label, count), pct) in self.labels.iter().zip(&self.counts).zip(&self.percentages) {
            w.write_record([label.clone(), count.to_string(), format!("{pct:.6}")])?;
        }
        w.flush().map_err(|e| Error::io("<histogram>", e))?;
        Ok(())
    }
}

fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

/// Responses by word count 1..=cap plus an overflow bin `>cap`. Responses
/// without any token are left out.
pub fn phrase_length_histogram(responses: &[Response], cap: usize) -> Histogram {
    let cap = cap.max(1);
    let mut counts = vec![0; cap + 1];
    for r in responses {
        match r.phrase_tokens.len() {
            0 => {}
            n if n <= cap => counts[n - 1] += 1,
            _ => counts[cap] += 1,
        }
    }
    let mut labels: Vec<String> = (1..=cap).map(|n| n.to_string()).collect();
    labels.push(format!(">{cap}"));
    Histogram::from_counts("responses", labels, counts)
}

pub const KEYPHRASE_COUNT_MIN: usize = 5;
pub const KEYPHRASE_COUNT_MAX: usize = 16;

/// Assignments by how many phrases they contain: `<5`, 5..=16, `>16`.
pub fn keyphrase_count_histogram(responses: &[Response]) -> Result<Histogram> {
    let groups = assignments(responses);
    if groups.is_empty() {
        return Err(Error::EmptyInput("assignments"));
    }
    let (lo, hi) = (KEYPHRASE_COUNT_MIN, KEYPHRASE_COUNT_MAX);
    let mut counts = vec![0; hi - lo + 3];
    for phrases in groups.values() {
        let n = phrases.len();
        let bin = if n < lo {
            0
        } else if n > hi {
            counts.len() - 1
        } else {
            n - lo + 1
        };
        counts[bin] += 1;
    }
    let mut labels = vec![format!("<{lo}")];
    labels.extend((lo..=hi).map(|n| n.to_string()));
    labels.push(format!(">{hi}"));
    Ok(Histogram::from_counts("assignments", labels, counts))
}

/// Percentage of responses occurring contiguously in their document.
pub fn extractive_fraction(responses: &[Response], documents: &Corpus) -> Result<f64> {
    if responses.is_empty() {
        return Err(Error::EmptyInput("responses"));
    }
    let mut hits = 0;
    for r in responses {
        if is_extractive(r, documents)? {
            hits += 1;
        }
    }
    Ok(percent(hits, responses.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstSentenceStats {
    /// Responses with an occurrence wholly inside their document's first body sentence.
    pub keyphrases_in_first_sentence: f64,
    /// Distinct body unigrams of each document that appear in its first
    /// sentence, pooled over documents.
    pub unique_terms_in_first_sentence: f64,
}

pub fn first_sentence_stats(responses: &[Response], documents: &Corpus) -> Result<FirstSentenceStats> {
    let mut in_lead = 0;
    for r in responses {
        let doc = documents.require(&r.doc_id)?;
        let Some(lead) = doc.first_sentence() else { continue };
        let len = r.phrase_tokens.len();
        if doc
            .occurrences(&r.phrase_tokens)
            .iter()
            .any(|&s| lead.contains_span(Span::new(s, s + len)))
        {
            in_lead += 1;
        }
    }
    let (mut lead_terms, mut all_terms) = (0, 0);
    for doc in &documents.documents {
        let terms = doc.terms();
        let body: BTreeSet<&str> = terms[doc.title_len..].iter().copied().collect();
        all_terms += body.len();
        if let Some(lead) = doc.first_sentence() {
            let lead: BTreeSet<&str> = terms[lead.start..lead.end].iter().copied().collect();
            lead_terms += lead.len();
        }
    }
    Ok(FirstSentenceStats {
        keyphrases_in_first_sentence: percent(in_lead, responses.len()),
        unique_terms_in_first_sentence: percent(lead_terms, all_terms),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrammarFractions {
    pub partial_np: f64,
    pub partial_vp: f64,
    pub partial_technical_term: f64,
    /// Unique (document, phrase) pairs the percentages are over.
    pub phrases: usize,
    /// Documents whose phrases were skipped for lack of annotations.
    pub skipped_documents: usize,
    pub skipped_phrases: usize,
}

/// Shares of unique extractive phrases that lie inside an NP chunk, a VP
/// chunk, or a technical term. One phrase may count toward several.
pub fn grammatical_category_fractions(extractive: &[Response], documents: &Corpus) -> Result<GrammarFractions> {
    let (mut np, mut vp, mut tech, mut phrases, mut skipped_phrases) = (0, 0, 0, 0, 0);
    let mut skipped_docs = BTreeSet::new();
    for (doc_id, tokens) in unique_phrases(extractive) {
        let doc = documents.require(doc_id)?;
        let Some(g) = grammatical_features(tokens, doc, None) else {
            skipped_docs.insert(doc_id);
            skipped_phrases += 1;
            continue;
        };
        phrases += 1;
        np += g.is_partial_np as usize;
        vp += g.is_partial_vp as usize;
        tech += g.is_partial_technical_term as usize;
    }
    if !skipped_docs.is_empty() {
        log::warn!("{} documents without annotations skipped", skipped_docs.len());
    }
    Ok(GrammarFractions {
        partial_np: percent(np, phrases),
        partial_vp: percent(vp, phrases),
        partial_technical_term: percent(tech, phrases),
        phrases,
        skipped_documents: skipped_docs.len(),
        skipped_phrases,
    })
}

pub const COMMONNESS_HISTOGRAM_BINS: usize = 20;

/// Commonness of the distinct response n-grams (pooled over documents) whose
/// background frequency is at least `min_freq_cutoff`.
pub fn commonness_histogram(
    responses: &[Response],
    index: &NgramIndex,
    min_freq_cutoff: u64,
    bins: usize,
) -> Result<Histogram> {
    let terms: BTreeSet<&[String]> = responses
        .iter()
        .map(|r| r.phrase_tokens.as_slice())
        .filter(|t| !t.is_empty())
        .collect();
    let mut counts = vec![0; bins];
    for term in terms {
        if index.tf(term) < min_freq_cutoff {
            continue;
        }
        counts[commonness_bin(commonness(term, index), bins)?] += 1;
    }
    let labels = (0..bins)
        .map(|b| {
            let close = if b + 1 == bins { ']' } else { ')' };
            format!("[{:.2},{:.2}{close}", b as f64 / bins as f64, (b + 1) as f64 / bins as f64)
        })
        .collect();
    Ok(Histogram::from_counts(format!("unique n-grams with tf_bg >= {min_freq_cutoff}"), labels, counts))
}

/// Every scalar statistic plus the populations of the histograms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub responses: usize,
    pub assignments: usize,
    pub extractive_percentage: f64,
    pub first_sentence: FirstSentenceStats,
    pub grammar: GrammarFractions,
    pub populations: BTreeMap<String, String>,
}
