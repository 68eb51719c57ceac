//! Frequency and probabilistic term statistics measured against a background corpus.
//!
//! All logarithms are natural. Counts that would make a formula undefined
//! (a term missing from the background, an empty complement) are replaced by
//! the smoothing increment, so every statistic is finite.

use serde::{Deserialize, Serialize};

use crate::commonness::NgramIndex;
use crate::corpus::Document;
use crate::error::{Error, Result};

/// Raw counts for one term in one document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermStatistics {
    /// Occurrences of the term in the document.
    pub t_doc: f64,
    /// Occurrences of the term in the reference corpus.
    pub t_ref: f64,
    /// Words in the document.
    pub total_doc: f64,
    /// Words in the reference corpus.
    pub total_ref: f64,
    /// Documents in the reference corpus.
    pub n_docs: f64,
    /// Reference documents containing the term.
    pub doc_freq: f64,
    /// Average words per reference document.
    pub avg_doc_len: f64,
    /// Distinct terms of the same order in the document.
    pub vocab_doc: f64,
    /// Distinct terms of the same order in the complement (the reference corpus).
    pub vocab_notdoc: f64,
}

impl TermStatistics {
    /// Term count outside the document, clamped at zero since the document
    /// need not belong to the reference corpus.
    pub fn t_notdoc(&self) -> f64 {
        (self.t_ref - self.t_doc).max(0.0)
    }

    pub fn total_notdoc(&self) -> f64 {
        (self.total_ref - self.total_doc).max(0.0)
    }

    /// Document and complement term counts swapped with their totals and vocabularies.
    pub fn swapped(&self) -> TermStatistics {
        TermStatistics {
            t_doc: self.t_notdoc(),
            t_ref: self.t_ref,
            total_doc: self.total_notdoc(),
            total_ref: self.total_ref,
            vocab_doc: self.vocab_notdoc,
            vocab_notdoc: self.vocab_doc,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyFeatureConfig {
    pub bm25_k1: f64,
    pub bm25_b: f64,
    pub smoothing_increment: f64,
}

impl Default for FrequencyFeatureConfig {
    fn default() -> Self {
        FrequencyFeatureConfig {
            bm25_k1: 2.0,
            bm25_b: 0.75,
            smoothing_increment: 0.01,
        }
    }
}

impl FrequencyFeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bm25_k1 > 0.0) || !(0.0..=1.0).contains(&self.bm25_b) || !(self.smoothing_increment > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need k1 > 0, 0 <= b <= 1 and a positive smoothing increment, got {self:?}"
            )));
        }
        Ok(())
    }

    fn positive(&self, x: f64) -> f64 {
        if x > 0.0 {
            x
        } else {
            self.smoothing_increment
        }
    }

    fn idf(&self, stats: &TermStatistics) -> f64 {
        (self.positive(stats.n_docs) / self.positive(stats.doc_freq)).ln()
    }
}

/// ln(t_doc), with 0 standing in for a term absent from the document.
pub fn log_tf(stats: &TermStatistics) -> f64 {
    if stats.t_doc >= 1.0 {
        stats.t_doc.ln()
    } else {
        0.0
    }
}

/// Reference-relative tf.idf: (t_doc / t_ref) ln(N / D).
pub fn tf_idf(stats: &TermStatistics, config: &FrequencyFeatureConfig) -> f64 {
    if stats.t_doc == 0.0 {
        return 0.0;
    }
    stats.t_doc / config.positive(stats.t_ref) * config.idf(stats)
}

/// Dunning's log-likelihood ratio comparing the term's rate in the document
/// with its rate in the complement, both measured against the reference rate.
pub fn g_squared(stats: &TermStatistics, config: &FrequencyFeatureConfig) -> f64 {
    let t_ref = config.positive(stats.t_ref);
    let total_ref = config.positive(stats.total_ref);
    let cell = |observed: f64, total: f64| {
        if observed <= 0.0 {
            0.0
        } else {
            observed * (observed * total_ref / (config.positive(total) * t_ref)).ln()
        }
    };
    2.0 * (cell(stats.t_doc, stats.total_doc) + cell(stats.t_notdoc(), stats.total_notdoc()))
}

/// BM25 with the reference idf: ((k1+1) t) / (t + k1 (1 - b + b T_doc / r)) ln(N / D).
pub fn bm25(stats: &TermStatistics, config: &FrequencyFeatureConfig) -> f64 {
    if stats.t_doc == 0.0 {
        return 0.0;
    }
    let k1 = config.bm25_k1;
    let b = config.bm25_b;
    let norm = 1.0 - b + b * stats.total_doc / config.positive(stats.avg_doc_len);
    (k1 + 1.0) * stats.t_doc / (stats.t_doc + k1 * norm) * config.idf(stats)
}

/// Smoothed log-odds of the term in the document versus the complement,
/// divided by its approximate standard error. Each term frequency gains the
/// increment, and each total gains increment x vocabulary so totals stay
/// equal to the summed smoothed frequencies.
pub fn weighted_log_odds(stats: &TermStatistics, config: &FrequencyFeatureConfig) -> f64 {
    let eps = config.smoothing_increment;
    let t_doc = stats.t_doc + eps;
    let t_notdoc = stats.t_notdoc() + eps;
    let total_doc = stats.total_doc + eps * stats.vocab_doc.max(1.0);
    let total_notdoc = stats.total_notdoc() + eps * stats.vocab_notdoc.max(1.0);
    ((t_doc / t_notdoc).ln() - (total_doc / total_notdoc).ln()) / (1.0 / t_doc + 1.0 / t_notdoc).sqrt()
}

pub const FREQUENCY_FEATURES: [&str; 5] = ["log_tf", "tf_idf", "g2", "bm25", "log_odds"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyFeatures {
    pub log_tf: f64,
    pub tf_idf: f64,
    pub g2: f64,
    pub bm25: f64,
    pub log_odds: f64,
}

impl FrequencyFeatures {
    pub fn from_stats(stats: &TermStatistics, config: &FrequencyFeatureConfig) -> Self {
        FrequencyFeatures {
            log_tf: log_tf(stats),
            tf_idf: tf_idf(stats, config),
            g2: g_squared(stats, config),
            bm25: bm25(stats, config),
            log_odds: weighted_log_odds(stats, config),
        }
    }

    pub fn values(&self) -> [f64; 5] {
        [self.log_tf, self.tf_idf, self.g2, self.bm25, self.log_odds]
    }
}

/// Per-document counts reused across all terms of that document.
#[derive(Debug, Clone)]
pub struct DocumentProfile<'d> {
    doc: &'d Document,
    terms: Vec<&'d str>,
    /// Distinct sentence-internal n-grams per order, index 0 = unigrams.
    vocab: Vec<usize>,
}

impl<'d> DocumentProfile<'d> {
    pub fn new(doc: &'d Document, n_max: usize) -> Self {
        let terms = doc.terms();
        let mut seen: Vec<std::collections::HashSet<&[&str]>> = vec![Default::default(); n_max];
        for s in &doc.sentences {
            for start in s.start..s.end {
                for n in 1..=n_max.min(s.end - start) {
                    seen[n - 1].insert(&terms[start..start + n]);
                }
            }
        }
        let vocab = seen.iter().map(|s| s.len()).collect();
        DocumentProfile { doc, terms, vocab }
    }

    pub fn document(&self) -> &'d Document {
        self.doc
    }

    pub fn occurrences<S: AsRef<str>>(&self, phrase: &[S]) -> Vec<usize> {
        crate::corpus::find_all(&self.terms, phrase)
    }

    pub fn vocab(&self, order: usize) -> usize {
        order.checked_sub(1).and_then(|i| self.vocab.get(i)).copied().unwrap_or(0)
    }

    pub fn term_statistics<S: AsRef<str>>(&self, term: &[S], index: &NgramIndex) -> TermStatistics {
        let joined = term.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
        let counts = index.counts(term.len(), &joined);
        TermStatistics {
            t_doc: self.occurrences(term).len() as f64,
            t_ref: counts.map_or(0, |c| c.tf) as f64,
            total_doc: self.terms.len() as f64,
            total_ref: index.total_tokens as f64,
            n_docs: index.n_docs as f64,
            doc_freq: counts.map_or(0, |c| c.df) as f64,
            avg_doc_len: index.avg_doc_len(),
            vocab_doc: self.vocab(term.len()) as f64,
            vocab_notdoc: index.vocab(term.len()) as f64,
        }
    }
}

pub fn frequency_feature_vector<S: AsRef<str>>(
    term: &[S],
    profile: &DocumentProfile<'_>,
    index: &NgramIndex,
    config: &FrequencyFeatureConfig,
) -> FrequencyFeatures {
    FrequencyFeatures::from_stats(&profile.term_statistics(term, index), config)
}
