//! Direct, deliberately naive reimplementations used as test oracles.

use std::collections::BTreeSet;

use keyphrase_core::{Document, TermStatistics};
use regex::Regex;

const EPS: f64 = 0.01;

fn or_eps(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        EPS
    }
}

pub fn log_tf(s: &TermStatistics) -> f64 {
    if s.t_doc > 0.0 {
        s.t_doc.ln()
    } else {
        0.0
    }
}

pub fn tf_idf(s: &TermStatistics) -> f64 {
    if s.t_doc == 0.0 {
        return 0.0;
    }
    let tf = s.t_doc / or_eps(s.t_ref);
    let idf = or_eps(s.n_docs).ln() - or_eps(s.doc_freq).ln();
    tf * idf
}

/// 2 * sum O ln(O / E) over the document and complement cells, with the
/// expectation taken from the reference rate.
pub fn g_squared(s: &TermStatistics) -> f64 {
    let rate = or_eps(s.t_ref) / or_eps(s.total_ref);
    let t_nd = (s.t_ref - s.t_doc).max(0.0);
    let total_nd = (s.total_ref - s.total_doc).max(0.0);
    let mut g = 0.0;
    for (observed, total) in [(s.t_doc, s.total_doc), (t_nd, total_nd)] {
        if observed > 0.0 {
            let expected = or_eps(total) * rate;
            g += observed * (observed.ln() - expected.ln());
        }
    }
    2.0 * g
}

pub fn bm25(s: &TermStatistics) -> f64 {
    let (k1, b) = (2.0, 0.75);
    if s.t_doc == 0.0 {
        return 0.0;
    }
    let idf = (or_eps(s.n_docs) / or_eps(s.doc_freq)).ln();
    let length_norm = (1.0 - b) + b * (s.total_doc / or_eps(s.avg_doc_len));
    idf * s.t_doc * (k1 + 1.0) / (s.t_doc + k1 * length_norm)
}

pub fn weighted_log_odds(s: &TermStatistics) -> f64 {
    let a = s.t_doc + EPS;
    let c = (s.t_ref - s.t_doc).max(0.0) + EPS;
    let big_a = s.total_doc + EPS * s.vocab_doc.max(1.0);
    let big_c = (s.total_ref - s.total_doc).max(0.0) + EPS * s.vocab_notdoc.max(1.0);
    let delta = (a / big_a).ln() - (c / big_c).ln();
    let variance = 1.0 / a + 1.0 / c;
    delta / variance.sqrt()
}

/// Pattern oracle over a two-character encoding per token: tag class, then
/// `o` when the word is "of" and `w` otherwise.
pub struct GrammarOracle {
    technical: Regex,
    compound: Regex,
}

impl GrammarOracle {
    pub fn new() -> Self {
        let t = r"(?:(?:[AN].)+[NC].|N.)";
        GrammarOracle {
            technical: Regex::new(&format!("^{t}$")).unwrap(),
            compound: Regex::new(&format!(r"^(?:(?:[AN].)*N..o(?:{t}|C.)|{t})$")).unwrap(),
        }
    }

    fn encode(words: &[&str], tags: &[&str]) -> String {
        words
            .iter()
            .zip(tags)
            .map(|(w, t)| {
                let class = match *t {
                    "JJ" | "JJR" | "JJS" => 'A',
                    "NN" | "NNS" | "NNP" | "NNPS" => 'N',
                    "CD" => 'C',
                    _ => 'x',
                };
                let word = if w.eq_ignore_ascii_case("of") { 'o' } else { 'w' };
                format!("{class}{word}")
            })
            .collect()
    }

    pub fn technical(&self, words: &[&str], tags: &[&str]) -> bool {
        self.technical.is_match(&Self::encode(words, tags))
    }

    pub fn compound(&self, words: &[&str], tags: &[&str]) -> bool {
        self.compound.is_match(&Self::encode(words, tags))
    }
}

/// Every sentence-internal n-gram with 1 <= n <= n_max, as a set.
pub fn ngrams(doc: &Document, n_max: usize) -> BTreeSet<Vec<String>> {
    let terms: Vec<String> = doc.tokens.iter().map(|t| t.lowercased.clone()).collect();
    let mut out = BTreeSet::new();
    for s in &doc.sentences {
        for i in s.start..s.end {
            for j in i + 1..=s.end {
                if j - i <= n_max {
                    out.insert(terms[i..j].to_vec());
                }
            }
        }
    }
    out
}

/// Whether `needle` occurs contiguously in `haystack`, by exhaustive comparison.
pub fn contains(haystack: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

/// (threshold, recall, precision) for every distinct score, descending,
/// recomputing the confusion counts from scratch at each threshold.
pub fn pr_sweep(scores: &[f64], labels: &[bool]) -> Vec<(f64, f64, f64)> {
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let positives = labels.iter().filter(|&&l| l).count() as f64;
    thresholds
        .into_iter()
        .map(|t| {
            let mut tp = 0.0;
            let mut predicted = 0.0;
            for (s, l) in scores.iter().zip(labels) {
                if *s >= t {
                    predicted += 1.0;
                    if *l {
                        tp += 1.0;
                    }
                }
            }
            (t, tp / positives, tp / predicted)
        })
        .collect()
}

pub fn trapezoid_auc(points: &[(f64, f64, f64)]) -> f64 {
    let mut area = 0.0;
    let (mut prev_r, mut prev_p) = (0.0, points.first().map_or(0.0, |p| p.2));
    for &(_, r, p) in points {
        area += (r - prev_r) * (p + prev_p) * 0.5;
        prev_r = r;
        prev_p = p;
    }
    area
}

/// Central finite differences of `f` at `x`.
pub fn numeric_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[i] += h;
            down[i] -= h;
            (f(&up) - f(&down)) / (2.0 * h)
        })
        .collect()
}
