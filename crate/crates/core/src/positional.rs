//! Where and how often a phrase occurs in its document.

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::text::Span;

pub const POSITIONAL_FEATURES: [&str; 3] = ["abs_first_occurrence", "rel_first_occurrence", "in_first_sentence"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionalFeatures {
    pub absolute_first_occurrence: f64,
    pub relative_first_occurrence: f64,
    pub in_first_sentence: bool,
    pub occurrence_count: usize,
}

impl PositionalFeatures {
    /// Values for a phrase that never occurs: as late as possible, never in
    /// the first sentence.
    pub const ABSENT: PositionalFeatures = PositionalFeatures {
        absolute_first_occurrence: 1.0,
        relative_first_occurrence: 0.0,
        in_first_sentence: false,
        occurrence_count: 0,
    };

    /// Features from the sorted start positions of a phrase's occurrences.
    pub fn from_occurrences(occurrences: &[usize], phrase_len: usize, document: &Document) -> Self {
        let Some(&first) = occurrences.first() else {
            return PositionalFeatures::ABSENT;
        };
        let a = first as f64 / document.token_count() as f64;
        let k = occurrences.len();
        let lead = document.first_sentence();
        PositionalFeatures {
            absolute_first_occurrence: a,
            relative_first_occurrence: relative_first_occurrence(a, k),
            in_first_sentence: lead.is_some_and(|s| {
                occurrences
                    .iter()
                    .any(|&start| s.contains_span(Span::new(start, start + phrase_len)))
            }),
            occurrence_count: k,
        }
    }

    pub fn values(&self) -> [f64; 3] {
        [
            self.absolute_first_occurrence,
            self.relative_first_occurrence,
            if self.in_first_sentence { 1.0 } else { 0.0 },
        ]
    }
}

pub fn positional_features<S: AsRef<str>>(phrase: &[S], document: &Document) -> PositionalFeatures {
    PositionalFeatures::from_occurrences(&document.occurrences(phrase), phrase.len(), document)
}

/// Word index of the first occurrence over the document length; `None` when absent.
pub fn absolute_first_occurrence<S: AsRef<str>>(phrase: &[S], document: &Document) -> Option<f64> {
    let first = *document.occurrences(phrase).first()?;
    Some(first as f64 / document.token_count() as f64)
}

/// (1 - a)^k.
pub fn relative_first_occurrence(a: f64, k: usize) -> f64 {
    (1.0 - a).powi(k as i32)
}

pub fn in_first_sentence<S: AsRef<str>>(phrase: &[S], document: &Document) -> bool {
    positional_features(phrase, document).in_first_sentence
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hundred() -> Document {
        let body: Vec<String> = (0..100).map(|i| format!("w{i}")).collect();
        Document::new("d", "", &body.join(" "))
    }

    #[test]
    fn absolute_positions() {
        let d = hundred();
        assert_eq!(absolute_first_occurrence(&["w0"], &d), Some(0.0));
        assert_eq!(absolute_first_occurrence(&["w50", "w51"], &d), Some(0.5));
        assert_eq!(absolute_first_occurrence(&["nope"], &d), None);
    }

    #[test]
    fn relative_values() {
        assert_eq!(relative_first_occurrence(0.0, 7), 1.0);
        assert_eq!(relative_first_occurrence(0.5, 2), 0.25);
        assert_relative_eq!(relative_first_occurrence(0.9, 10), 1e-10, max_relative = 1e-9);
    }

    #[test]
    fn first_sentence_containment() {
        let d = Document::new("d", "A Title", "Alpha beta gamma. Delta beta. Epsilon zeta. Eta theta.");
        assert!(in_first_sentence(&["beta"], &d));
        assert!(!in_first_sentence(&["eta", "theta"], &d));
        // straddles the first/second sentence boundary
        assert!(!in_first_sentence(&["gamma", "delta"], &d));
        // title words are not part of the lead sentence
        assert!(!in_first_sentence(&["title"], &d));
    }

    #[test]
    fn absent_sentinel() {
        let d = hundred();
        assert_eq!(positional_features(&["missing"], &d), PositionalFeatures::ABSENT);
        let f = positional_features(&["w10"], &d);
        assert_eq!(f.occurrence_count, 1);
        assert_relative_eq!(f.relative_first_occurrence, 0.9);
    }
}
