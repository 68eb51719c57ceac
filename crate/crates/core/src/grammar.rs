//! Binary grammatical features from POS tags and NP/VP chunks, including the
//! technical-term pattern grammar:
//!
//! ```text
//! T = (A|N)+ (N|C) | N
//! X = (A|N)* N of (T|C) | T
//! ```
//!
//! with A = {JJ, JJR, JJS}, N = {NN, NNS, NNP, NNPS}, C = {CD} and `of` the
//! literal (lowercased) word.

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotationLayer, Document};
use crate::text::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagClass {
    Adjective,
    Noun,
    Cardinal,
    Other,
}

impl TagClass {
    pub fn of(tag: &str) -> TagClass {
        match tag {
            "JJ" | "JJR" | "JJS" => TagClass::Adjective,
            "NN" | "NNS" | "NNP" | "NNPS" => TagClass::Noun,
            "CD" => TagClass::Cardinal,
            _ => TagClass::Other,
        }
    }

    fn is_modifier(self) -> bool {
        matches!(self, TagClass::Adjective | TagClass::Noun)
    }
}

fn classes<S: AsRef<str>>(tags: &[S]) -> Vec<TagClass> {
    tags.iter().map(|t| TagClass::of(t.as_ref())).collect()
}

fn technical(classes: &[TagClass]) -> bool {
    match classes {
        [] => false,
        [single] => *single == TagClass::Noun,
        [head @ .., last] => {
            head.iter().all(|c| c.is_modifier()) && matches!(last, TagClass::Noun | TagClass::Cardinal)
        }
    }
}

/// Whole-sequence match against `T = (A|N)+ (N|C) | N`.
pub fn match_technical_term<S: AsRef<str>>(pos_sequence: &[S]) -> bool {
    technical(&classes(pos_sequence))
}

fn compound<S: AsRef<str>>(words: &[S], classes: &[TagClass]) -> bool {
    if technical(classes) {
        return true;
    }
    // X = (A|N)* N of (T|C): try every "of" as the pivot
    (1..classes.len().saturating_sub(1)).any(|pivot| {
        words[pivot].as_ref().eq_ignore_ascii_case("of")
            && classes[..pivot].iter().all(|c| c.is_modifier())
            && classes[pivot - 1] == TagClass::Noun
            && match &classes[pivot + 1..] {
                [TagClass::Cardinal] => true,
                rest => technical(rest),
            }
    })
}

/// Whole-sequence match against `X = (A|N)* N of (T|C) | T`. `words` and
/// `tags` are parallel.
pub fn match_compound_technical_term<W: AsRef<str>, S: AsRef<str>>(words: &[W], tags: &[S]) -> bool {
    assert_eq!(words.len(), tags.len(), "words and tags must be parallel");
    compound(words, &classes(tags))
}

/// Spans inside `within` matching the predicate that no other matching span
/// inside `within` strictly contains.
fn maximal_matches(within: Span, mut matches: impl FnMut(Span) -> bool) -> Vec<Span> {
    let mut found: Vec<Span> = Vec::new();
    // longest first, so any container of a span is examined before it
    for len in (1..=within.len()).rev() {
        for start in within.start..=within.end - len {
            let span = Span::new(start, start + len);
            if !found.iter().any(|f| f.contains_span(span)) && matches(span) {
                found.push(span);
            }
        }
    }
    found.sort();
    found
}

/// Maximal technical-term and compound-technical-term matches per sentence
/// of one annotated document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermSpans {
    pub technical: Vec<Span>,
    pub compound: Vec<Span>,
}

impl TermSpans {
    pub fn for_document(document: &Document, layer: &AnnotationLayer) -> Self {
        let words = document.terms();
        let classes = classes(&layer.pos_tags);
        let mut out = TermSpans::default();
        for &sentence in &document.sentences {
            out.technical
                .extend(maximal_matches(sentence, |s| technical(&classes[s.start..s.end])));
            out.compound.extend(maximal_matches(sentence, |s| {
                compound(&words[s.start..s.end], &classes[s.start..s.end])
            }));
        }
        out
    }

    /// Maximal matches in one tagged sentence.
    pub fn for_sentence<W: AsRef<str>, S: AsRef<str>>(words: &[W], tags: &[S]) -> Self {
        assert_eq!(words.len(), tags.len(), "words and tags must be parallel");
        let classes = classes(tags);
        let all = Span::new(0, words.len());
        TermSpans {
            technical: maximal_matches(all, |s| technical(&classes[s.start..s.end])),
            compound: maximal_matches(all, |s| compound(&words[s.start..s.end], &classes[s.start..s.end])),
        }
    }
}

pub const PARSE_FEATURES: [&str; 6] = [
    "is_full_np",
    "is_full_vp",
    "is_partial_np",
    "is_partial_vp",
    "is_optional_leading_word",
    "is_head_noun",
];

pub const POS_FEATURES: [&str; 4] = [
    "is_technical_term",
    "is_compound_technical_term",
    "is_partial_technical_term",
    "is_partial_compound_technical_term",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarFeatures {
    pub is_full_np: bool,
    pub is_full_vp: bool,
    pub is_partial_np: bool,
    pub is_partial_vp: bool,
    pub is_optional_leading_word: bool,
    pub is_head_noun: bool,
    pub is_technical_term: bool,
    pub is_compound_technical_term: bool,
    pub is_partial_technical_term: bool,
    pub is_partial_compound_technical_term: bool,
}

impl GrammarFeatures {
    /// Features of the token span `span` of `document`.
    ///
    /// Full NP/VP means the span equals a chunk; partial means a chunk contains
    /// it. The optional-leading-word flag needs a CD/DT/PDT first word that
    /// also opens an NP chunk, and the head-noun flag needs the last word to
    /// close one. Partial technical flags hold when the span matches the
    /// pattern itself or lies inside a maximal match in its sentence.
    pub fn compute(span: Span, document: &Document, layer: &AnnotationLayer, term_spans: &TermSpans) -> Self {
        if span.is_empty() || span.end > layer.pos_tags.len() {
            return GrammarFeatures::default();
        }
        let words = &document.terms()[span.start..span.end];
        let tags = layer.tags(span);
        let chunk_flags = |chunks: &[Span]| {
            (
                chunks.contains(&span),
                chunks.iter().any(|c| c.contains_span(span)),
            )
        };
        let (is_full_np, is_partial_np) = chunk_flags(&layer.np_chunks);
        let (is_full_vp, is_partial_vp) = chunk_flags(&layer.vp_chunks);
        let is_optional_leading_word = matches!(tags[0].as_str(), "CD" | "DT" | "PDT")
            && layer.np_chunks.iter().any(|c| c.start == span.start);
        let is_head_noun = layer.np_chunks.iter().any(|c| c.end == span.end);
        let is_technical_term = match_technical_term(tags);
        let is_compound_technical_term = match_compound_technical_term(words, tags);
        let inside = |spans: &[Span]| spans.iter().any(|s| s.contains_span(span));

        GrammarFeatures {
            is_full_np,
            is_full_vp,
            is_partial_np,
            is_partial_vp,
            is_optional_leading_word,
            is_head_noun,
            is_technical_term,
            is_compound_technical_term,
            is_partial_technical_term: is_technical_term || inside(&term_spans.technical),
            is_partial_compound_technical_term: is_compound_technical_term || inside(&term_spans.compound),
        }
    }

    /// Parse-tree-based features first, then the four pattern features.
    pub fn values(&self) -> [bool; 10] {
        [
            self.is_full_np,
            self.is_full_vp,
            self.is_partial_np,
            self.is_partial_vp,
            self.is_optional_leading_word,
            self.is_head_noun,
            self.is_technical_term,
            self.is_compound_technical_term,
            self.is_partial_technical_term,
            self.is_partial_compound_technical_term,
        ]
    }
}

/// Grammatical features for the first occurrence of `phrase` in `document`,
/// or `None` when the document has no annotation layer. A phrase that does
/// not occur gets all-zero features.
pub fn grammatical_features<S: AsRef<str>>(
    phrase: &[S],
    document: &Document,
    term_spans: Option<&TermSpans>,
) -> Option<GrammarFeatures> {
    let layer = document.annotations.as_ref()?;
    let owned;
    let term_spans = match term_spans {
        Some(t) => t,
        None => {
            owned = TermSpans::for_document(document, layer);
            &owned
        }
    };
    let Some(&start) = document.occurrences(phrase).first() else {
        return Some(GrammarFeatures::default());
    };
    Some(GrammarFeatures::compute(
        Span::new(start, start + phrase.len()),
        document,
        layer,
        term_spans,
    ))
}
