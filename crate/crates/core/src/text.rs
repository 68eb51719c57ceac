//! Tokenization and rule-based sentence segmentation.

use serde::{Deserialize, Serialize};

/// Half-open range of token indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// True when `other` lies entirely inside `self`.
    pub fn contains_span(&self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn contains(&self, index: usize) -> bool {
        self.start <= index && index < self.end
    }

    pub fn shifted(&self, offset: usize) -> Span {
        Span::new(self.start + offset, self.end + offset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lowercased: String,
    /// Byte offsets into the source text.
    pub char_span: (usize, usize),
    pub index: usize,
}

/// Splits `text` into maximal alphanumeric runs. A hyphen between two
/// alphanumeric characters stays inside the token, so "multi-agent" is one
/// word; all other punctuation separates tokens and is dropped.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].1.is_alphanumeric() {
            i += 1;
            continue;
        }
        let start = chars[i].0;
        let mut j = i + 1;
        while j < chars.len() {
            let c = chars[j].1;
            if c.is_alphanumeric() {
                j += 1;
            } else if c == '-' && j + 1 < chars.len() && chars[j + 1].1.is_alphanumeric() {
                j += 2;
            } else {
                break;
            }
        }
        let end = chars.get(j).map_or(text.len(), |&(b, _)| b);
        let surface = &text[start..end];
        tokens.push(Token {
            surface: surface.to_string(),
            lowercased: surface.to_lowercase(),
            char_span: (start, end),
            index: tokens.len(),
        });
        i = j;
    }
    tokens
}

/// Words that end in a period without ending the sentence. Compared
/// case-insensitively against the whitespace-delimited word carrying the period.
pub const ABBREVIATIONS: &[&str] = &["e.g.", "i.e.", "et al.", "fig.", "vs.", "cf.", "dr.", "no."];

const TERMINATORS: &[char] = &['.', '!', '?'];
const CLOSERS: &[char] = &[')', ']', '"', '\'', '\u{201d}', '\u{2019}'];
const OPENERS: &[char] = &['(', '[', '"', '\'', '\u{201c}', '\u{2018}'];

/// Partitions `tokens` (produced by [`tokenize`] on `text`) into sentences.
///
/// A boundary falls between two tokens when the text between them holds a
/// sentence terminator followed by whitespace, the period does not close a
/// known abbreviation, and the next token does not start with a lowercase letter.
pub fn segment_sentences(tokens: &[Token], text: &str) -> Vec<Span> {
    let mut spans = Vec::new();
    if tokens.is_empty() {
        return spans;
    }
    let mut start = 0;
    for i in 0..tokens.len() - 1 {
        let gap_start = tokens[i].char_span.1;
        let gap = &text[gap_start..tokens[i + 1].char_span.0];
        let next_lower = tokens[i + 1].surface.chars().next().is_some_and(char::is_lowercase);
        if !next_lower && ends_sentence(text, gap_start, gap) {
            spans.push(Span::new(start, i + 1));
            start = i + 1;
        }
    }
    spans.push(Span::new(start, tokens.len()));
    spans
}

fn ends_sentence(text: &str, gap_start: usize, gap: &str) -> bool {
    let chars: Vec<(usize, char)> = gap.char_indices().collect();
    for (k, &(offset, c)) in chars.iter().enumerate() {
        if !TERMINATORS.contains(&c) {
            continue;
        }
        // only closers or further terminators may sit between it and whitespace
        let followed_by_space = chars[k + 1..]
            .iter()
            .map(|&(_, c)| c)
            .find(|c| !CLOSERS.contains(c) && !TERMINATORS.contains(c))
            .is_some_and(char::is_whitespace);
        if !followed_by_space {
            continue;
        }
        if c == '.' && is_abbreviation(text, gap_start + offset) {
            continue;
        }
        return true;
    }
    false
}

/// `period` is the byte offset of a '.' in `text`.
fn is_abbreviation(text: &str, period: usize) -> bool {
    let before = &text[..=period];
    let word_start = before.rfind(char::is_whitespace).map_or(0, |p| p + 1);
    let word = before[word_start..].trim_start_matches(OPENERS).to_lowercase();
    if ABBREVIATIONS.contains(&word.as_str()) {
        return true;
    }
    if word == "al." {
        let previous = before[..word_start].trim_end();
        let prev_start = previous.rfind(char::is_whitespace).map_or(0, |p| p + 1);
        return previous[prev_start..].trim_start_matches(OPENERS).eq_ignore_ascii_case("et");
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn strips_punctuation() {
        assert_eq!(surfaces("Distributed systems."), ["Distributed", "systems"]);
        assert!(tokenize("").is_empty());
        assert!(tokenize(" ,.; ").is_empty());
    }

    #[test]
    fn hyphenated_words_stay_whole() {
        assert_eq!(surfaces("state-of-the-art query"), ["state-of-the-art", "query"]);
        assert_eq!(surfaces("multi-agent -- systems-"), ["multi-agent", "systems"]);
        assert_eq!(surfaces("a - b"), ["a", "b"]);
    }

    #[test]
    fn spans_and_case() {
        let text = "Über Größe, NP-hard";
        let tokens = tokenize(text);
        for (i, t) in tokens.iter().enumerate() {
            assert_eq!(&text[t.char_span.0..t.char_span.1], t.surface);
            assert_eq!(t.lowercased, t.surface.to_lowercase());
            assert_eq!(t.index, i);
        }
        assert_eq!(tokens[2].lowercased, "np-hard");
    }

    fn sentences(text: &str) -> Vec<(usize, usize)> {
        segment_sentences(&tokenize(text), text).into_iter().map(|s| (s.start, s.end)).collect()
    }

    #[test]
    fn plain_sentences() {
        assert_eq!(sentences("A b. C d."), [(0, 2), (2, 4)]);
        assert_eq!(sentences("One sentence"), [(0, 2)]);
        assert!(sentences("").is_empty());
    }

    #[test]
    fn abbreviations_do_not_split() {
        // neither period of "e.g." ends a sentence
        assert_eq!(sentences("e.g. we run. Done."), [(0, 4), (4, 5)]);
        assert_eq!(sentences("As in Smith et al. We agree. Yes"), [(0, 7), (7, 8)]);
        assert_eq!(sentences("See Fig. 3 for details. The end"), [(0, 5), (5, 7)]);
    }

    #[test]
    fn capitalization_and_closers() {
        assert_eq!(sentences("it ends. but continues"), [(0, 4)]);
        assert_eq!(sentences("It works (really.) Then"), [(0, 3), (3, 4)]);
        assert_eq!(sentences("Why? Because! 3 cases"), [(0, 1), (1, 2), (2, 4)]);
        assert_eq!(sentences("version 2.5 released"), [(0, 4)]);
    }
}
