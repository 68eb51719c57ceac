//! Documents, corpora and externally produced grammatical annotations.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{segment_sentences, tokenize, Span, Token};

/// Penn Treebank part-of-speech tags, including the punctuation tags.
pub const PENN_TAGS: &[&str] = &[
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP", "NNPS",
    "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG",
    "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB", "#", "$", ".", ",", ":", "``", "''", "-LRB-",
    "-RRB-", "HYPH",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Foreground,
    Background,
}

/// One title-plus-abstract unit. The title comes first, so title words take
/// positions `0..title_len`, and it always forms its own sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub body: String,
    /// `title`, a blank line, then `body`; token spans index into this.
    pub text: String,
    pub tokens: Vec<Token>,
    pub sentences: Vec<Span>,
    pub title_len: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<AnnotationLayer>,
}

impl Document {
    pub fn new(id: impl Into<String>, title: &str, body: &str) -> Self {
        let text = format!("{title}\n\n{body}");
        let body_offset = title.len() + 2;

        let mut tokens = tokenize(title);
        let mut sentences = segment_sentences(&tokens, title);
        let title_len = tokens.len();
        let body_tokens = tokenize(body);
        sentences.extend(segment_sentences(&body_tokens, body).iter().map(|s| s.shifted(title_len)));
        tokens.extend(body_tokens.into_iter().map(|mut t| {
            t.index += title_len;
            t.char_span = (t.char_span.0 + body_offset, t.char_span.1 + body_offset);
            t
        }));

        Document {
            id: id.into(),
            title: title.to_string(),
            body: body.to_string(),
            text,
            tokens,
            sentences,
            title_len,
            annotations: None,
        }
    }

    /// First line is the title, the remainder (leading blank lines skipped) the body.
    pub fn from_file_contents(id: impl Into<String>, contents: &str) -> Self {
        let contents = contents.strip_prefix('\u{feff}').unwrap_or(contents);
        let (title, body) = contents.split_once('\n').unwrap_or((contents, ""));
        Document::new(id, title.trim(), body.trim())
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn terms(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.lowercased.as_str()).collect()
    }

    pub fn title_terms(&self) -> Vec<&str> {
        self.terms()[..self.title_len].to_vec()
    }

    pub fn body_terms(&self) -> Vec<&str> {
        self.terms()[self.title_len..].to_vec()
    }

    /// The lead sentence of the abstract: the first sentence after the title,
    /// or the first sentence overall when the body is empty.
    pub fn first_sentence(&self) -> Option<Span> {
        self.sentences
            .iter()
            .find(|s| s.start >= self.title_len)
            .or_else(|| self.sentences.first())
            .copied()
    }

    pub fn sentence_of(&self, index: usize) -> Option<Span> {
        let pos = self.sentences.partition_point(|s| s.end <= index);
        self.sentences.get(pos).copied().filter(|s| s.contains(index))
    }

    /// Start positions of every contiguous occurrence of `phrase` (lowercased terms).
    pub fn occurrences<S: AsRef<str>>(&self, phrase: &[S]) -> Vec<usize> {
        find_all(&self.terms(), phrase)
    }

    pub fn contains_phrase<S: AsRef<str>>(&self, phrase: &[S]) -> bool {
        !self.occurrences(phrase).is_empty()
    }
}

pub(crate) fn find_all<S: AsRef<str>>(haystack: &[&str], needle: &[S]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return Vec::new();
    }
    (0..=haystack.len() - needle.len())
        .filter(|&i| needle.iter().zip(&haystack[i..]).all(|(n, h)| n.as_ref() == *h))
        .collect()
}

/// An immutable set of documents sorted by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub role: Role,
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn new(role: Role, mut documents: Vec<Document>) -> Self {
        documents.sort_by(|a, b| a.id.cmp(&b.id));
        Corpus { role, documents }
    }

    /// Loads every `<id>.txt` file in `dir`.
    pub fn load(dir: impl AsRef<Path>, role: Role) -> Result<Self> {
        let dir = dir.as_ref();
        let mut paths = Vec::new();
        for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
                paths.push(path);
            }
        }
        if paths.is_empty() {
            return Err(Error::EmptyCorpus(dir.to_path_buf()));
        }
        paths.sort();
        let documents = paths
            .iter()
            .map(|path| {
                let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
                let contents = String::from_utf8(bytes).map_err(|_| Error::NotUtf8 { path: path.clone() })?;
                let id = path.file_stem().unwrap_or_default().to_string_lossy();
                Ok(Document::from_file_contents(id, &contents))
            })
            .collect::<Result<Vec<_>>>()?;
        log::info!("loaded {} {:?} documents from {}", documents.len(), role, dir.display());
        Ok(Corpus::new(role, documents))
    }

    /// Number of documents, N.
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents
            .binary_search_by(|d| d.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.documents[i])
    }

    pub fn require(&self, id: &str) -> Result<&Document> {
        self.get(id).ok_or_else(|| Error::UnknownDocument(id.to_string()))
    }

    pub fn total_tokens(&self) -> usize {
        self.documents.iter().map(Document::token_count).sum()
    }

    /// Attaches `<id>.ann` from `dir` to each document that has one and
    /// returns the ids of documents left without annotations.
    pub fn attach_annotations(&mut self, dir: impl AsRef<Path>) -> Result<Vec<String>> {
        let dir = dir.as_ref();
        let mut missing = Vec::new();
        for doc in &mut self.documents {
            let path = dir.join(format!("{}.ann", doc.id));
            if !path.is_file() {
                missing.push(doc.id.clone());
                continue;
            }
            let layer = ingest_annotations(doc, &path)?;
            doc.annotations = Some(layer);
        }
        if !missing.is_empty() {
            log::warn!("{} documents have no annotation file", missing.len());
        }
        Ok(missing)
    }

    pub fn manifest(&self) -> CorpusManifest {
        CorpusManifest {
            role: self.role,
            documents: self.len(),
            total_tokens: self.total_tokens(),
            total_sentences: self.documents.iter().map(|d| d.sentences.len()).sum(),
            per_document: self
                .documents
                .iter()
                .map(|d| DocumentCounts {
                    id: d.id.clone(),
                    tokens: d.token_count(),
                    sentences: d.sentences.len(),
                    title_tokens: d.title_len,
                    np_chunks: d.annotations.as_ref().map(|a| a.np_chunks.len()),
                    vp_chunks: d.annotations.as_ref().map(|a| a.vp_chunks.len()),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub role: Role,
    pub documents: usize,
    pub total_tokens: usize,
    pub total_sentences: usize,
    pub per_document: Vec<DocumentCounts>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentCounts {
    pub id: String,
    pub tokens: usize,
    pub sentences: usize,
    pub title_tokens: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub np_chunks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vp_chunks: Option<usize>,
}

/// Part-of-speech tags and shallow NP/VP chunks for one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationLayer {
    pub pos_tags: Vec<String>,
    pub np_chunks: Vec<Span>,
    pub vp_chunks: Vec<Span>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ChunkKind {
    Np,
    Vp,
}

pub fn ingest_annotations(document: &Document, annotation_file: impl AsRef<Path>) -> Result<AnnotationLayer> {
    let path = annotation_file.as_ref();
    let contents = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    AnnotationLayer::parse(document, &contents)
}

impl AnnotationLayer {
    /// Parses `token<TAB>POS<TAB>chunk` lines; blank lines are ignored.
    pub fn parse(document: &Document, contents: &str) -> Result<Self> {
        let doc_id = &document.id;
        let mut rows = Vec::new();
        for (n, line) in contents.lines().enumerate() {
            let line_no = n + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::MalformedAnnotation {
                    doc_id: doc_id.clone(),
                    line: line_no,
                    message: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            }
            if !PENN_TAGS.contains(&fields[1]) {
                return Err(Error::UnknownPosTag {
                    doc_id: doc_id.clone(),
                    line: line_no,
                    tag: fields[1].to_string(),
                });
            }
            let chunk = match fields[2] {
                "O" => None,
                "B-NP" => Some((true, ChunkKind::Np)),
                "I-NP" => Some((false, ChunkKind::Np)),
                "B-VP" => Some((true, ChunkKind::Vp)),
                "I-VP" => Some((false, ChunkKind::Vp)),
                other => {
                    return Err(Error::MalformedAnnotation {
                        doc_id: doc_id.clone(),
                        line: line_no,
                        message: format!("unknown chunk label {other:?}"),
                    })
                }
            };
            rows.push((line_no, fields[0], fields[1], chunk));
        }

        if rows.len() != document.token_count() {
            return Err(Error::AnnotationLength {
                doc_id: doc_id.clone(),
                expected: document.token_count(),
                found: rows.len(),
            });
        }

        let mut layer = AnnotationLayer {
            pos_tags: Vec::with_capacity(rows.len()),
            np_chunks: Vec::new(),
            vp_chunks: Vec::new(),
        };
        let mut open: Option<(ChunkKind, usize)> = None;
        for (i, &(line_no, token, tag, chunk)) in rows.iter().enumerate() {
            if token.to_lowercase() != document.tokens[i].lowercased {
                return Err(Error::MalformedAnnotation {
                    doc_id: doc_id.clone(),
                    line: line_no,
                    message: format!("token {token:?} does not match document token {:?}", document.tokens[i].surface),
                });
            }
            layer.pos_tags.push(tag.to_string());
            let continues = matches!((chunk, open), (Some((false, kind)), Some((current, _))) if kind == current);
            if !continues {
                if let Some((kind, start)) = open.take() {
                    layer.push_chunk(kind, Span::new(start, i));
                }
                open = chunk.map(|(_, kind)| (kind, i));
            }
        }
        if let Some((kind, start)) = open {
            layer.push_chunk(kind, Span::new(start, rows.len()));
        }
        Ok(layer)
    }

    fn push_chunk(&mut self, kind: ChunkKind, span: Span) {
        match kind {
            ChunkKind::Np => self.np_chunks.push(span),
            ChunkKind::Vp => self.vp_chunks.push(span),
        }
    }

    pub fn tags(&self, span: Span) -> &[String] {
        &self.pos_tags[span.start..span.end]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(body: &str) -> Document {
        Document::new("d1", "", body)
    }

    #[test]
    fn title_precedes_body() {
        let d = Document::new("x", "Keyphrase Extraction", "We study keyphrases. They matter.");
        assert_eq!(d.title_len, 2);
        assert_eq!(d.terms(), ["keyphrase", "extraction", "we", "study", "keyphrases", "they", "matter"]);
        assert_eq!(d.sentences, [Span::new(0, 2), Span::new(2, 5), Span::new(5, 7)]);
        assert_eq!(d.first_sentence(), Some(Span::new(2, 5)));
        for t in &d.tokens {
            assert_eq!(&d.text[t.char_span.0..t.char_span.1], t.surface);
        }
    }

    #[test]
    fn first_sentence_without_body() {
        let d = Document::new("x", "Only a title", "");
        assert_eq!(d.first_sentence(), Some(Span::new(0, 3)));
        assert_eq!(Document::new("y", "", "").first_sentence(), None);
    }

    #[test]
    fn occurrences_are_contiguous() {
        let d = doc("a b a b c. A b");
        assert_eq!(d.occurrences(&["a", "b"]), [0, 2, 5]);
        assert_eq!(d.occurrences(&["b", "a", "b"]), [1]);
        assert!(d.occurrences::<&str>(&[]).is_empty());
        assert_eq!(d.sentence_of(4), Some(Span::new(0, 5)));
        assert_eq!(d.sentence_of(6), Some(Span::new(5, 7)));
        assert_eq!(d.sentence_of(7), None);
    }

    #[test]
    fn file_contents_split_title() {
        let d = Document::from_file_contents("x", "Title here\n\nBody text.\nMore body.");
        assert_eq!(d.title, "Title here");
        assert_eq!(d.body, "Body text.\nMore body.");
        let empty = Document::from_file_contents("e", "");
        assert_eq!(empty.token_count(), 0);
        assert!(empty.sentences.is_empty());
    }

    const FIVE: &str = "Fast\tJJ\tB-NP\nhash\tNN\tI-NP\ntables\tNNS\tI-NP\n\nscale\tVBP\tB-VP\nwell\tRB\tO\n";

    #[test]
    fn annotation_matching_length() {
        let d = doc("Fast hash tables. Scale well");
        let layer = AnnotationLayer::parse(&d, FIVE).unwrap();
        assert_eq!(layer.pos_tags, ["JJ", "NN", "NNS", "VBP", "RB"]);
        assert_eq!(layer.np_chunks, [Span::new(0, 3)]);
        assert_eq!(layer.vp_chunks, [Span::new(3, 4)]);
    }

    #[test]
    fn annotation_length_mismatch() {
        let d = doc("Fast hash tables. Scale well");
        let four: String = FIVE.lines().filter(|l| !l.is_empty()).take(4).map(|l| format!("{l}\n")).collect();
        match AnnotationLayer::parse(&d, &four) {
            Err(Error::AnnotationLength { doc_id, expected, found }) => {
                assert_eq!((doc_id.as_str(), expected, found), ("d1", 5, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn annotation_unknown_tag() {
        let d = doc("Fast hash tables. Scale well");
        let bad = FIVE.replace("RB", "ADV");
        let err = AnnotationLayer::parse(&d, &bad).unwrap_err();
        assert!(matches!(err, Error::UnknownPosTag { ref tag, .. } if tag == "ADV"));
        assert!(err.to_string().contains("ADV"));
    }

    #[test]
    fn chunks_restart_on_kind_change() {
        let d = doc("a b c d e");
        let ann = "a\tDT\tI-NP\nb\tNN\tI-NP\nc\tVBZ\tI-VP\nd\tNN\tB-NP\ne\tNN\tB-NP\n";
        let layer = AnnotationLayer::parse(&d, ann).unwrap();
        assert_eq!(layer.np_chunks, [Span::new(0, 2), Span::new(3, 4), Span::new(4, 5)]);
        assert_eq!(layer.vp_chunks, [Span::new(2, 3)]);
    }

    #[test]
    fn corpus_json_round_trip() {
        let corpus = Corpus::new(
            Role::Foreground,
            vec![Document::new("b", "T", "x y. Z"), Document::new("a", "", "one two")],
        );
        assert_eq!(corpus.documents[0].id, "a");
        let back = Corpus::from_json(&corpus.to_json().unwrap()).unwrap();
        assert_eq!(back, corpus);
        assert!(corpus.get("b").is_some());
        assert!(matches!(corpus.require("zz"), Err(Error::UnknownDocument(_))));
    }
}
