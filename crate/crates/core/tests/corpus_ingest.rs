mod common;

use common::{as_usize, expected, fixtures, foreground};
use keyphrase_core::corpus::AnnotationLayer;
use keyphrase_core::text::segment_sentences;
use keyphrase_core::{tokenize, Corpus, Document, Error, Role};
use proptest::prelude::*;

#[test]
fn hyphenated_compound_stays_whole() {
    let words: Vec<String> = tokenize("state-of-the-art query").into_iter().map(|t| t.surface).collect();
    assert_eq!(words, ["state-of-the-art", "query"]);
    let dangling: Vec<String> = tokenize("pre- and post-processing -x").into_iter().map(|t| t.surface).collect();
    assert_eq!(dangling, ["pre", "and", "post-processing", "x"]);
}

#[test]
fn fixture_counts_match_manifest() {
    let corpus = foreground();
    let want = &expected()["documents"];
    let manifest = corpus.manifest();
    assert_eq!(manifest.documents, 10);
    for d in &manifest.per_document {
        let w = &want[d.id.as_str()];
        assert_eq!(d.tokens, as_usize(&w["tokens"]), "{}", d.id);
        assert_eq!(d.sentences, as_usize(&w["sentences"]), "{}", d.id);
        assert_eq!(d.title_tokens, as_usize(&w["title_tokens"]), "{}", d.id);
        assert_eq!(d.np_chunks, Some(as_usize(&w["np_chunks"])), "{}", d.id);
        assert_eq!(d.vp_chunks, Some(as_usize(&w["vp_chunks"])), "{}", d.id);
    }
    let background = common::background();
    assert_eq!(background.len(), as_usize(&expected()["background"]["documents"]));
    assert_eq!(background.total_tokens(), as_usize(&expected()["background"]["tokens"]));
}

#[test]
fn load_is_sorted_and_rejects_empty_dirs() {
    let corpus = foreground();
    let ids: Vec<&str> = corpus.documents.iter().map(|d| d.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    let empty = tempfile::tempdir().unwrap();
    assert!(matches!(Corpus::load(empty.path(), Role::Foreground), Err(Error::EmptyCorpus(_))));
}

#[test]
fn truncated_annotation_is_rejected() {
    let corpus = Corpus::load(fixtures().join("foreground"), Role::Foreground).unwrap();
    let doc = corpus.get("d03").unwrap();
    let text = std::fs::read_to_string(fixtures().join("annotations/d03.ann")).unwrap();
    let cut: String = text.lines().filter(|l| !l.is_empty()).skip(1).map(|l| format!("{l}\n")).collect();
    match AnnotationLayer::parse(doc, &cut) {
        Err(Error::AnnotationLength { expected, found, .. }) => assert_eq!(found + 1, expected),
        other => panic!("unexpected {other:?}"),
    }
    let bad_tag = text.replacen("\tNNS\t", "\tNOUN\t", 1);
    assert!(matches!(AnnotationLayer::parse(doc, &bad_tag), Err(Error::UnknownPosTag { .. })));
}

#[test]
fn corpus_json_round_trip_keeps_annotations() {
    let corpus = foreground();
    let back = Corpus::from_json(&corpus.to_json().unwrap()).unwrap();
    assert_eq!(back, corpus);
}

fn text_strategy() -> impl Strategy<Value = String> {
    let word = prop_oneof![
        "[a-zA-Z0-9]{1,8}",
        "[a-z]{1,4}-[a-z]{1,4}",
        Just("e.g.".to_string()),
        Just("et al.".to_string()),
        Just("Fig.".to_string()),
        Just("-".to_string()),
    ];
    let sep = prop_oneof![Just(" "), Just(". "), Just("! "), Just("? "), Just(", "), Just(".) "), Just("\n")];
    proptest::collection::vec((word, sep), 0..40)
        .prop_map(|parts| parts.into_iter().map(|(w, s)| format!("{w}{s}")).collect())
}

proptest! {
    #[test]
    fn tokens_are_ordered_alphanumeric_slices(text in text_strategy()) {
        let tokens = tokenize(&text);
        let mut last_end = 0;
        for (i, t) in tokens.iter().enumerate() {
            prop_assert_eq!(t.index, i);
            prop_assert_eq!(&text[t.char_span.0..t.char_span.1], t.surface.as_str());
            prop_assert!(t.char_span.0 >= last_end);
            last_end = t.char_span.1;
            prop_assert!(t.surface.starts_with(|c: char| c.is_alphanumeric()));
            prop_assert!(t.surface.ends_with(|c: char| c.is_alphanumeric()));
            prop_assert!(t.surface.chars().all(|c| c.is_alphanumeric() || c == '-'));
            prop_assert!(!t.surface.contains("--"));
            prop_assert_eq!(t.lowercased.clone(), t.surface.to_lowercase());
        }
    }

    #[test]
    fn sentences_partition_tokens(text in text_strategy()) {
        let tokens = tokenize(&text);
        let spans = segment_sentences(&tokens, &text);
        let mut next = 0;
        for s in &spans {
            prop_assert_eq!(s.start, next);
            prop_assert!(s.end > s.start);
            next = s.end;
        }
        prop_assert_eq!(next, tokens.len());
    }

    #[test]
    fn title_is_its_own_sentence(title in "[A-Z][a-z]{1,6}( [a-z]{1,6}){0,4}", body in text_strategy()) {
        let doc = Document::new("d", &title, &body);
        if doc.title_len > 0 {
            prop_assert!(doc.sentences.iter().any(|s| s.end == doc.title_len));
        }
        prop_assert!(doc.sentences.iter().all(|s| s.end <= doc.title_len || s.start >= doc.title_len));
    }
}
