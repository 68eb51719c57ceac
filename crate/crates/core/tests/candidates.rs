mod common;

use std::collections::{BTreeSet, HashSet};

use common::{fixtures, foreground, oracles};
use keyphrase_core::candidates::{
    enumerate_ngrams, filter_extractive, filter_length, filter_spurious, is_spurious, load_responses,
    sample_negatives, unique_positives, Blocklist, Label, Response,
};
use keyphrase_core::{Corpus, Document, Error, Role};
use proptest::prelude::*;

fn doc_terms(doc: &Document) -> Vec<String> {
    doc.tokens.iter().map(|t| t.lowercased.clone()).collect()
}

#[test]
fn enumeration_matches_double_loop() {
    for doc in &foreground().documents {
        let grams = enumerate_ngrams(doc, 5);
        let set: BTreeSet<Vec<String>> = grams.iter().cloned().collect();
        assert_eq!(set.len(), grams.len(), "{} has duplicates", doc.id);
        assert_eq!(set, oracles::ngrams(doc, 5), "{}", doc.id);
    }
}

#[test]
fn extractive_filter_matches_naive_search() {
    let corpus = foreground();
    let (responses, _) = load_responses(fixtures().join("responses.csv")).unwrap();
    let kept = filter_extractive(&responses, &corpus).unwrap();
    let naive: Vec<&Response> = responses
        .iter()
        .filter(|r| oracles::contains(&doc_terms(corpus.get(&r.doc_id).unwrap()), &r.phrase_tokens))
        .collect();
    assert_eq!(kept.iter().collect::<Vec<_>>(), naive);
}

#[test]
fn blocklist_matching_is_exact_after_normalization() {
    let b = Blocklist::default();
    // 20 listed entries, three of them case variants of others
    assert_eq!(b.len(), 17);
    for hit in ["N/A", "  n/a ", "KEYWORDS", "Keyword/Keyphrase 1:  Keyword/Keyphrase 1:", "N\\A"] {
        assert!(b.contains(hit), "{hit}");
    }
    for miss in ["keywords list", "n / a", "key word"] {
        assert!(!b.contains(miss), "{miss}");
    }
}

#[test]
fn title_and_abstract_copies_are_spurious() {
    let corpus = foreground();
    let doc = corpus.get("d05").unwrap();
    let b = Blocklist::default();
    let title = Response::new("d05", "x", &doc.title.to_uppercase()).unwrap();
    let body = Response::new("d05", "x", &doc.body).unwrap();
    let part = Response::new("d05", "x", "genome search").unwrap();
    assert!(is_spurious(&title, &b, &corpus));
    assert!(is_spurious(&body, &b, &corpus));
    assert!(!is_spurious(&part, &b, &corpus));
    let kept = filter_spurious(&[title, part.clone(), body], &b, &corpus);
    assert_eq!(kept, [part]);
}

#[test]
fn length_filter_boundary() {
    let five = Response::new("d", "a", "one two three four five").unwrap();
    let six = Response::new("d", "a", "one two three four five six").unwrap();
    assert_eq!(filter_length(&[five.clone(), six], 5), [five]);
}

#[test]
fn unknown_document_is_an_error() {
    let corpus = foreground();
    let r = Response::new("nope", "a", "hash table").unwrap();
    assert!(matches!(filter_extractive(&[r], &corpus), Err(Error::UnknownDocument(_))));
}

#[test]
fn duplicates_collapse_per_document() {
    let rs = vec![
        Response::new("d1", "a", "Hash Table").unwrap(),
        Response::new("d1", "b", "hash  table").unwrap(),
        Response::new("d2", "b", "hash table").unwrap(),
    ];
    let p = unique_positives(&rs);
    assert_eq!(p.len(), 2);
    assert!(p.iter().all(|e| e.label == Label::Positive && e.weight == 1.0));
}

fn small_corpus() -> Corpus {
    Corpus::new(
        Role::Foreground,
        vec![
            Document::new("a", "Alpha beta", "Gamma delta epsilon. Zeta eta theta iota."),
            Document::new("b", "Kappa", "Lambda mu nu xi omicron. Pi rho."),
        ],
    )
}

proptest! {
    #[test]
    fn negatives_are_distinct_fresh_and_seeded(seed in any::<u64>(), ratio in 1usize..6) {
        let corpus = small_corpus();
        let positives = unique_positives(&[
            Response::new("a", "x", "gamma delta").unwrap(),
            Response::new("b", "x", "pi").unwrap(),
        ]);
        let negatives = sample_negatives(&corpus, &positives, ratio, 5, 0.1, seed).unwrap();
        prop_assert_eq!(negatives.len(), ratio * positives.len());
        let taken: HashSet<(&str, &[String])> =
            positives.iter().map(|p| (p.doc_id.as_str(), p.phrase_tokens.as_slice())).collect();
        let mut seen = HashSet::new();
        for n in &negatives {
            prop_assert!(seen.insert((n.doc_id.as_str(), n.phrase_tokens.as_slice())));
            prop_assert!(!taken.contains(&(n.doc_id.as_str(), n.phrase_tokens.as_slice())));
            prop_assert_eq!(n.weight, 0.1);
            prop_assert_eq!(n.label, Label::Negative);
            let doc = corpus.get(&n.doc_id).unwrap();
            prop_assert!(oracles::ngrams(doc, 5).contains(&n.phrase_tokens));
        }
        let again = sample_negatives(&corpus, &positives, ratio, 5, 0.1, seed).unwrap();
        prop_assert_eq!(again, negatives);
    }
}

#[test]
fn too_few_ngrams_is_reported() {
    let corpus = Corpus::new(Role::Foreground, vec![Document::new("a", "", "x y")]);
    let positives = unique_positives(&[Response::new("a", "r", "x").unwrap()]);
    match sample_negatives(&corpus, &positives, 3, 5, 0.1, 0) {
        Err(Error::InsufficientNgrams { needed, available }) => assert_eq!((needed, available), (3, 2)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn seeds_change_the_draw() {
    let corpus = foreground();
    let positives = unique_positives(&[Response::new("d01", "r", "hash table").unwrap()]);
    let a = sample_negatives(&corpus, &positives, 10, 5, 0.1, 1).unwrap();
    let b = sample_negatives(&corpus, &positives, 10, 5, 0.1, 2).unwrap();
    assert_ne!(a, b);
}
