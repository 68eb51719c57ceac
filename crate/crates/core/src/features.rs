//! Turning labeled (document, phrase) pairs into a feature matrix.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::candidates::{Label, LabeledExample};
use crate::commonness::{bin_commonness, commonness, NgramIndex};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::freq::{DocumentProfile, FrequencyFeatureConfig, FrequencyFeatures, FREQUENCY_FEATURES};
use crate::grammar::{GrammarFeatures, TermSpans, PARSE_FEATURES, POS_FEATURES};
use crate::positional::{PositionalFeatures, POSITIONAL_FEATURES};
use crate::text::Span;

pub const COMMONNESS: &str = "commonness";

/// Which feature families to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureFamilies {
    pub frequency: bool,
    pub commonness: bool,
    pub grammar: bool,
    pub positional: bool,
}

impl Default for FeatureFamilies {
    fn default() -> Self {
        FeatureFamilies {
            frequency: true,
            commonness: true,
            grammar: true,
            positional: true,
        }
    }
}

pub fn commonness_bin_name(bin: usize, num_bins: usize) -> String {
    format!("commonness_bin{}of{num_bins}", bin + 1)
}

impl FeatureFamilies {
    pub fn column_names(&self, commonness_bins: usize) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        if self.frequency {
            names.extend(FREQUENCY_FEATURES.iter().map(|s| s.to_string()));
        }
        if self.commonness {
            names.push(COMMONNESS.to_string());
            names.extend((0..commonness_bins).map(|b| commonness_bin_name(b, commonness_bins)));
        }
        if self.grammar {
            names.extend(PARSE_FEATURES.iter().chain(&POS_FEATURES).map(|s| s.to_string()));
        }
        if self.positional {
            names.extend(POSITIONAL_FEATURES.iter().map(|s| s.to_string()));
        }
        names
    }

    pub fn needs_index(&self) -> bool {
        self.frequency || self.commonness
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleRow {
    pub doc_id: String,
    pub phrase: String,
    pub label: Label,
    pub weight: f64,
    pub values: Vec<f64>,
}

/// A feature matrix with named columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<ExampleRow>,
}

/// Counters collected while featurizing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeaturizeStats {
    pub examples: usize,
    /// Examples whose document had no annotation layer; their grammatical
    /// features are all zero.
    pub missing_annotations: usize,
    /// Examples whose phrase does not occur in their document.
    pub absent_phrases: usize,
}

pub struct Featurizer<'a> {
    pub corpus: &'a Corpus,
    pub index: Option<&'a NgramIndex>,
    pub families: FeatureFamilies,
    pub frequency: FrequencyFeatureConfig,
    pub n_max: usize,
    pub commonness_bins: usize,
}

impl<'a> Featurizer<'a> {
    pub fn new(corpus: &'a Corpus, index: Option<&'a NgramIndex>) -> Self {
        Featurizer {
            corpus,
            index,
            families: FeatureFamilies::default(),
            frequency: FrequencyFeatureConfig::default(),
            n_max: 5,
            commonness_bins: 0,
        }
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.families.column_names(self.commonness_bins)
    }

    pub fn featurize(&self, examples: &[LabeledExample]) -> Result<(Dataset, FeaturizeStats)> {
        let index = match (self.families.needs_index(), self.index) {
            (true, None) => {
                return Err(Error::InvalidArgument(
                    "frequency and commonness features need a background index".into(),
                ))
            }
            (_, index) => index,
        };
        self.frequency.validate()?;

        let mut profiles: HashMap<&str, (DocumentProfile<'_>, Option<TermSpans>)> = HashMap::new();
        let mut stats = FeaturizeStats::default();
        let mut rows = Vec::with_capacity(examples.len());
        for example in examples {
            let doc = self.corpus.require(&example.doc_id)?;
            let (profile, term_spans) = profiles.entry(doc.id.as_str()).or_insert_with(|| {
                let spans = doc.annotations.as_ref().map(|layer| TermSpans::for_document(doc, layer));
                (DocumentProfile::new(doc, self.n_max), spans)
            });
            let phrase = &example.phrase_tokens;
            let occurrences = profile.occurrences(phrase);
            if occurrences.is_empty() {
                stats.absent_phrases += 1;
            }

            let mut values = Vec::new();
            if self.families.frequency {
                let index = index.expect("checked above");
                let s = profile.term_statistics(phrase, index);
                values.extend(FrequencyFeatures::from_stats(&s, &self.frequency).values());
            }
            if self.families.commonness {
                let c = commonness(phrase, index.expect("checked above"));
                values.push(c);
                if self.commonness_bins > 0 {
                    values.extend(bin_commonness(c, self.commonness_bins)?);
                }
            }
            if self.families.grammar {
                let g = match (&doc.annotations, term_spans.as_ref(), occurrences.first()) {
                    (Some(layer), Some(spans), Some(&start)) => {
                        GrammarFeatures::compute(Span::new(start, start + phrase.len()), doc, layer, spans)
                    }
                    (None, _, _) => {
                        stats.missing_annotations += 1;
                        GrammarFeatures::default()
                    }
                    _ => GrammarFeatures::default(),
                };
                values.extend(g.values().map(|b| if b { 1.0 } else { 0.0 }));
            }
            if self.families.positional {
                values.extend(PositionalFeatures::from_occurrences(&occurrences, phrase.len(), doc).values());
            }
            rows.push(ExampleRow {
                doc_id: example.doc_id.clone(),
                phrase: example.phrase(),
                label: example.label,
                weight: example.weight,
                values,
            });
        }
        stats.examples = rows.len();
        if stats.missing_annotations > 0 {
            log::warn!(
                "{} examples come from documents without annotations; grammatical features set to 0",
                stats.missing_annotations
            );
        }
        Ok((
            Dataset {
                feature_names: self.feature_names(),
                rows,
            },
            stats,
        ))
    }
}

impl Dataset {
    pub fn column(&self, name: &str) -> Result<usize> {
        self.feature_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    pub fn positives(&self) -> usize {
        self.rows.iter().filter(|r| r.label.is_positive()).count()
    }

    /// CSV with header `doc_id,phrase,label,weight,<features>`; labels are 1/0.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["doc_id", "phrase", "label", "weight"];
        header.extend(self.feature_names.iter().map(String::as_str));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut record = vec![
                row.doc_id.clone(),
                row.phrase.clone(),
                if row.label.is_positive() { "1" } else { "0" }.to_string(),
                row.weight.to_string(),
            ];
            record.extend(row.values.iter().map(f64::to_string));
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io("<features>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.len() < 4 || &header[0] != "doc_id" || &header[1] != "phrase" || &header[2] != "label" || &header[3] != "weight" {
            return Err(Error::InvalidArgument(
                "feature matrix header must start with doc_id,phrase,label,weight".into(),
            ));
        }
        let feature_names: Vec<String> = header.iter().skip(4).map(str::to_string).collect();
        let parse = |s: &str, line: u64| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::InvalidArgument(format!("line {line}: {s:?} is not a number")))
        };
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let label = match &record[2] {
                "1" => Label::Positive,
                "0" => Label::Negative,
                other => return Err(Error::InvalidArgument(format!("line {line}: label {other:?} is not 0 or 1"))),
            };
            rows.push(ExampleRow {
                doc_id: record[0].to_string(),
                phrase: record[1].to_string(),
                label,
                weight: parse(&record[3], line)?,
                values: record.iter().skip(4).map(|v| parse(v, line)).collect::<Result<_>>()?,
            });
        }
        Ok(Dataset { feature_names, rows })
    }
}
