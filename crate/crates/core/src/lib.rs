//! Supervised keyphrase extraction.
//!
//! Annotator responses are filtered into positive phrases, contrasted with
//! sampled negative n-grams, described by frequency, commonness, grammatical
//! and positional features, and ranked with a sample-weighted logistic
//! regression evaluated by precision-recall curves.

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod candidates;
pub mod commonness;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod features;
pub mod freq;
pub mod grammar;
pub mod model;
pub mod pipeline;
pub mod positional;
pub mod text;

pub use candidates::{Blocklist, Label, LabeledExample, Response};
pub use commonness::NgramIndex;
pub use corpus::{AnnotationLayer, Corpus, Document, Role};
pub use error::{Error, Result};
pub use eval::{pr_curve, PrCurve, PrPoint};
pub use features::{Dataset, FeatureFamilies, Featurizer};
pub use freq::{FrequencyFeatureConfig, TermStatistics};
pub use model::{train, Design, Model, TrainConfig};
pub use pipeline::RunConfig;
pub use text::{tokenize, Span, Token};
