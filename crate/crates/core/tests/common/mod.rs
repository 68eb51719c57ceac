#![allow(dead_code)]

pub mod oracles;

use std::path::{Path, PathBuf};

use keyphrase_core::pipeline::{Paths, RunConfig};
use keyphrase_core::{Corpus, Role};
use serde_json::Value;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn expected() -> Value {
    let text = std::fs::read_to_string(fixtures().join("expected.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn foreground() -> Corpus {
    let mut c = Corpus::load(fixtures().join("foreground"), Role::Foreground).unwrap();
    let missing = c.attach_annotations(fixtures().join("annotations")).unwrap();
    assert!(missing.is_empty());
    c
}

pub fn background() -> Corpus {
    Corpus::load(fixtures().join("background"), Role::Background).unwrap()
}

pub fn fixture_config(output: &Path) -> RunConfig {
    let f = fixtures();
    RunConfig {
        paths: Paths {
            foreground: f.join("foreground"),
            background: Some(f.join("background")),
            annotations: Some(f.join("annotations")),
            responses: f.join("responses.csv"),
            blocklist: None,
            output: output.to_path_buf(),
        },
        seed: 17,
        ..RunConfig::default()
    }
}

pub fn as_usize(v: &Value) -> usize {
    v.as_u64().unwrap() as usize
}

pub fn usizes(v: &Value) -> Vec<usize> {
    v.as_array().unwrap().iter().map(as_usize).collect()
}

pub fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
