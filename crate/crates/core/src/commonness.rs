//! Background n-gram index and corpus commonness.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

pub const INDEX_FORMAT: &str = "keyphrase-ngram-index";
pub const INDEX_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCounts {
    /// Occurrences in the background corpus.
    pub tf: u64,
    /// Background documents containing the term.
    pub df: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderTable {
    pub order: usize,
    pub max_tf: u64,
    pub terms: BTreeMap<String, TermCounts>,
}

/// Exact counts of every sentence-internal n-gram (n <= `n_max`) in a
/// background corpus. Terms are lowercased tokens joined by single spaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramIndex {
    pub n_max: usize,
    pub n_docs: u64,
    pub total_tokens: u64,
    pub orders: Vec<OrderTable>,
}

impl NgramIndex {
    pub fn build(corpus: &Corpus, n_max: usize) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyIndex);
        }
        if n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        let mut orders: Vec<OrderTable> = (1..=n_max)
            .map(|order| OrderTable {
                order,
                ..Default::default()
            })
            .collect();
        for doc in &corpus.documents {
            let terms = doc.terms();
            let mut seen_here: HashSet<(usize, &[&str])> = HashSet::new();
            for s in &doc.sentences {
                for start in s.start..s.end {
                    for n in 1..=n_max.min(s.end - start) {
                        let gram = &terms[start..start + n];
                        let counts = orders[n - 1]
                            .terms
                            .entry(gram.join(" "))
                            .or_insert(TermCounts { tf: 0, df: 0 });
                        counts.tf += 1;
                        if seen_here.insert((n, gram)) {
                            counts.df += 1;
                        }
                    }
                }
            }
        }
        for table in &mut orders {
            table.max_tf = table.terms.values().map(|c| c.tf).max().unwrap_or(0);
        }
        Ok(NgramIndex {
            n_max,
            n_docs: corpus.len() as u64,
            total_tokens: corpus.total_tokens() as u64,
            orders,
        })
    }

    pub fn table(&self, order: usize) -> Option<&OrderTable> {
        order.checked_sub(1).and_then(|i| self.orders.get(i))
    }

    /// Counts for a space-joined term of the given order.
    pub fn counts(&self, order: usize, term: &str) -> Option<TermCounts> {
        self.table(order)?.terms.get(term).copied()
    }

    pub fn tf<S: AsRef<str>>(&self, term: &[S]) -> u64 {
        let joined: Vec<&str> = term.iter().map(AsRef::as_ref).collect();
        self.counts(term.len(), &joined.join(" ")).map_or(0, |c| c.tf)
    }

    pub fn max_tf(&self, order: usize) -> u64 {
        self.table(order).map_or(0, |t| t.max_tf)
    }

    /// Distinct terms of the given order.
    pub fn vocab(&self, order: usize) -> usize {
        self.table(order).map_or(0, |t| t.terms.len())
    }

    pub fn avg_doc_len(&self) -> f64 {
        if self.n_docs == 0 {
            0.0
        } else {
            self.total_tokens as f64 / self.n_docs as f64
        }
    }

    /// Writes a one-line JSON header (format, version, SHA-256 of the body)
    /// followed by the index body as compact JSON.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        let body = serde_json::to_vec(self)?;
        let header = IndexHeader {
            format: INDEX_FORMAT.to_string(),
            version: INDEX_VERSION,
            sha256: hex_digest(&body),
        };
        let io = |e| Error::io("<index>", e);
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n").map_err(io)?;
        out.write_all(&body).map_err(io)?;
        out.write_all(b"\n").map_err(io)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(buf)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let newline = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::CorruptIndex("missing header line".into()))?;
        let header: IndexHeader = serde_json::from_slice(&bytes[..newline])
            .map_err(|e| Error::CorruptIndex(format!("unreadable header: {e}")))?;
        if header.format != INDEX_FORMAT {
            return Err(Error::CorruptIndex(format!("unexpected format tag {:?}", header.format)));
        }
        if header.version != INDEX_VERSION {
            return Err(Error::FormatVersion {
                what: "index",
                found: header.version,
                expected: INDEX_VERSION,
            });
        }
        let body = &bytes[newline + 1..];
        let body = body.strip_suffix(b"\n").unwrap_or(body);
        if hex_digest(body) != header.sha256 {
            return Err(Error::CorruptIndex("checksum mismatch".into()));
        }
        serde_json::from_slice(body).map_err(|e| Error::CorruptIndex(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        NgramIndex::from_bytes(&bytes)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct IndexHeader {
    format: String,
    version: u32,
    sha256: String,
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// ln(tf_bg) / ln(tf_max) for a background frequency at one n-gram order.
/// Unseen terms get 0. When the most frequent term of the order occurs only
/// once, every seen term gets 1.
pub fn commonness_from_counts(tf_bg: u64, tf_max: u64) -> f64 {
    if tf_bg == 0 || tf_max == 0 {
        0.0
    } else if tf_max == 1 || tf_bg >= tf_max {
        1.0
    } else {
        (tf_bg as f64).ln() / (tf_max as f64).ln()
    }
}

pub fn commonness<S: AsRef<str>>(term: &[S], index: &NgramIndex) -> f64 {
    if term.is_empty() || term.len() > index.n_max {
        return 0.0;
    }
    commonness_from_counts(index.tf(term), index.max_tf(term.len()))
}

/// Index of the equal-width bin over [0, 1] holding `value`; 1.0 lands in the last bin.
pub fn commonness_bin(value: f64, num_bins: usize) -> Result<usize> {
    if !(2..=20).contains(&num_bins) {
        return Err(Error::InvalidArgument(format!("number of bins must be in 2..=20, got {num_bins}")));
    }
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::CommonnessOutOfRange(value));
    }
    Ok(((value * num_bins as f64).floor() as usize).min(num_bins - 1))
}

pub fn bin_commonness(value: f64, num_bins: usize) -> Result<Vec<f64>> {
    let hot = commonness_bin(value, num_bins)?;
    Ok((0..num_bins).map(|i| if i == hot { 1.0 } else { 0.0 }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Role};

    fn aba() -> NgramIndex {
        let corpus = Corpus::new(Role::Background, vec![Document::new("b", "", "a b a")]);
        NgramIndex::build(&corpus, 5).unwrap()
    }

    #[test]
    fn hand_counted_orders() {
        let idx = aba();
        assert_eq!(idx.tf(&["a"]), 2);
        assert_eq!(idx.tf(&["b"]), 1);
        assert_eq!(idx.max_tf(1), 2);
        assert_eq!(idx.tf(&["a", "b"]), 1);
        assert_eq!(idx.tf(&["b", "a"]), 1);
        assert_eq!(idx.max_tf(2), 1);
        assert_eq!(idx.vocab(3), 1);
        assert_eq!(idx.max_tf(4), 0);
        assert_eq!(idx.counts(1, "a"), Some(TermCounts { tf: 2, df: 1 }));
    }

    #[test]
    fn empty_corpus_rejected() {
        let corpus = Corpus::new(Role::Background, vec![]);
        assert!(matches!(NgramIndex::build(&corpus, 5), Err(Error::EmptyIndex)));
    }

    #[test]
    fn commonness_values() {
        assert_eq!(commonness_from_counts(100, 10000), 0.5);
        assert_eq!(commonness_from_counts(10000, 10000), 1.0);
        assert_eq!(commonness_from_counts(0, 10000), 0.0);
        assert_eq!(commonness_from_counts(1, 10000), 0.0);
        let idx = aba();
        assert_eq!(commonness(&["a"], &idx), 1.0);
        assert_eq!(commonness(&["b"], &idx), 0.0);
        // max frequency of one: seen terms are as common as it gets
        assert_eq!(commonness(&["a", "b"], &idx), 1.0);
        assert_eq!(commonness(&["zzz"], &idx), 0.0);
        assert_eq!(commonness(&["a"; 6], &idx), 0.0);
    }

    #[test]
    fn binning() {
        assert_eq!(bin_commonness(0.0, 4).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(bin_commonness(1.0, 4).unwrap(), [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(commonness_bin(0.5, 3).unwrap(), 1);
        assert!(matches!(bin_commonness(1.01, 4), Err(Error::CommonnessOutOfRange(_))));
        assert!(bin_commonness(f64::NAN, 4).is_err());
        assert!(bin_commonness(0.5, 1).is_err());
        assert!(bin_commonness(0.5, 21).is_err());
    }

    #[test]
    fn persisted_round_trip_and_corruption() {
        let idx = aba();
        let bytes = idx.to_bytes().unwrap();
        assert_eq!(NgramIndex::from_bytes(&bytes).unwrap(), idx);
        assert_eq!(bytes, aba().to_bytes().unwrap());
        let body_start = bytes.iter().position(|&b| b == b'\n').unwrap() + 1;
        for pos in [body_start + 3, bytes.len() - 5, 20] {
            let mut bad = bytes.clone();
            bad[pos] ^= 0x01;
            assert!(NgramIndex::from_bytes(&bad).is_err(), "flip at {pos} accepted");
        }
    }
}
