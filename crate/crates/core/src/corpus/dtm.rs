use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DTM_FORMAT: &str = "textcontrast-dtm";
pub const DTM_VERSION: u32 = 1;

/// Lexicographically ordered term list with its inverse index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Sorts and deduplicates `terms`.
    pub fn new<I: IntoIterator<Item = String>>(terms: I) -> Self {
        let mut terms: Vec<String> = terms.into_iter().collect();
        terms.sort();
        terms.dedup();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Self { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, id: usize) -> &str {
        &self.terms[id]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

impl Serialize for Vocabulary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<String>::deserialize(d)?;
        let vocab = Vocabulary::new(terms.iter().cloned());
        if vocab.terms != terms {
            return Err(serde::de::Error::custom("vocabulary must be sorted and unique"));
        }
        Ok(vocab)
    }
}

/// Sparse document-term counts. Each row holds `(term id, count)` pairs in
/// ascending term order with non-zero counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocTermMatrix {
    doc_ids: Vec<String>,
    vocab_size: usize,
    rows: Vec<Vec<(u32, u32)>>,
}

impl DocTermMatrix {
    pub fn from_rows(doc_ids: Vec<String>, vocab_size: usize, rows: Vec<Vec<(u32, u32)>>) -> Result<Self> {
        if doc_ids.len() != rows.len() {
            return Err(Error::LengthMismatch {
                left: doc_ids.len(),
                right: rows.len(),
            });
        }
        for row in &rows {
            let sorted = row.windows(2).all(|w| w[0].0 < w[1].0);
            if !sorted || row.iter().any(|&(t, c)| t as usize >= vocab_size || c == 0) {
                return Err(Error::Config("malformed document-term row".into()));
            }
        }
        Ok(Self {
            doc_ids,
            vocab_size,
            rows,
        })
    }

    pub fn docs(&self) -> usize {
        self.rows.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn row(&self, d: usize) -> &[(u32, u32)] {
        &self.rows[d]
    }

    pub fn rows(&self) -> &[Vec<(u32, u32)>] {
        &self.rows
    }

    pub fn row_total(&self, d: usize) -> u64 {
        self.rows[d].iter().map(|&(_, c)| c as u64).sum()
    }

    pub fn total_tokens(&self) -> u64 {
        (0..self.docs()).map(|d| self.row_total(d)).sum()
    }

    /// Per-term totals over the whole matrix.
    pub fn column_totals(&self) -> Vec<u64> {
        let mut totals = vec![0u64; self.vocab_size];
        for row in &self.rows {
            for &(t, c) in row {
                totals[t as usize] += c as u64;
            }
        }
        totals
    }

    /// Documents left with no in-vocabulary tokens.
    pub fn empty_docs(&self) -> Vec<&str> {
        self.rows
            .iter()
            .zip(&self.doc_ids)
            .filter(|(r, _)| r.is_empty())
            .map(|(_, id)| id.as_str())
            .collect()
    }
}

/// A document's topic-modelling token stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessedDoc {
    pub id: String,
    pub tokens: Vec<String>,
}

/// Builds the vocabulary of terms with corpus frequency `>= min_count` and the
/// matching count matrix. Documents that lose every token are kept as empty
/// rows.
pub fn build_dtm(docs: &[PreprocessedDoc], min_count: usize) -> Result<(Vocabulary, DocTermMatrix)> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if min_count == 0 {
        return Err(Error::Config("min_count must be at least 1".into()));
    }
    let mut freq: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        for t in &doc.tokens {
            *freq.entry(t.as_str()).or_default() += 1;
        }
    }
    let vocab = Vocabulary::new(
        freq.into_iter()
            .filter(|&(_, c)| c >= min_count)
            .map(|(t, _)| t.to_string()),
    );
    let rows = docs
        .iter()
        .map(|doc| {
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            for t in &doc.tokens {
                if let Some(id) = vocab.id(t) {
                    *counts.entry(id as u32).or_default() += 1;
                }
            }
            counts.into_iter().collect()
        })
        .collect();
    let doc_ids = docs.iter().map(|d| d.id.clone()).collect();
    let dtm = DocTermMatrix::from_rows(doc_ids, vocab.len(), rows)?;
    Ok((vocab, dtm))
}

#[derive(Serialize, Deserialize)]
struct DtmFile {
    format: String,
    version: u32,
    vocabulary: Vocabulary,
    doc_ids: Vec<String>,
    /// `(doc, term, count)` in row-major order.
    triplets: Vec<(usize, u32, u32)>,
}

/// Serializes vocabulary and matrix to the versioned JSON cache format.
pub fn dtm_to_json(vocab: &Vocabulary, dtm: &DocTermMatrix) -> Result<String> {
    let triplets = dtm
        .rows
        .iter()
        .enumerate()
        .flat_map(|(d, row)| row.iter().map(move |&(t, c)| (d, t, c)))
        .collect();
    let file = DtmFile {
        format: DTM_FORMAT.into(),
        version: DTM_VERSION,
        vocabulary: vocab.clone(),
        doc_ids: dtm.doc_ids.clone(),
        triplets,
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn dtm_from_json(json: &str) -> Result<(Vocabulary, DocTermMatrix)> {
    let file: DtmFile = serde_json::from_str(json)?;
    if file.format != DTM_FORMAT {
        return Err(Error::Config(format!("not a DTM cache file: format {:?}", file.format)));
    }
    if file.version != DTM_VERSION {
        return Err(Error::Version {
            found: file.version,
            expected: DTM_VERSION,
        });
    }
    let mut rows = vec![Vec::new(); file.doc_ids.len()];
    for (d, t, c) in file.triplets {
        rows.get_mut(d)
            .ok_or_else(|| Error::Config(format!("triplet row {d} out of range")))?
            .push((t, c));
    }
    let dtm = DocTermMatrix::from_rows(file.doc_ids, file.vocabulary.len(), rows)?;
    Ok((file.vocabulary, dtm))
}

pub fn write_dtm(path: impl AsRef<Path>, vocab: &Vocabulary, dtm: &DocTermMatrix) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, dtm_to_json(vocab, dtm)?).map_err(|e| Error::io(path, e))
}

pub fn read_dtm(path: impl AsRef<Path>) -> Result<(Vocabulary, DocTermMatrix)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    dtm_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn doc(id: &str, tokens: &[&str]) -> PreprocessedDoc {
        PreprocessedDoc {
            id: id.into(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn direct_counts() {
        let docs = [doc("0", &["a", "b", "a"]), doc("1", &["b", "c"])];
        let (v, m) = build_dtm(&docs, 1).unwrap();
        assert_eq!(v.terms(), ["a", "b", "c"]);
        assert_eq!(m.row(0), [(0, 2), (1, 1)]);
        assert_eq!(m.row(1), [(1, 1), (2, 1)]);
    }

    #[test]
    fn min_count_threshold() {
        let docs = [doc("0", &["a", "b", "a"]), doc("1", &["b", "c"])];
        let (v, m) = build_dtm(&docs, 2).unwrap();
        assert_eq!(v.terms(), ["a", "b"]);
        assert_eq!(m.vocab_size(), 2);
        assert_eq!(m.row(1), [(1, 1)]);
    }

    #[test]
    fn emptied_docs_are_kept_and_flagged() {
        let docs = [doc("x", &["a", "a"]), doc("y", &["rare"]), doc("z", &[])];
        let (_, m) = build_dtm(&docs, 2).unwrap();
        assert_eq!(m.docs(), 3);
        assert_eq!(m.empty_docs(), ["y", "z"]);
    }

    #[test]
    fn errors() {
        assert!(matches!(build_dtm(&[], 1), Err(Error::EmptyCorpus)));
        assert!(build_dtm(&[doc("a", &["x"])], 0).is_err());
    }

    #[test]
    fn json_roundtrip_and_version_check() {
        let docs = [doc("0", &["a", "b", "a"]), doc("1", &[]), doc("2", &["b", "c"])];
        let (v, m) = build_dtm(&docs, 1).unwrap();
        let json = dtm_to_json(&v, &m).unwrap();
        let (v2, m2) = dtm_from_json(&json).unwrap();
        assert_eq!((v, m), (v2, m2));
        let bumped = json.replace("\"version\":1", "\"version\":9");
        assert!(matches!(dtm_from_json(&bumped), Err(Error::Version { found: 9, .. })));
    }

    proptest! {
        #[test]
        fn row_sums_conserve_tokens(docs in prop::collection::vec(prop::collection::vec("[a-e]", 0..30), 1..10)) {
            let docs: Vec<PreprocessedDoc> = docs.into_iter().enumerate()
                .map(|(i, t)| PreprocessedDoc { id: i.to_string(), tokens: t })
                .collect();
            let (_, m) = build_dtm(&docs, 1).unwrap();
            for (d, doc) in docs.iter().enumerate() {
                prop_assert_eq!(m.row_total(d), doc.tokens.len() as u64);
            }
            let again = build_dtm(&docs, 1).unwrap();
            prop_assert_eq!(dtm_to_json(&again.0, &again.1).unwrap(), dtm_to_json(&build_dtm(&docs, 1).unwrap().0, &m).unwrap());
        }
    }
}
