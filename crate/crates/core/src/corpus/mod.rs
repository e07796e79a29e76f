//! Corpus loading and text preprocessing: dialect replacement, tokenization,
//! stopword removal, stemming and document-term matrix construction.

mod dtm;
mod porter;
mod replace;
mod stopwords;
mod tokenize;

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dtm::{
    build_dtm, dtm_from_json, dtm_to_json, read_dtm, write_dtm, DocTermMatrix, PreprocessedDoc, Vocabulary,
};
pub use porter::stem;
pub use replace::{apply_replacements, ReplacementTable};
pub use stopwords::Stopwords;
pub use tokenize::{tokenize, TokenizedDocument};

use crate::error::{Error, MissingFile, Result};

/// Which side of the comparison a document belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    A,
    B,
    Unknown,
}

impl Group {
    pub fn is_labeled(self) -> bool {
        self != Group::Unknown
    }

    pub fn other(self) -> Group {
        match self {
            Group::A => Group::B,
            Group::B => Group::A,
            Group::Unknown => Group::Unknown,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::A => "A",
            Group::B => "B",
            Group::Unknown => "unknown",
        })
    }
}

/// Maps the manifest's group column onto [`Group`]. Matching is
/// case-insensitive; `unknown` and the empty string always mean
/// [`Group::Unknown`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupLabels {
    pub a: String,
    pub b: String,
}

impl Default for GroupLabels {
    fn default() -> Self {
        Self {
            a: "A".into(),
            b: "B".into(),
        }
    }
}

impl GroupLabels {
    pub fn parse(&self, raw: &str) -> Option<Group> {
        let raw = raw.trim();
        if raw.eq_ignore_ascii_case(&self.a) {
            Some(Group::A)
        } else if raw.eq_ignore_ascii_case(&self.b) {
            Some(Group::B)
        } else if raw.is_empty() || raw.eq_ignore_ascii_case("unknown") {
            Some(Group::Unknown)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub group: Group,
    pub state: Option<String>,
    /// Token count before stopword removal.
    pub length_words: usize,
    pub tokens: TokenizedDocument,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, group: Group, state: Option<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Self {
            id: id.into(),
            length_words: tokens.len(),
            tokens,
            text,
            group,
            state,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
}

#[derive(Deserialize)]
struct ManifestRow {
    id: String,
    path: PathBuf,
    group: String,
    #[serde(default)]
    state: Option<String>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        for d in &documents {
            if d.id.is_empty() {
                return Err(Error::Config("document with empty id".into()));
            }
            if !seen.insert(d.id.as_str()) {
                return Err(Error::Config(format!("duplicate document id {:?}", d.id)));
            }
        }
        Ok(Self { documents })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn in_group(&self, group: Group) -> impl Iterator<Item = &Document> {
        self.documents.iter().filter(move |d| d.group == group)
    }

    pub fn count(&self, group: Group) -> usize {
        self.in_group(group).count()
    }

    /// Documents with a known group; these are the only ones any comparison
    /// analysis looks at.
    pub fn labeled(&self) -> impl Iterator<Item = &Document> {
        self.documents.iter().filter(|d| d.group.is_labeled())
    }

    pub fn unknown_ids(&self) -> Vec<&str> {
        self.in_group(Group::Unknown).map(|d| d.id.as_str()).collect()
    }

    /// Sub-corpus of documents whose state matches (case-insensitive).
    pub fn filter_state(&self, state: &str) -> Corpus {
        Corpus {
            documents: self
                .documents
                .iter()
                .filter(|d| d.state.as_deref().is_some_and(|s| s.eq_ignore_ascii_case(state)))
                .cloned()
                .collect(),
        }
    }

    /// Copy of the corpus with each document's groups relabeled by `f`.
    pub fn relabel(&self, mut f: impl FnMut(&Document) -> Group) -> Corpus {
        Corpus {
            documents: self
                .documents
                .iter()
                .map(|d| Document {
                    group: f(d),
                    ..d.clone()
                })
                .collect(),
        }
    }

    /// Applies the replacement table to every document's text and
    /// re-tokenizes.
    pub fn with_replacements(&self, table: &ReplacementTable) -> Corpus {
        let documents = self
            .documents
            .par_iter()
            .map(|d| {
                Document::new(
                    d.id.clone(),
                    apply_replacements(&d.text, table),
                    d.group,
                    d.state.clone(),
                )
            })
            .collect();
        Corpus { documents }
    }

    /// Topic-modelling token streams for every document, in corpus order.
    pub fn preprocess(&self, stopwords: &Stopwords) -> Vec<PreprocessedDoc> {
        self.documents
            .par_iter()
            .map(|d| PreprocessedDoc {
                id: d.id.clone(),
                tokens: preprocess_for_topics(&d.tokens, stopwords),
            })
            .collect()
    }
}

/// Loads a `id,path,group,state` manifest. Text paths are resolved relative
/// to the manifest's directory.
///
/// Every row whose file is missing is reported in a single
/// [`Error::MissingFiles`]; duplicate ids and unrecognised group labels fail
/// immediately.
pub fn load_corpus(manifest_path: impl AsRef<Path>, labels: &GroupLabels) -> Result<Corpus> {
    let manifest_path = manifest_path.as_ref();
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(manifest_path)
        .map_err(|e| Error::csv(manifest_path, e))?;

    let manifest_err = |message: String| Error::Manifest {
        path: manifest_path.to_path_buf(),
        message,
    };

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, rec) in reader.deserialize::<ManifestRow>().enumerate() {
        // header is line 1
        let line = i + 2;
        let row = rec.map_err(|e| Error::csv(manifest_path, e))?;
        if row.id.is_empty() {
            return Err(manifest_err(format!("row {line}: empty id")));
        }
        if !seen.insert(row.id.clone()) {
            return Err(manifest_err(format!("row {line}: duplicate id {:?}", row.id)));
        }
        let group = labels.parse(&row.group).ok_or_else(|| {
            manifest_err(format!("row {line}: unknown group label {:?}", row.group))
        })?;
        rows.push((line, row, group));
    }

    let loaded: Vec<std::result::Result<Document, MissingFile>> = rows
        .into_par_iter()
        .map(|(line, row, group)| {
            let path = base.join(&row.path);
            match std::fs::read_to_string(&path) {
                Ok(text) => Ok(Document::new(
                    row.id,
                    text,
                    group,
                    row.state.filter(|s| !s.is_empty()),
                )),
                Err(_) => Err(MissingFile {
                    row: line,
                    id: row.id,
                    path,
                }),
            }
        })
        .collect();

    let mut documents = Vec::with_capacity(loaded.len());
    let mut missing = Vec::new();
    for r in loaded {
        match r {
            Ok(d) => documents.push(d),
            Err(m) => missing.push(m),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingFiles(missing));
    }
    Corpus::new(documents)
}

/// Drops stopwords and Porter-stems what remains, preserving order.
pub fn preprocess_for_topics(doc: &TokenizedDocument, stopwords: &Stopwords) -> Vec<String> {
    doc.tokens_flat
        .iter()
        .filter(|t| !stopwords.contains(t))
        .map(|t| stem(t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens(v: &[&str]) -> TokenizedDocument {
        let flat: Vec<String> = v.iter().map(|s| s.to_string()).collect();
        TokenizedDocument {
            sentences: vec![flat.clone()],
            tokens_flat: flat,
        }
    }

    #[test]
    fn preprocess_drops_stopwords_and_stems() {
        let sw = Stopwords::from_words(["the", "was"]);
        assert_eq!(
            preprocess_for_topics(&tokens(&["the", "whipping", "was", "brutal"]), &sw),
            ["whip", "brutal"]
        );
        assert!(preprocess_for_topics(&tokens(&["the", "was", "The"]), &sw).is_empty());
        let stems = preprocess_for_topics(&tokens(&["gather", "gathered", "gathering"]), &sw);
        assert!(stems.iter().all(|s| s == "gather"));
    }

    #[test]
    fn replacement_happens_before_stopword_removal() {
        let table = ReplacementTable::new([("dey", "they")]).unwrap();
        let c = Corpus::new(vec![Document::new("1", "Dey ran.", Group::A, None)]).unwrap();
        let c = c.with_replacements(&table);
        let pre = c.preprocess(&Stopwords::english());
        assert_eq!(pre[0].tokens, ["ran"]);
    }

    #[test]
    fn group_label_mapping() {
        let l = GroupLabels {
            a: "black".into(),
            b: "white".into(),
        };
        assert_eq!(l.parse("Black"), Some(Group::A));
        assert_eq!(l.parse("white"), Some(Group::B));
        assert_eq!(l.parse("UNKNOWN"), Some(Group::Unknown));
        assert_eq!(l.parse("green"), None);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let docs = vec![
            Document::new("x", "a", Group::A, None),
            Document::new("x", "b", Group::B, None),
        ];
        assert!(Corpus::new(docs).is_err());
    }
}
