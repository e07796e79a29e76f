use std::collections::HashSet;
use std::path::Path;

use super::tokenize::normalize_word;
use crate::error::{Error, Result};

const DEFAULT_LIST: &str = include_str!("../../data/stopwords_en.txt");

/// Case-insensitive stopword set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Stopwords {
    /// The bundled 174-word English list.
    pub fn english() -> Self {
        Self::parse(DEFAULT_LIST)
    }

    /// One token per line, `#` starts a comment line, blank lines ignored.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(normalize_word)
            .collect();
        Self { words }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn from_words<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        Self {
            words: words.into_iter().map(|w| normalize_word(w.as_ref())).collect(),
        }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token) || self.words.contains(&normalize_word(token))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}
