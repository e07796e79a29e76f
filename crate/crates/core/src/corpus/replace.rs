use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::tokenize::{normalize_word, word_spans};
use crate::error::{Error, Result};

/// Dialect-spelling corrections, variant → canonical.
///
/// Variants are matched case-insensitively on whole words. No canonical form
/// (nor any word inside a multi-word canonical form) may itself be a variant,
/// which makes application idempotent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReplacementTable {
    entries: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct Row {
    variant: String,
    canonical: String,
}

impl ReplacementTable {
    pub fn new<I, A, B>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut entries = BTreeMap::new();
        for (variant, canonical) in pairs {
            let variant = normalize_word(variant.as_ref().trim());
            let canonical = canonical.as_ref().trim().to_lowercase();
            if variant.is_empty() || canonical.is_empty() {
                return Err(Error::ReplacementTable("empty variant or canonical form".into()));
            }
            if word_spans(&variant) != [(0, variant.len())] {
                return Err(Error::ReplacementTable(format!(
                    "variant {variant:?} is not a single word"
                )));
            }
            if let Some(prev) = entries.insert(variant.clone(), canonical.clone()) {
                if prev != canonical {
                    return Err(Error::ReplacementTable(format!(
                        "variant {variant:?} maps to both {prev:?} and {canonical:?}"
                    )));
                }
            }
        }
        for canonical in entries.values() {
            for (s, e) in word_spans(canonical) {
                let word = normalize_word(&canonical[s..e]);
                if entries.contains_key(&word) {
                    return Err(Error::ReplacementTable(format!(
                        "canonical form {canonical:?} contains variant {word:?} (chained replacement)"
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    /// Reads a `variant,canonical` CSV.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        let rows: Vec<Row> = reader
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::csv(path, e))?;
        Self::new(rows.into_iter().map(|r| (r.variant, r.canonical)))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&str> {
        self.entries.get(&normalize_word(word)).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }
}

/// Replaces every whole-word variant in `text` with its canonical form,
/// leaving everything else byte-for-byte intact.
pub fn apply_replacements(text: &str, table: &ReplacementTable) -> String {
    if table.is_empty() {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for (s, e) in word_spans(text) {
        if let Some(canonical) = table.get(&text[s..e]) {
            out.push_str(&text[last..s]);
            out.push_str(canonical);
            last = e;
        }
    }
    out.push_str(&text[last..]);
    out
}
