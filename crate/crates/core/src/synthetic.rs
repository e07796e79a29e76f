//! Seeded synthetic corpora and point clouds with known structure, used by the
//! test suites and the `synth` subcommand.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::{Corpus, Document, Group, PreprocessedDoc};
use crate::error::{Error, Result};
use crate::predict::LabeledPoint;
use crate::scalar::Scalar;

pub const RECOVERY_TOPICS: [[&str; 3]; 2] = [["a", "b", "c"], ["x", "y", "z"]];

/// Documents drawn each from a single three-word vocabulary.
#[derive(Debug, Clone)]
pub struct RecoveryCorpus {
    pub docs: Vec<PreprocessedDoc>,
    /// Index into [`RECOVERY_TOPICS`] of each document's source.
    pub source: Vec<usize>,
}

/// `docs_per_topic` documents per vocabulary, `tokens` uniform draws each.
pub fn recovery_corpus(docs_per_topic: usize, tokens: usize, seed: u64) -> RecoveryCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::new();
    let mut source = Vec::new();
    for (t, words) in RECOVERY_TOPICS.iter().enumerate() {
        for i in 0..docs_per_topic {
            docs.push(PreprocessedDoc {
                id: format!("t{t}_{i:03}"),
                tokens: (0..tokens)
                    .map(|_| words[rng.random_range(0..words.len())].to_string())
                    .collect(),
            });
            source.push(t);
        }
    }
    RecoveryCorpus { docs, source }
}

const COMMON_WORDS: &[&str] = &[
    "work", "year", "people", "remember", "mother", "house", "children", "day", "old", "family", "time",
    "river", "road", "winter", "dinner",
];
const A_WORDS: &[&str] = &[
    "cotton", "field", "overseer", "plantation", "cabin", "whipped", "patrollers", "quarters", "auction", "hoe",
    "bell", "lash",
];
const B_WORDS: &[&str] = &[
    "church", "school", "town", "store", "happy", "preacher", "singing", "wedding", "teacher", "garden", "picnic",
    "railroad",
];
const SENTENCE_LEN: usize = 12;

/// Knobs for [`contrast_corpus`].
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastSpec {
    pub docs_per_group: usize,
    pub unknown_docs: usize,
    pub words_a: usize,
    pub words_b: usize,
    /// Probability that a token comes from the document's group vocabulary
    /// rather than the shared one.
    pub group_share: f64,
}

impl Default for ContrastSpec {
    fn default() -> Self {
        Self {
            docs_per_group: 30,
            unknown_docs: 4,
            words_a: 180,
            words_b: 150,
            group_share: 0.5,
        }
    }
}

fn contrast_text(rng: &mut ChaCha8Rng, theme: &[&str], words: usize, share: f64) -> String {
    let mut out = String::new();
    for i in 0..words {
        let pool = if rng.random_bool(share) { theme } else { COMMON_WORDS };
        let w = pool[rng.random_range(0..pool.len())];
        if i % SENTENCE_LEN == 0 {
            if i > 0 {
                out.push_str(". ");
            }
            let mut c = w.chars();
            out.extend(c.next().map(|f| f.to_ascii_uppercase()));
            out.push_str(c.as_str());
        } else {
            out.push(' ');
            out.push_str(w);
        }
    }
    out.push('.');
    out
}

/// Two groups sharing a common vocabulary, each mixing in its own themed
/// words; unknown documents alternate between the two generators. Document
/// lengths vary by ±10% around the group's target.
pub fn contrast_corpus(spec: &ContrastSpec, seed: u64) -> Result<Corpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::new();
    let jitter = |rng: &mut ChaCha8Rng, n: usize| {
        let d = (n / 10).max(1);
        rng.random_range(n.saturating_sub(d).max(1)..=n + d)
    };
    for (g, theme, words) in [(Group::A, A_WORDS, spec.words_a), (Group::B, B_WORDS, spec.words_b)] {
        for i in 0..spec.docs_per_group {
            let n = jitter(&mut rng, words);
            let text = contrast_text(&mut rng, theme, n, spec.group_share);
            let state = if i % 2 == 0 { "Arkansas" } else { "Georgia" };
            docs.push(Document::new(format!("{g}{i:03}"), text, g, Some(state.into())));
        }
    }
    for i in 0..spec.unknown_docs {
        let (theme, words) = if i % 2 == 0 { (A_WORDS, spec.words_a) } else { (B_WORDS, spec.words_b) };
        let n = jitter(&mut rng, words);
        let text = contrast_text(&mut rng, theme, n, spec.group_share);
        docs.push(Document::new(format!("u{i:03}"), text, Group::Unknown, Some("Arkansas".into())));
    }
    Corpus::new(docs)
}

/// Which generator each unknown document of [`contrast_corpus`] came from.
pub fn contrast_unknown_truth(spec: &ContrastSpec) -> BTreeMap<String, Group> {
    (0..spec.unknown_docs)
        .map(|i| (format!("u{i:03}"), if i % 2 == 0 { Group::A } else { Group::B }))
        .collect()
}

/// Sentiment lexicon (TSV) covering a few words of [`contrast_corpus`].
pub fn contrast_lexicon() -> &'static str {
    "# token\tscore\nhappy\t0.75\nsinging\t0.5\nwedding\t0.5\npicnic\t0.4\ngarden\t0.25\n\
     whipped\t-0.625\nlash\t-0.5\nauction\t-0.375\noverseer\t-0.25\nmaster\t0.125\nwork\t-0.125\nfamily\t0.375\n"
}

/// Points around two centres: group A at the origin, group B at
/// `separation` along every axis, isotropic Gaussian noise of `spread`.
pub fn cluster_points<F: Scalar>(
    per_cluster: usize,
    dim: usize,
    separation: f64,
    spread: f64,
    seed: u64,
) -> Vec<LabeledPoint<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spread).expect("finite spread");
    let mut out = Vec::with_capacity(2 * per_cluster);
    for (g, centre) in [(Group::A, 0.0), (Group::B, separation)] {
        for i in 0..per_cluster {
            let features = (0..dim).map(|_| F::lit(centre + noise.sample(&mut rng))).collect();
            out.push(LabeledPoint::new(format!("{}{i:03}", g.to_string().to_lowercase()), features, g));
        }
    }
    out
}

/// Writes each document to `dir/texts/<id>.txt` and a manifest
/// `dir/manifest.csv` (`id,path,group,state`), returning the manifest path.
pub fn write_corpus(corpus: &Corpus, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    let texts = dir.join("texts");
    fs::create_dir_all(&texts).map_err(|e| Error::io(&texts, e))?;
    let manifest = dir.join("manifest.csv");
    let mut w = csv::Writer::from_path(&manifest).map_err(|e| Error::csv(&manifest, e))?;
    w.write_record(["id", "path", "group", "state"])
        .map_err(|e| Error::csv(&manifest, e))?;
    for d in corpus.documents() {
        let rel = format!("texts/{}.txt", d.id);
        let path = dir.join(&rel);
        fs::write(&path, &d.text).map_err(|e| Error::io(&path, e))?;
        w.write_record([d.id.as_str(), &rel, &d.group.to_string(), d.state.as_deref().unwrap_or("")])
            .map_err(|e| Error::csv(&manifest, e))?;
    }
    w.flush().map_err(|e| Error::io(&manifest, e))?;
    Ok(manifest)
}
