//! Run configuration: defaults, overlaid by a TOML or JSON file, then by
//! command-line overrides. The hash of the resolved configuration is stamped
//! on every artifact.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use textcontrast::predict::{default_k_values, TsneConfig};
use textcontrast::seed::derive_seed;
use textcontrast::topics::{LdaConfig, LdaDefaults};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LdaSection {
    pub k: usize,
    /// `None` means `50 / K`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub xi: Option<f64>,
    /// Fold-in sweeps when inferring θ for documents outside the model.
    pub infer_iterations: usize,
}

impl Default for LdaSection {
    fn default() -> Self {
        let d = LdaDefaults::default();
        Self {
            k: 10,
            alpha: d.alpha,
            beta: d.beta,
            iterations: d.iterations,
            burn_in: d.burn_in,
            xi: None,
            infer_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub k_min: usize,
    pub k_max: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { k_min: 2, k_max: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SentimentSection {
    pub target: String,
    pub top_n: usize,
}

impl Default for SentimentSection {
    fn default() -> Self {
        Self {
            target: "master".into(),
            top_n: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SummarySection {
    pub lambdas: Vec<f64>,
    pub top_n: usize,
}

impl Default for SummarySection {
    fn default() -> Self {
        Self {
            lambdas: vec![1.0, 0.4, 0.2],
            top_n: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TsneSection {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub exaggeration_factor: f64,
    pub exaggeration_iters: usize,
}

impl Default for TsneSection {
    fn default() -> Self {
        let d = TsneConfig::default();
        Self {
            perplexity: d.perplexity,
            iterations: d.iterations,
            learning_rate: d.learning_rate,
            exaggeration_factor: d.exaggeration_factor,
            exaggeration_iters: d.exaggeration_iters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KnnSection {
    pub k_values: Vec<usize>,
    pub folds: usize,
    /// Neighbour count for `predict label`; `None` uses the cross-validated best.
    pub k: Option<usize>,
}

impl Default for KnnSection {
    fn default() -> Self {
        Self {
            k_values: default_k_values(),
            folds: 10,
            k: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub manifest_path: Option<PathBuf>,
    pub replacements_path: Option<PathBuf>,
    /// `None` uses the bundled English list.
    pub stopwords_path: Option<PathBuf>,
    pub lexicon_path: Option<PathBuf>,
    /// `None` uses the bundled exclusion list.
    pub exclusions_path: Option<PathBuf>,
    /// `None` uses the bundled seven groups.
    pub wordgroups_path: Option<PathBuf>,
    pub group_a_label: String,
    pub group_b_label: String,
    /// Keep only documents whose state matches (case-insensitive).
    pub state: Option<String>,
    pub min_count: usize,
    pub seed: u64,
    /// Where artifacts go. Not part of the configuration hash.
    pub output_dir: PathBuf,
    pub lda: LdaSection,
    pub sweep: SweepSection,
    pub sentiment: SentimentSection,
    pub summary: SummarySection,
    pub tsne: TsneSection,
    pub knn: KnnSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifest_path: None,
            replacements_path: None,
            stopwords_path: None,
            lexicon_path: None,
            exclusions_path: None,
            wordgroups_path: None,
            group_a_label: "A".into(),
            group_b_label: "B".into(),
            state: None,
            min_count: 1,
            seed: 0,
            output_dir: PathBuf::from("out"),
            lda: LdaSection::default(),
            sweep: SweepSection::default(),
            sentiment: SentimentSection::default(),
            summary: SummarySection::default(),
            tsne: TsneSection::default(),
            knn: KnnSection::default(),
        }
    }
}

const PATH_KEYS: [&str; 6] = [
    "manifest_path",
    "replacements_path",
    "stopwords_path",
    "lexicon_path",
    "exclusions_path",
    "wordgroups_path",
];

impl RunConfig {
    pub fn lda_defaults(&self) -> LdaDefaults {
        LdaDefaults {
            alpha: self.lda.alpha,
            beta: self.lda.beta,
            iterations: self.lda.iterations,
            burn_in: self.lda.burn_in,
        }
    }

    pub fn lda_config(&self) -> LdaConfig {
        LdaConfig {
            xi: self.lda.xi,
            ..self.lda_defaults().for_k(self.lda.k, derive_seed(self.seed, "lda", 0))
        }
    }

    pub fn tsne_config(&self) -> TsneConfig {
        TsneConfig {
            perplexity: self.tsne.perplexity,
            iterations: self.tsne.iterations,
            learning_rate: self.tsne.learning_rate,
            exaggeration_factor: self.tsne.exaggeration_factor,
            exaggeration_iters: self.tsne.exaggeration_iters,
            seed: derive_seed(self.seed, "tsne", 0),
        }
    }

    pub fn knn_seed(&self) -> u64 {
        derive_seed(self.seed, "knn-folds", 0)
    }

    pub fn infer_seed(&self, index: usize) -> u64 {
        derive_seed(self.seed, "infer", index as u64)
    }

    /// Canonical JSON of everything that influences results.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Value::Object(m) = &mut v {
            m.remove("output_dir");
        }
        serde_json::to_string(&v).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn manifest(&self) -> Result<&Path> {
        self.manifest_path
            .as_deref()
            .context("no corpus manifest configured (set manifest_path or pass --manifest)")
    }
}

/// Reads a config file as a JSON value. `.json` files are JSON, anything else
/// TOML. Relative paths inside are resolved against the file's directory.
pub fn read_config_file(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut value: Value = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::from_str(&text).with_context(|| format!("parsing JSON config {}", path.display()))?
    } else {
        let t: toml::Value = toml::from_str(&text).with_context(|| format!("parsing TOML config {}", path.display()))?;
        serde_json::to_value(t)?
    };
    let base = path.parent().unwrap_or(Path::new(""));
    if let Value::Object(m) = &mut value {
        for key in PATH_KEYS.iter().chain(&["output_dir"]) {
            if let Some(Value::String(s)) = m.get(*key) {
                let p = Path::new(s);
                if p.is_relative() {
                    m.insert(key.to_string(), Value::String(base.join(p).to_string_lossy().into_owned()));
                }
            }
        }
    }
    Ok(value)
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// A `--set` value: JSON when it parses, otherwise a plain string.
pub fn raw_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Sets a dotted key such as `lda.k`.
pub fn set_dotted(target: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut cur = target;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            bail!("malformed key {key:?}");
        }
        let Value::Object(map) = cur else {
            bail!("{key:?}: {:?} is not a section", parts[..i].join("."));
        };
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        cur = map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split yields at least one part")
}

/// Builds the effective configuration from defaults, an optional file and
/// `(dotted key, value)` overrides applied in order.
pub fn resolve(file: Option<&Path>, overrides: &[(String, Value)]) -> Result<RunConfig> {
    let mut value = serde_json::to_value(RunConfig::default())?;
    if let Some(path) = file {
        merge(&mut value, read_config_file(path)?);
    }
    for (k, v) in overrides {
        set_dotted(&mut value, k, v.clone())?;
    }
    let config: RunConfig = serde_json::from_value(value).context("invalid configuration")?;
    validate(&config)?;
    Ok(config)
}

fn validate(c: &RunConfig) -> Result<()> {
    if c.group_a_label.trim().is_empty() || c.group_b_label.trim().is_empty() {
        bail!("group labels must be non-empty");
    }
    if c.group_a_label.eq_ignore_ascii_case(&c.group_b_label) {
        bail!("group labels must differ");
    }
    if c.min_count == 0 {
        bail!("min_count must be at least 1");
    }
    if c.sweep.k_min < 2 || c.sweep.k_min > c.sweep.k_max {
        bail!("sweep range must satisfy 2 <= k_min <= k_max");
    }
    if c.summary.lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
        bail!("summary lambdas must lie in [0, 1]");
    }
    if c.knn.k_values.is_empty() {
        bail!("knn.k_values must not be empty");
    }
    c.lda_config().validate()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_and_file_layering() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.toml");
        std::fs::write(&file, "seed = 5\nmanifest_path = \"corpus/manifest.csv\"\n[lda]\nk = 4\n").unwrap();
        let c = resolve(Some(&file), &[("lda.k".into(), raw_value("6")), ("state".into(), raw_value("Arkansas"))]).unwrap();
        assert_eq!(c.seed, 5);
        assert_eq!(c.lda.k, 6);
        assert_eq!(c.state.as_deref(), Some("Arkansas"));
        assert_eq!(c.manifest_path.unwrap(), dir.path().join("corpus/manifest.csv"));
        assert_eq!(c.lda.beta, 0.01);
    }

    #[test]
    fn json_file_and_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.json");
        std::fs::write(&file, r#"{"knn": {"folds": 5}}"#).unwrap();
        assert_eq!(resolve(Some(&file), &[]).unwrap().knn.folds, 5);
        assert!(resolve(None, &[("lda.kk".into(), raw_value("3"))]).is_err());
        assert!(resolve(None, &[("sweep.k_min".into(), raw_value("1"))]).is_err());
    }

    #[test]
    fn hash_ignores_output_dir_only() {
        let a = RunConfig::default();
        let b = RunConfig {
            output_dir: "elsewhere".into(),
            ..a.clone()
        };
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig { seed: 1, ..a.clone() };
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn derived_seeds_differ_by_stage() {
        let c = RunConfig::default();
        assert_ne!(c.lda_config().seed, c.tsne_config().seed);
        assert_ne!(c.knn_seed(), c.infer_seed(0));
    }
}
