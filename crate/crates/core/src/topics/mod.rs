//! Latent Dirichlet allocation fitted by collapsed Gibbs sampling.
//!
//! The sampler integrates out the topic-word and document-topic distributions
//! and resamples each token's topic from
//!
//! ```text
//! p(z = k | rest) ∝ (n_dk + α) · (n_kw + β) / (n_k + Vβ)
//! ```
//!
//! Point estimates come from the final sweep's counts. Sampling is
//! single-threaded and driven by a seeded ChaCha stream, so a fit is
//! bit-reproducible for a given matrix, config and scalar type.

mod relevance;

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use relevance::{relevance, topic_summary, write_summary_csv, RankedTerm, RelevanceRanking, SummaryRow};

use crate::corpus::{DocTermMatrix, Vocabulary};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MODEL_FORMAT: &str = "textcontrast-lda";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Poisson document-length rate of the generative story. Carried for
    /// completeness; inference conditions on the observed lengths.
    #[serde(default)]
    pub xi: Option<f64>,
}

impl LdaConfig {
    /// `α = 50/K`, `β = 0.01`, 1000 sweeps with 200 burn-in.
    pub fn new(k: usize) -> Self {
        LdaDefaults::default().for_k(k, 0)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("LDA config: {m}")));
        if self.k == 0 {
            return bad("K must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) || !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("alpha and beta must be positive and finite");
        }
        if self.iterations <= self.burn_in {
            return bad("iterations must exceed burn_in");
        }
        Ok(())
    }
}

/// Hyperparameters shared by every fit of a K sweep. `alpha = None` means
/// `50 / K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaDefaults {
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
}

impl Default for LdaDefaults {
    fn default() -> Self {
        Self {
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            burn_in: 200,
        }
    }
}

impl LdaDefaults {
    pub fn for_k(&self, k: usize, seed: u64) -> LdaConfig {
        LdaConfig {
            k,
            alpha: self.alpha.unwrap_or(50.0 / k.max(1) as f64),
            beta: self.beta,
            iterations: self.iterations,
            burn_in: self.burn_in,
            seed,
            xi: None,
        }
    }
}

/// Fitted topic model: `phi` is K×V, `theta` is D×K (rows in `doc_ids`
/// order), `marginals` is the corpus term distribution `p_w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct TopicModel<F = f64> {
    pub config: LdaConfig,
    pub vocab: Vocabulary,
    pub doc_ids: Vec<String>,
    pub phi: Vec<Vec<F>>,
    pub theta: Vec<Vec<F>>,
    pub marginals: Vec<F>,
    /// Documents with no in-vocabulary tokens; their theta rows are uniform.
    pub empty_docs: Vec<String>,
}

impl<F: Scalar> TopicModel<F> {
    pub fn k(&self) -> usize {
        self.phi.len()
    }

    pub fn doc_index(&self) -> HashMap<&str, usize> {
        self.doc_ids.iter().enumerate().map(|(i, d)| (d.as_str(), i)).collect()
    }

    pub fn theta_of(&self, doc_id: &str) -> Option<&[F]> {
        self.doc_ids.iter().position(|d| d == doc_id).map(|i| self.theta[i].as_slice())
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        #[serde(bound = "F: Scalar")]
        struct Out<'a, F: Scalar> {
            format: &'static str,
            version: u32,
            #[serde(flatten)]
            model: &'a TopicModel<F>,
        }
        Ok(serde_json::to_string(&Out {
            format: MODEL_FORMAT,
            version: MODEL_VERSION,
            model: self,
        })?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(bound = "F: Scalar")]
        struct In<F: Scalar> {
            format: String,
            version: u32,
            #[serde(flatten)]
            model: TopicModel<F>,
        }
        let parsed: In<F> = serde_json::from_str(json)?;
        if parsed.format != MODEL_FORMAT {
            return Err(Error::Config(format!("not a topic model file: format {:?}", parsed.format)));
        }
        if parsed.version != MODEL_VERSION {
            return Err(Error::Version {
                found: parsed.version,
                expected: MODEL_VERSION,
            });
        }
        Ok(parsed.model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_json()?.as_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

/// Collapsed Gibbs count state shared by fitting and fold-in.
struct GibbsState {
    k: usize,
    /// token → (doc, word)
    tokens: Vec<(u32, u32)>,
    z: Vec<u32>,
    doc_topic: Vec<u32>,
    word_topic: Vec<u32>,
    topic_total: Vec<u32>,
}

impl GibbsState {
    fn new(dtm: &DocTermMatrix, k: usize, rng: &mut ChaCha8Rng) -> Self {
        let v = dtm.vocab_size();
        let mut tokens = Vec::with_capacity(dtm.total_tokens() as usize);
        for (d, row) in dtm.rows().iter().enumerate() {
            for &(w, c) in row {
                tokens.extend(std::iter::repeat_n((d as u32, w), c as usize));
            }
        }
        let mut s = Self {
            k,
            z: Vec::with_capacity(tokens.len()),
            doc_topic: vec![0; dtm.docs() * k],
            word_topic: vec![0; v * k],
            topic_total: vec![0; k],
            tokens,
        };
        for i in 0..s.tokens.len() {
            let (d, w) = s.tokens[i];
            let t = rng.random_range(0..k as u32);
            s.z.push(t);
            s.add(d, w, t);
        }
        s
    }

    #[inline]
    fn add(&mut self, d: u32, w: u32, t: u32) {
        let (k, t) = (self.k, t as usize);
        self.doc_topic[d as usize * k + t] += 1;
        self.word_topic[w as usize * k + t] += 1;
        self.topic_total[t] += 1;
    }

    #[inline]
    fn remove(&mut self, d: u32, w: u32, t: u32) {
        let (k, t) = (self.k, t as usize);
        self.doc_topic[d as usize * k + t] -= 1;
        self.word_topic[w as usize * k + t] -= 1;
        self.topic_total[t] -= 1;
    }

    fn sweep<F: Scalar>(&mut self, alpha: F, beta: F, v_beta: F, rng: &mut ChaCha8Rng, cdf: &mut [F]) {
        let k = self.k;
        for i in 0..self.tokens.len() {
            let (d, w) = self.tokens[i];
            self.remove(d, w, self.z[i]);
            let dt = &self.doc_topic[d as usize * k..(d as usize + 1) * k];
            let wt = &self.word_topic[w as usize * k..(w as usize + 1) * k];
            let mut acc = F::zero();
            for t in 0..k {
                acc += (F::from_u32(dt[t]).unwrap() + alpha) * (F::from_u32(wt[t]).unwrap() + beta)
                    / (F::from_u32(self.topic_total[t]).unwrap() + v_beta);
                cdf[t] = acc;
            }
            let t = draw(cdf, acc, rng);
            self.z[i] = t as u32;
            self.add(d, w, t as u32);
        }
    }
}

/// Index of the first cumulative weight exceeding a uniform draw in
/// `[0, total)`.
#[inline]
fn draw<F: Scalar>(cdf: &[F], total: F, rng: &mut ChaCha8Rng) -> usize {
    let u = F::lit(rng.random::<f64>()) * total;
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

pub fn fit_lda<F: Scalar>(vocab: &Vocabulary, dtm: &DocTermMatrix, config: &LdaConfig) -> Result<TopicModel<F>> {
    config.validate()?;
    if vocab.len() != dtm.vocab_size() {
        return Err(Error::LengthMismatch {
            left: vocab.len(),
            right: dtm.vocab_size(),
        });
    }
    let total = dtm.total_tokens();
    if dtm.docs() == 0 || total == 0 {
        return Err(Error::EmptyCorpus);
    }
    let k = config.k;
    let v = dtm.vocab_size();
    let alpha = F::lit(config.alpha);
    let beta = F::lit(config.beta);
    let v_beta = beta * F::from_count(v);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = GibbsState::new(dtm, k, &mut rng);
    let mut cdf = vec![F::zero(); k];
    for _ in 0..config.iterations {
        state.sweep(alpha, beta, v_beta, &mut rng, &mut cdf);
    }

    let phi = (0..k)
        .map(|t| {
            let denom = F::from_u32(state.topic_total[t]).unwrap() + v_beta;
            (0..v)
                .map(|w| (F::from_u32(state.word_topic[w * k + t]).unwrap() + beta) / denom)
                .collect()
        })
        .collect();
    let k_alpha = alpha * F::from_count(k);
    let theta = (0..dtm.docs())
        .map(|d| {
            let row = &state.doc_topic[d * k..(d + 1) * k];
            let n_d = F::from_u64(dtm.row_total(d)).unwrap();
            row.iter().map(|&c| (F::from_u32(c).unwrap() + alpha) / (n_d + k_alpha)).collect()
        })
        .collect();
    let total_f = F::from_u64(total).unwrap();
    let marginals = dtm
        .column_totals()
        .into_iter()
        .map(|c| F::from_u64(c).unwrap() / total_f)
        .collect();

    Ok(TopicModel {
        config: config.clone(),
        vocab: vocab.clone(),
        doc_ids: dtm.doc_ids().to_vec(),
        phi,
        theta,
        marginals,
        empty_docs: dtm.empty_docs().into_iter().map(String::from).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct Inference<F = f64> {
    pub theta: Vec<F>,
    pub in_vocab_tokens: usize,
    /// Set when no token was in the model's vocabulary and `theta` fell back
    /// to uniform.
    pub fallback: bool,
}

/// Fold-in Gibbs sampling for an unseen document with `phi` held fixed.
/// Tokens outside the model vocabulary are ignored.
pub fn infer_theta<F: Scalar, S: AsRef<str>>(
    model: &TopicModel<F>,
    doc: &[S],
    iterations: usize,
    seed: u64,
) -> Inference<F> {
    let k = model.k();
    let words: Vec<usize> = doc.iter().filter_map(|t| model.vocab.id(t.as_ref())).collect();
    if words.is_empty() {
        return Inference {
            theta: vec![F::one() / F::from_count(k); k],
            in_vocab_tokens: 0,
            fallback: true,
        };
    }
    let alpha = F::lit(model.config.alpha);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u32; k];
    let mut z: Vec<usize> = words
        .iter()
        .map(|_| {
            let t = rng.random_range(0..k);
            counts[t] += 1;
            t
        })
        .collect();
    let mut cdf = vec![F::zero(); k];
    for _ in 0..iterations {
        for (i, &w) in words.iter().enumerate() {
            counts[z[i]] -= 1;
            let mut acc = F::zero();
            for t in 0..k {
                acc += (F::from_u32(counts[t]).unwrap() + alpha) * model.phi[t][w];
                cdf[t] = acc;
            }
            let t = draw(&cdf, acc, &mut rng);
            z[i] = t;
            counts[t] += 1;
        }
    }
    let denom = F::from_count(words.len()) + alpha * F::from_count(k);
    Inference {
        theta: counts.iter().map(|&c| (F::from_u32(c).unwrap() + alpha) / denom).collect(),
        in_vocab_tokens: words.len(),
        fallback: false,
    }
}

/// Greedy one-to-one matching of `other`'s topics onto `reference`'s by
/// smallest L1 distance between φ rows. Returns `m` with `other[m[i]]`
/// matched to `reference[i]`.
pub fn align_topics<F: Scalar>(reference: &[Vec<F>], other: &[Vec<F>]) -> Vec<usize> {
    let k = reference.len();
    let mut pairs: Vec<(F, usize, usize)> = Vec::with_capacity(k * other.len());
    for (i, r) in reference.iter().enumerate() {
        for (j, o) in other.iter().enumerate() {
            let d = r.iter().zip(o).map(|(&a, &b)| (a - b).abs()).fold(F::zero(), |x, y| x + y);
            pairs.push((d, i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut mapping = vec![usize::MAX; k];
    let mut used = vec![false; other.len()];
    for (_, i, j) in pairs {
        if mapping[i] == usize::MAX && !used[j] {
            mapping[i] = j;
            used[j] = true;
        }
    }
    mapping
}
