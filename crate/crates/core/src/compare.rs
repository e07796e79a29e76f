//! Comparative topic modelling.
//!
//! The systematic test fits LDA on the whole corpus, halves one group at
//! random into train and validation sets, and compares two Euclidean
//! distances between average topic distributions: train↔validation (the
//! natural fluctuation baseline) and train↔other group. This is repeated for
//! a range of K. The manual test reports, per topic, the group means of θ,
//! their ratio (B ÷ A) and a Welch t-test.

use std::collections::HashMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DocTermMatrix, Group, Vocabulary};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed::derive_seed;
use crate::stats::{euclidean_distance, mean_vector, welch_t_test, TTestResult};
use crate::topics::{fit_lda, LdaDefaults, TopicModel};

pub const SWEEP_CSV_HEADER: &str = "K,baseline,dist";
pub const SCORE_CSV_HEADER: &str = "topic,mean_A,mean_B,score,t,df,p";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SplitDirection {
    #[serde(rename = "split_A_test_B")]
    SplitATestB,
    #[serde(rename = "split_B_test_A")]
    SplitBTestA,
}

impl SplitDirection {
    pub const BOTH: [SplitDirection; 2] = [SplitDirection::SplitATestB, SplitDirection::SplitBTestA];

    pub fn split_group(self) -> Group {
        match self {
            SplitDirection::SplitATestB => Group::A,
            SplitDirection::SplitBTestA => Group::B,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SplitDirection::SplitATestB => "split_A_test_B",
            SplitDirection::SplitBTestA => "split_B_test_A",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub direction: SplitDirection,
    pub seed: u64,
    pub train_ids: Vec<String>,
    pub valid_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

/// Random halving of the split group (train gets the floor half) with the
/// whole opposite group as the test set.
pub fn make_split(corpus: &Corpus, direction: SplitDirection, seed: u64) -> Result<SplitPlan> {
    let split_group = direction.split_group();
    let mut ids: Vec<String> = corpus.in_group(split_group).map(|d| d.id.clone()).collect();
    if ids.len() < 4 {
        return Err(Error::GroupTooSmall {
            group: split_group.to_string(),
            got: ids.len(),
            needed: 4,
        });
    }
    let test_ids: Vec<String> = corpus.in_group(split_group.other()).map(|d| d.id.clone()).collect();
    if test_ids.is_empty() {
        return Err(Error::GroupTooSmall {
            group: split_group.other().to_string(),
            got: 0,
            needed: 1,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let valid_ids = ids.split_off(ids.len() / 2);
    Ok(SplitPlan {
        direction,
        seed,
        train_ids: ids,
        valid_ids,
        test_ids,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct DistanceSweepRow<F = f64> {
    pub k: usize,
    pub baseline: F,
    pub dist: F,
}

fn rows_for<'a, F: Scalar>(model: &'a TopicModel<F>, index: &HashMap<&str, usize>, ids: &[String]) -> Result<Vec<&'a [F]>> {
    ids.iter()
        .map(|id| {
            index
                .get(id.as_str())
                .map(|&i| model.theta[i].as_slice())
                .ok_or_else(|| Error::Config(format!("document {id:?} is not in the topic model")))
        })
        .collect()
}

/// `(baseline, dist)` for one fitted model and split plan.
pub fn average_topic_distances<F: Scalar>(model: &TopicModel<F>, plan: &SplitPlan) -> Result<(F, F)> {
    let index = model.doc_index();
    let train = mean_vector(&rows_for(model, &index, &plan.train_ids)?)?;
    let valid = mean_vector(&rows_for(model, &index, &plan.valid_ids)?)?;
    let test = mean_vector(&rows_for(model, &index, &plan.test_ids)?)?;
    Ok((euclidean_distance(&train, &valid)?, euclidean_distance(&train, &test)?))
}

/// Seed used for the LDA fit at a given K of a sweep.
pub fn sweep_lda_seed(seed: u64, k: usize) -> u64 {
    derive_seed(seed, "sweep-lda", k as u64)
}

/// Seed used for the train/validation split at a given K of a sweep.
pub fn sweep_split_seed(seed: u64, direction: SplitDirection, k: usize) -> u64 {
    derive_seed(seed, direction.name(), k as u64)
}

/// Fits one model per K in `k_min..=k_max` on the full matrix.
///
/// Fits run in parallel; each one is seeded from `(seed, K)` only, so the
/// result does not depend on scheduling.
pub fn fit_sweep_models<F: Scalar>(
    vocab: &Vocabulary,
    dtm: &DocTermMatrix,
    k_min: usize,
    k_max: usize,
    defaults: &LdaDefaults,
    seed: u64,
) -> Result<Vec<TopicModel<F>>> {
    if k_min < 2 || k_min > k_max {
        return Err(Error::Config(format!("invalid sweep range {k_min}..={k_max}")));
    }
    (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            fit_lda(vocab, dtm, &defaults.for_k(k, sweep_lda_seed(seed, k))).map_err(|e| Error::Sweep {
                k,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Distance rows for already-fitted sweep models, with a fresh split per K.
pub fn sweep_rows<F: Scalar>(
    corpus: &Corpus,
    models: &[TopicModel<F>],
    direction: SplitDirection,
    seed: u64,
) -> Result<Vec<DistanceSweepRow<F>>> {
    models
        .iter()
        .map(|model| {
            let k = model.k();
            let plan = make_split(corpus, direction, sweep_split_seed(seed, direction, k))?;
            let (baseline, dist) = average_topic_distances(model, &plan)?;
            Ok(DistanceSweepRow { k, baseline, dist })
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn distance_sweep<F: Scalar>(
    corpus: &Corpus,
    vocab: &Vocabulary,
    dtm: &DocTermMatrix,
    direction: SplitDirection,
    k_min: usize,
    k_max: usize,
    defaults: &LdaDefaults,
    seed: u64,
) -> Result<Vec<DistanceSweepRow<F>>> {
    let models = fit_sweep_models(vocab, dtm, k_min, k_max, defaults, seed)?;
    sweep_rows(corpus, &models, direction, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct TopicScoreRow<F = f64> {
    pub topic: usize,
    pub mean_theta_a: F,
    pub mean_theta_b: F,
    /// `mean_theta_b / mean_theta_a`.
    pub score: F,
    pub test: TTestResult<F>,
}

pub fn topic_score_table<F: Scalar>(model: &TopicModel<F>, corpus: &Corpus) -> Result<Vec<TopicScoreRow<F>>> {
    let index = model.doc_index();
    let ids = |g: Group| -> Vec<String> {
        corpus
            .in_group(g)
            .filter(|d| index.contains_key(d.id.as_str()))
            .map(|d| d.id.clone())
            .collect()
    };
    let rows_a = rows_for(model, &index, &ids(Group::A))?;
    let rows_b = rows_for(model, &index, &ids(Group::B))?;
    for (g, rows) in [("A", &rows_a), ("B", &rows_b)] {
        if rows.len() < 2 {
            return Err(Error::GroupTooSmall {
                group: g.into(),
                got: rows.len(),
                needed: 2,
            });
        }
    }
    (0..model.k())
        .map(|topic| {
            let a: Vec<F> = rows_a.iter().map(|r| r[topic]).collect();
            let b: Vec<F> = rows_b.iter().map(|r| r[topic]).collect();
            let test = welch_t_test(&a, &b)?;
            Ok(TopicScoreRow {
                topic,
                mean_theta_a: test.mean_a,
                mean_theta_b: test.mean_b,
                score: test.mean_b / test.mean_a,
                test,
            })
        })
        .collect()
}

pub fn write_sweep_csv<F: Scalar, W: Write>(out: W, rows: &[DistanceSweepRow<F>]) -> Result<()> {
    let io = |e: csv::Error| Error::csv("<sweep>", e);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER.split(',')).map_err(io)?;
    for r in rows {
        w.write_record([r.k.to_string(), r.baseline.to_string(), r.dist.to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<sweep>", e))
}

pub fn write_score_csv<F: Scalar, W: Write>(out: W, rows: &[TopicScoreRow<F>]) -> Result<()> {
    let io = |e: csv::Error| Error::csv("<topic scores>", e);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCORE_CSV_HEADER.split(',')).map_err(io)?;
    for r in rows {
        w.write_record([
            r.topic.to_string(),
            r.mean_theta_a.to_string(),
            r.mean_theta_b.to_string(),
            r.score.to_string(),
            r.test.t.to_string(),
            r.test.df.to_string(),
            r.test.p_two_sided.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<topic scores>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Vocabulary};
    use crate::topics::LdaConfig;

    fn corpus(n_a: usize, n_b: usize) -> Corpus {
        let docs = (0..n_a)
            .map(|i| Document::new(format!("a{i:02}"), "x", Group::A, None))
            .chain((0..n_b).map(|i| Document::new(format!("b{i:02}"), "y", Group::B, None)))
            .chain(std::iter::once(Document::new("u", "z", Group::Unknown, None)))
            .collect();
        Corpus::new(docs).unwrap()
    }

    #[test]
    fn split_sizes() {
        let p = make_split(&corpus(10, 6), SplitDirection::SplitATestB, 1).unwrap();
        assert_eq!((p.train_ids.len(), p.valid_ids.len(), p.test_ids.len()), (5, 5, 6));
        let p = make_split(&corpus(7, 6), SplitDirection::SplitATestB, 1).unwrap();
        assert_eq!((p.train_ids.len(), p.valid_ids.len()), (3, 4));
        let p = make_split(&corpus(7, 6), SplitDirection::SplitBTestA, 1).unwrap();
        assert_eq!((p.train_ids.len(), p.valid_ids.len(), p.test_ids.len()), (3, 3, 7));
        assert!(p.test_ids.iter().all(|id| id.starts_with('a')));
    }

    #[test]
    fn split_is_a_partition_and_deterministic() {
        let c = corpus(11, 5);
        let p = make_split(&c, SplitDirection::SplitATestB, 42).unwrap();
        assert_eq!(p, make_split(&c, SplitDirection::SplitATestB, 42).unwrap());
        let mut all: Vec<String> = p.train_ids.iter().chain(&p.valid_ids).cloned().collect();
        all.sort();
        let expected: Vec<String> = c.in_group(Group::A).map(|d| d.id.clone()).collect();
        assert_eq!(all, expected);
        assert_ne!(p.train_ids, make_split(&c, SplitDirection::SplitATestB, 43).unwrap().train_ids);
    }

    #[test]
    fn undersized_split_group() {
        assert!(matches!(
            make_split(&corpus(3, 6), SplitDirection::SplitATestB, 1),
            Err(Error::GroupTooSmall { needed: 4, .. })
        ));
    }

    fn model_with_thetas(ids: Vec<String>, theta: Vec<Vec<f64>>) -> TopicModel {
        let k = theta[0].len();
        TopicModel {
            config: LdaConfig::new(k),
            vocab: Vocabulary::new(vec!["w".to_string()]),
            doc_ids: ids,
            phi: vec![vec![1.0]; k],
            theta,
            marginals: vec![1.0],
            empty_docs: vec![],
        }
    }

    #[test]
    fn identical_groups_score_one() {
        let c = corpus(3, 3);
        let rows = [vec![0.2, 0.8], vec![0.5, 0.5], vec![0.9, 0.1]];
        let ids: Vec<String> = c.documents().iter().map(|d| d.id.clone()).collect();
        let theta: Vec<Vec<f64>> = (0..3).chain(0..3).map(|i| rows[i].clone()).chain([vec![0.5, 0.5]]).collect();
        let m = model_with_thetas(ids, theta);
        for r in topic_score_table(&m, &c).unwrap() {
            assert_eq!(r.score, 1.0);
            assert_eq!(r.test.p_two_sided, 1.0);
        }
    }

    #[test]
    fn swapping_labels_inverts_scores() {
        let c = corpus(4, 5);
        let ids: Vec<String> = c.documents().iter().map(|d| d.id.clone()).collect();
        let theta: Vec<Vec<f64>> = (0..ids.len())
            .map(|i| {
                let x = 0.1 + 0.8 * ((i * 7 % 10) as f64 / 10.0);
                vec![x, 1.0 - x]
            })
            .collect();
        let m = model_with_thetas(ids, theta);
        let swapped = c.relabel(|d| d.group.other());
        let base = topic_score_table(&m, &c).unwrap();
        let sw = topic_score_table(&m, &swapped).unwrap();
        for (x, y) in base.iter().zip(&sw) {
            assert!((x.score - 1.0 / y.score).abs() < 1e-12);
            assert!((x.test.p_two_sided - y.test.p_two_sided).abs() < 1e-10);
        }
        let sum_a: f64 = base.iter().map(|r| r.mean_theta_a).sum();
        assert!((sum_a - 1.0).abs() < 1e-9);
    }

    #[test]
    fn distances_from_hand_built_model() {
        let c = corpus(4, 2);
        let ids: Vec<String> = c.documents().iter().map(|d| d.id.clone()).collect();
        let theta: Vec<Vec<f64>> = ids
            .iter()
            .map(|id| if id.starts_with('a') { vec![0.5, 0.5] } else { vec![0.8, 0.2] })
            .collect();
        let m = model_with_thetas(ids, theta);
        let plan = make_split(&c, SplitDirection::SplitATestB, 3).unwrap();
        let (baseline, dist) = average_topic_distances(&m, &plan).unwrap();
        assert_eq!(baseline, 0.0);
        assert!((dist - (2.0f64 * 0.09).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sweep_range_validation() {
        let c = corpus(4, 4);
        let docs = c.preprocess(&crate::corpus::Stopwords::default());
        let (v, m) = crate::corpus::build_dtm(&docs, 1).unwrap();
        let d = LdaDefaults::default();
        assert!(distance_sweep::<f64>(&c, &v, &m, SplitDirection::SplitATestB, 1, 3, &d, 0).is_err());
        assert!(distance_sweep::<f64>(&c, &v, &m, SplitDirection::SplitATestB, 5, 3, &d, 0).is_err());
    }
}
