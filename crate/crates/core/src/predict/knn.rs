//! k-nearest-neighbour group prediction under Euclidean distance, with
//! stratified cross-validation over a grid of k.
//!
//! Neighbours are ordered by (distance, doc id). A tied vote goes to the
//! label of the single nearest neighbour.

use std::cmp::Ordering;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Group;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::squared_distance;

pub const CV_CSV_HEADER: &str = "k,accuracy";
pub const PREDICTION_CSV_HEADER: &str = "doc_id,predicted_group,margin";

/// The k grid used when none is given.
pub fn default_k_values() -> Vec<usize> {
    (1..=41).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct LabeledPoint<F = f64> {
    pub id: String,
    pub features: Vec<F>,
    pub group: Group,
}

impl<F: Scalar> LabeledPoint<F> {
    pub fn new(id: impl Into<String>, features: Vec<F>, group: Group) -> Self {
        Self {
            id: id.into(),
            features,
            group,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct Prediction<F = f64> {
    pub doc_id: String,
    pub group: Group,
    /// `|votes_A − votes_B| / k`.
    pub margin: F,
}

/// Rows are the true group, columns the predicted one: `[[AA, AB], [BA, BB]]`.
pub type Confusion = [[usize; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnResult {
    pub k: usize,
    /// Pooled over all held-out points; equals the confusion trace over its total.
    pub accuracy: f64,
    pub fold_accuracies: Vec<f64>,
    pub confusion: Confusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub results: Vec<KnnResult>,
    /// Highest accuracy; ties go to the smallest k.
    pub best_k: Option<usize>,
    pub skipped_k: Vec<usize>,
    pub folds: usize,
}

impl CrossValidation {
    pub fn best(&self) -> Option<&KnnResult> {
        self.best_k.and_then(|k| self.results.iter().find(|r| r.k == k))
    }
}

fn group_index(g: Group) -> usize {
    match g {
        Group::A => 0,
        Group::B => 1,
        Group::Unknown => unreachable!("training points are labeled"),
    }
}

/// Training indices ordered by (distance to `query`, id).
fn neighbour_order<F: Scalar>(train: &[&LabeledPoint<F>], query: &[F]) -> Vec<usize> {
    let dist: Vec<F> = train.iter().map(|p| squared_distance(&p.features, query)).collect();
    let mut order: Vec<usize> = (0..train.len()).collect();
    order.sort_by(|&i, &j| {
        dist[i]
            .partial_cmp(&dist[j])
            .unwrap_or(Ordering::Equal)
            .then_with(|| train[i].id.cmp(&train[j].id))
    });
    order
}

fn vote<F: Scalar>(train: &[&LabeledPoint<F>], order: &[usize], k: usize) -> (Group, F) {
    let a = order[..k].iter().filter(|&&i| train[i].group == Group::A).count();
    let b = k - a;
    let group = match a.cmp(&b) {
        Ordering::Greater => Group::A,
        Ordering::Less => Group::B,
        Ordering::Equal => train[order[0]].group,
    };
    (group, F::from_count(a.abs_diff(b)) / F::from_count(k))
}

fn check_training<F: Scalar>(train: &[LabeledPoint<F>]) -> Result<()> {
    if let Some(p) = train.iter().find(|p| !p.group.is_labeled()) {
        return Err(Error::Config(format!("training point {:?} has no group label", p.id)));
    }
    if let Some(first) = train.first() {
        let width = first.features.len();
        if let Some(p) = train.iter().find(|p| p.features.len() != width) {
            return Err(Error::LengthMismatch {
                left: width,
                right: p.features.len(),
            });
        }
    }
    Ok(())
}

/// Labels each query by majority vote among its `k` nearest training points.
pub fn knn_predict<F: Scalar>(
    train: &[LabeledPoint<F>],
    queries: &[LabeledPoint<F>],
    k: usize,
) -> Result<Vec<Prediction<F>>> {
    if queries.is_empty() {
        return Ok(Vec::new());
    }
    check_training(train)?;
    if k == 0 || k > train.len() {
        return Err(Error::Config(format!(
            "k = {k} must be in 1..={} (number of labeled points)",
            train.len()
        )));
    }
    let width = train[0].features.len();
    if let Some(q) = queries.iter().find(|q| q.features.len() != width) {
        return Err(Error::LengthMismatch {
            left: width,
            right: q.features.len(),
        });
    }
    let refs: Vec<&LabeledPoint<F>> = train.iter().collect();
    Ok(queries
        .par_iter()
        .map(|q| {
            let order = neighbour_order(&refs, &q.features);
            let (group, margin) = vote(&refs, &order, k);
            Prediction {
                doc_id: q.id.clone(),
                group,
                margin,
            }
        })
        .collect())
}

/// Assigns each point to one of `folds` folds, class by class in shuffled
/// order, continuing the round-robin across classes so fold sizes differ by
/// at most one and each fold's class counts differ from the ideal by at most one.
pub fn stratified_folds<F: Scalar>(points: &[LabeledPoint<F>], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; points.len()];
    let mut next = 0;
    for g in [Group::A, Group::B] {
        let mut members: Vec<usize> = (0..points.len()).filter(|&i| points[i].group == g).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next;
            next = (next + 1) % folds;
        }
    }
    assignment
}

/// Stratified `folds`-fold cross-validation for every k in `k_values`.
///
/// `folds == points.len()` is leave-one-out. A k not smaller than the
/// smallest training fold is skipped with a warning.
pub fn knn_cross_validate<F: Scalar>(
    points: &[LabeledPoint<F>],
    k_values: &[usize],
    folds: usize,
    seed: u64,
) -> Result<CrossValidation> {
    check_training(points)?;
    if points.len() < 2 {
        return Err(Error::SampleTooSmall {
            needed: 2,
            got: points.len(),
        });
    }
    if folds < 2 || folds > points.len() {
        return Err(Error::Config(format!(
            "folds = {folds} must be in 2..={} (number of labeled points)",
            points.len()
        )));
    }
    let assignment = stratified_folds(points, folds, seed);
    let min_train = (0..folds)
        .map(|f| assignment.iter().filter(|&&a| a != f).count())
        .min()
        .unwrap_or(0);

    let mut usable: Vec<usize> = Vec::new();
    let mut skipped = Vec::new();
    for &k in k_values {
        if k == 0 || k >= min_train {
            log::warn!("skipping k = {k}: smallest training fold has {min_train} points");
            skipped.push(k);
        } else if !usable.contains(&k) {
            usable.push(k);
        }
    }
    let k_max = usable.iter().copied().max().unwrap_or(0);

    // per fold, per usable k: confusion counts
    let per_fold: Vec<Vec<Confusion>> = (0..folds)
        .into_par_iter()
        .map(|f| {
            let train: Vec<&LabeledPoint<F>> = points
                .iter()
                .zip(&assignment)
                .filter(|&(_, &a)| a != f)
                .map(|(p, _)| p)
                .collect();
            let mut conf = vec![[[0usize; 2]; 2]; usable.len()];
            for (p, _) in points.iter().zip(&assignment).filter(|&(_, &a)| a == f) {
                let mut order = neighbour_order(&train, &p.features);
                order.truncate(k_max.max(1));
                for (c, &k) in conf.iter_mut().zip(&usable) {
                    let (pred, _) = vote(&train, &order, k);
                    c[group_index(p.group)][group_index(pred)] += 1;
                }
            }
            conf
        })
        .collect();

    let results: Vec<KnnResult> = usable
        .iter()
        .enumerate()
        .map(|(ki, &k)| {
            let mut confusion = [[0usize; 2]; 2];
            let mut fold_accuracies = Vec::with_capacity(folds);
            for fold in &per_fold {
                let c = fold[ki];
                let total: usize = c.iter().flatten().sum();
                let correct = c[0][0] + c[1][1];
                fold_accuracies.push(if total == 0 { 0.0 } else { correct as f64 / total as f64 });
                for r in 0..2 {
                    for col in 0..2 {
                        confusion[r][col] += c[r][col];
                    }
                }
            }
            KnnResult {
                k,
                accuracy: confusion_accuracy(&confusion),
                fold_accuracies,
                confusion,
            }
        })
        .collect();

    let best_k = results
        .iter()
        .fold(None::<&KnnResult>, |best, r| match best {
            Some(b) if b.accuracy > r.accuracy || (b.accuracy == r.accuracy && b.k < r.k) => Some(b),
            _ => Some(r),
        })
        .map(|r| r.k);

    Ok(CrossValidation {
        results,
        best_k,
        skipped_k: skipped,
        folds,
    })
}

pub fn confusion_accuracy(c: &Confusion) -> f64 {
    let total: usize = c.iter().flatten().sum();
    if total == 0 {
        0.0
    } else {
        (c[0][0] + c[1][1]) as f64 / total as f64
    }
}

pub fn write_cv_csv<W: Write>(out: W, results: &[KnnResult]) -> Result<()> {
    let io = |e: csv::Error| Error::csv("<knn accuracy>", e);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CV_CSV_HEADER.split(',')).map_err(io)?;
    for r in results {
        w.write_record([r.k.to_string(), r.accuracy.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<knn accuracy>", e))
}

pub fn write_prediction_csv<F: Scalar, W: Write>(out: W, preds: &[Prediction<F>]) -> Result<()> {
    let io = |e: csv::Error| Error::csv("<knn predictions>", e);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PREDICTION_CSV_HEADER.split(',')).map_err(io)?;
    for p in preds {
        w.write_record([p.doc_id.clone(), p.group.to_string(), p.margin.to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<knn predictions>", e))
}
