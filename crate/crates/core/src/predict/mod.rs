//! Two-dimensional embeddings of topic distributions and kNN group prediction.

pub mod knn;
pub mod tsne;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use knn::{
    default_k_values, knn_cross_validate, knn_predict, stratified_folds, write_cv_csv, write_prediction_csv,
    Confusion, CrossValidation, KnnResult, LabeledPoint, Prediction,
};
pub use tsne::{joint_affinities, tsne, Calibration, TsneConfig, TsneResult};

use crate::corpus::Group;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const EMBEDDING_CSV_HEADER: &str = "doc_id,x,y,group";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct EmbeddingPoint<F = f64> {
    pub doc_id: String,
    pub x: F,
    pub y: F,
    pub group: Group,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct Embedding<F = f64> {
    pub points: Vec<EmbeddingPoint<F>>,
    pub calibration: Vec<Calibration<F>>,
    pub kl_trace: Vec<(usize, F)>,
}

/// t-SNE of the points' feature vectors, carrying ids and groups through.
pub fn tsne_embed<F: Scalar>(points: &[LabeledPoint<F>], config: &TsneConfig) -> Result<Embedding<F>> {
    let data: Vec<Vec<F>> = points.iter().map(|p| p.features.clone()).collect();
    let result = tsne(&data, config)?;
    if result.embedding.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Config("t-SNE diverged to non-finite coordinates".into()));
    }
    Ok(Embedding {
        points: points
            .iter()
            .zip(&result.embedding)
            .map(|(p, &[x, y])| EmbeddingPoint {
                doc_id: p.id.clone(),
                x,
                y,
                group: p.group,
            })
            .collect(),
        calibration: result.calibration,
        kl_trace: result.kl_trace,
    })
}

pub fn write_embedding_csv<F: Scalar, W: Write>(out: W, points: &[EmbeddingPoint<F>]) -> Result<()> {
    let io = |e: csv::Error| Error::csv("<embedding>", e);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EMBEDDING_CSV_HEADER.split(',')).map_err(io)?;
    for p in points {
        w.write_record([p.doc_id.clone(), p.x.to_string(), p.y.to_string(), p.group.to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<embedding>", e))
}

/// Whether some line in the plane puts every A point strictly on one side and
/// every B point strictly on the other (perceptron on the lifted points; the
/// data are rescaled to unit spread first).
pub fn linearly_separable<F: Scalar>(points: &[EmbeddingPoint<F>]) -> bool {
    let labeled: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|p| p.group.is_labeled())
        .map(|p| {
            let s = if p.group == Group::A { 1.0 } else { -1.0 };
            (p.x.to_f64_lossy(), p.y.to_f64_lossy(), s)
        })
        .collect();
    if labeled.is_empty() {
        return true;
    }
    let n = labeled.len() as f64;
    let (mx, my) = labeled.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
    let spread = labeled
        .iter()
        .map(|p| (p.0 - mx).abs().max((p.1 - my).abs()))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let xs: Vec<[f64; 4]> = labeled
        .iter()
        .map(|&(x, y, s)| [(x - mx) / spread, (y - my) / spread, 1.0, s])
        .collect();
    let mut w = [0.0f64; 3];
    for _ in 0..10_000 {
        let mut clean = true;
        for p in &xs {
            let act = w[0] * p[0] + w[1] * p[1] + w[2] * p[2];
            if act * p[3] <= 0.0 {
                for c in 0..3 {
                    w[c] += p[3] * p[c];
                }
                clean = false;
            }
        }
        if clean {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ep(x: f64, y: f64, g: Group) -> EmbeddingPoint {
        EmbeddingPoint {
            doc_id: String::new(),
            x,
            y,
            group: g,
        }
    }

    #[test]
    fn separability_check() {
        let sep = [ep(0.0, 0.0, Group::A), ep(0.1, 1.0, Group::A), ep(3.0, 0.0, Group::B), ep(3.0, 2.0, Group::B)];
        assert!(linearly_separable(&sep));
        let xor = [ep(0.0, 0.0, Group::A), ep(1.0, 1.0, Group::A), ep(1.0, 0.0, Group::B), ep(0.0, 1.0, Group::B)];
        assert!(!linearly_separable(&xor));
    }

    #[test]
    fn embedding_csv() {
        let mut buf = Vec::new();
        write_embedding_csv(&mut buf, &[EmbeddingPoint { doc_id: "d1".into(), x: 0.5, y: -1.0, group: Group::Unknown }]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "doc_id,x,y,group\nd1,0.5,-1,unknown\n");
    }
}
