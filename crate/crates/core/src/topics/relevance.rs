//! Term relevance within a topic:
//! `r(w, k | λ) = λ·ln φ_kw + (1 − λ)·ln(φ_kw / p_w)`.
//! λ = 1 ranks by in-topic probability, λ = 0 by lift over the corpus
//! marginal.

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::TopicModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const SUMMARY_CSV_HEADER: &str = "topic,lambda,rank,term,relevance";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct RankedTerm<F = f64> {
    pub term: String,
    pub relevance: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct RelevanceRanking<F = f64> {
    pub topic: usize,
    pub lambda: F,
    pub terms: Vec<RankedTerm<F>>,
}

pub(crate) fn relevance_score<F: Scalar>(phi: F, p_w: F, lambda: F) -> F {
    let ln_phi = phi.ln();
    lambda * ln_phi + (F::one() - lambda) * (ln_phi - p_w.ln())
}

/// Full vocabulary ranking for one topic, highest relevance first.
///
/// Ties on relevance fall back to φ (so λ = 1 reproduces the φ order even if
/// two distinct probabilities share a logarithm), then to the term itself.
pub fn relevance<F: Scalar>(model: &TopicModel<F>, topic: usize, lambda: F) -> Result<RelevanceRanking<F>> {
    if !(lambda >= F::zero() && lambda <= F::one()) {
        return Err(Error::Config(format!("lambda {lambda} outside [0, 1]")));
    }
    let phi = model
        .phi
        .get(topic)
        .ok_or_else(|| Error::Config(format!("topic {topic} out of range (K = {})", model.k())))?;
    let mut scored: Vec<(F, F, &str)> = phi
        .iter()
        .zip(&model.marginals)
        .zip(model.vocab.terms())
        .map(|((&p, &m), t)| (relevance_score(p, m, lambda), p, t.as_str()))
        .collect();
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal))
            .then_with(|| a.2.cmp(b.2))
    });
    Ok(RelevanceRanking {
        topic,
        lambda,
        terms: scored
            .into_iter()
            .map(|(r, _, t)| RankedTerm {
                term: t.to_string(),
                relevance: r,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct SummaryRow<F = f64> {
    pub topic: usize,
    pub lambda: F,
    /// 1-based position within the topic's list.
    pub rank: usize,
    pub term: String,
    pub relevance: F,
}

/// Top `top_n` terms (capped at V) for every topic and λ, topic-major.
pub fn topic_summary<F: Scalar>(model: &TopicModel<F>, lambdas: &[F], top_n: usize) -> Result<Vec<SummaryRow<F>>> {
    let mut rows = Vec::new();
    for topic in 0..model.k() {
        for &lambda in lambdas {
            let ranking = relevance(model, topic, lambda)?;
            rows.extend(ranking.terms.into_iter().take(top_n).enumerate().map(|(i, t)| SummaryRow {
                topic,
                lambda,
                rank: i + 1,
                term: t.term,
                relevance: t.relevance,
            }));
        }
    }
    Ok(rows)
}

pub fn write_summary_csv<F: Scalar, W: Write>(out: W, rows: &[SummaryRow<F>]) -> Result<()> {
    let io = |e: csv::Error| Error::csv("<topic summary>", e);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_CSV_HEADER.split(',')).map_err(io)?;
    for r in rows {
        w.write_record([
            r.topic.to_string(),
            r.lambda.to_string(),
            r.rank.to_string(),
            r.term.clone(),
            r.relevance.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<topic summary>", e))
}

#[cfg(test)]
mod tests {
    use super::super::{fit_lda, LdaConfig};
    use super::*;
    use crate::corpus::{build_dtm, PreprocessedDoc};

    #[test]
    fn hand_evaluated_case() {
        // 0.4·ln 0.5 + 0.6·ln 2 = 0.2·ln 2
        let r = relevance_score(0.5f64, 0.25, 0.4);
        assert!((r - 0.138_629).abs() < 1e-6);
        assert!((r - 0.2 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn zero_lift_at_lambda_zero() {
        assert_eq!(relevance_score(0.3f64, 0.3, 0.0), 0.0);
        assert_eq!(relevance_score(0.3f64, 0.1, 1.0), 0.3f64.ln());
    }

    fn model() -> TopicModel {
        let docs = vec![PreprocessedDoc {
            id: "x".into(),
            tokens: ["a", "a", "a", "b"].iter().map(|s| s.to_string()).collect(),
        }];
        let (v, m) = build_dtm(&docs, 1).unwrap();
        fit_lda(&v, &m, &LdaConfig { iterations: 10, burn_in: 0, ..LdaConfig::new(1) }).unwrap()
    }

    #[test]
    fn single_topic_summary_orders_by_count() {
        let rows = topic_summary(&model(), &[1.0], 3).unwrap();
        let terms: Vec<&str> = rows.iter().map(|r| r.term.as_str()).collect();
        assert_eq!(terms, ["a", "b"]);
        assert_eq!(rows[0].rank, 1);
    }

    #[test]
    fn lambda_out_of_range() {
        assert!(relevance(&model(), 0, 1.5).is_err());
        assert!(relevance(&model(), 0, -0.1).is_err());
        assert!(relevance(&model(), 3, 0.5).is_err());
    }

    #[test]
    fn summary_csv() {
        let rows = topic_summary(&model(), &[1.0, 0.4], 1).unwrap();
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SUMMARY_CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,1,1,a,"));
        assert!(lines[2].starts_with("0,0.4,1,"));
    }
}
