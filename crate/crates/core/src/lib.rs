//! Quantify content and sentiment differences between two labeled groups of
//! documents: word-group frequencies, lexicon sentiment, comparative LDA topic
//! modelling, t-SNE embeddings and kNN group prediction.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the precision for the common cases.

// NaN must fail range checks, so negated comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod compare;
pub mod corpus;
pub mod error;
pub mod predict;
pub mod scalar;
pub mod seed;
pub mod sentiment;
pub mod stats;
pub mod synthetic;
pub mod topics;
pub mod wordfreq;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use scalar::Scalar;

pub type TTestResult = stats::TTestResult<f64>;
pub type TTestResult32 = stats::TTestResult<f32>;

pub type TopicModel64 = topics::TopicModel<f64>;
pub type TopicModel32 = topics::TopicModel<f32>;
pub type FrequencyComparison64 = wordfreq::FrequencyComparison<f64>;
pub type SentimentComparison64 = sentiment::SentimentComparison<f64>;
pub type SentimentLexicon64 = sentiment::SentimentLexicon<f64>;
pub type DistanceSweepRow64 = compare::DistanceSweepRow<f64>;
pub type TopicScoreRow64 = compare::TopicScoreRow<f64>;
pub type LabeledPoint64 = predict::LabeledPoint<f64>;
pub type EmbeddingPoint64 = predict::EmbeddingPoint<f64>;
