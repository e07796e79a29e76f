//! Lexicon sentiment: sentences containing a target word are scored by
//! summing the lexicon values of their tokens (no negation handling), then
//! compared between groups.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, Group};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::{welch_t_test, TTestResult};

const DEFAULT_EXCLUSIONS: &str = include_str!("../data/sentiment_exclusions.txt");

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SentimentLexicon<F = f64> {
    scores: HashMap<String, F>,
    exclusions: HashSet<String>,
}

fn comment_free_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses a one-token-per-line exclusion list.
pub fn parse_exclusions(text: &str) -> HashSet<String> {
    comment_free_lines(text).map(|(_, l)| l.to_lowercase()).collect()
}

/// The bundled exclusion list (just `master`).
pub fn default_exclusions() -> HashSet<String> {
    parse_exclusions(DEFAULT_EXCLUSIONS)
}

impl<F: Scalar> SentimentLexicon<F> {
    pub fn new<I, S>(scores: I, exclusions: HashSet<String>) -> Result<Self>
    where
        I: IntoIterator<Item = (S, F)>,
        S: Into<String>,
    {
        let mut map = HashMap::new();
        for (token, score) in scores {
            let token: String = token.into().to_lowercase();
            if !score.is_finite() || score < -F::one() || score > F::one() {
                return Err(Error::Lexicon(format!("score {score} for {token:?} outside [-1, 1]")));
            }
            map.insert(token, score);
        }
        Ok(Self {
            scores: map,
            exclusions: exclusions.into_iter().map(|t| t.to_lowercase()).collect(),
        })
    }

    /// Parses `token<TAB>score` lines; `#` lines are comments.
    pub fn parse_tsv(text: &str, exclusions: HashSet<String>) -> Result<Self> {
        let mut scores = Vec::new();
        for (line, l) in comment_free_lines(text) {
            let (token, score) = l
                .split_once('\t')
                .ok_or_else(|| Error::Lexicon(format!("line {line}: expected token<TAB>score")))?;
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|_| Error::Lexicon(format!("line {line}: bad score {score:?}")))?;
            scores.push((token.trim().to_string(), F::lit(score)));
        }
        Self::new(scores, exclusions)
    }

    pub fn from_files(lexicon: impl AsRef<Path>, exclusions: Option<&Path>) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let excl = match exclusions {
            Some(p) => parse_exclusions(&read(p)?),
            None => default_exclusions(),
        };
        Self::parse_tsv(&read(lexicon.as_ref())?, excl)
    }

    /// Score contributed by one token: zero when absent or excluded.
    pub fn score(&self, token: &str) -> F {
        if self.exclusions.contains(token) {
            return F::zero();
        }
        self.scores.get(token).copied().unwrap_or_else(F::zero)
    }

    pub fn with_exclusion(mut self, token: &str) -> Self {
        self.exclusions.insert(token.to_lowercase());
        self
    }

    /// Every score multiplied by `factor`. Used to check scale invariance; the
    /// result may leave `[-1, 1]`.
    pub fn scaled(&self, factor: F) -> Self {
        Self {
            scores: self.scores.iter().map(|(k, &v)| (k.clone(), v * factor)).collect(),
            exclusions: self.exclusions.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

pub fn sentence_score<F: Scalar, S: AsRef<str>>(sentence: &[S], lexicon: &SentimentLexicon<F>) -> F {
    sentence.iter().map(|t| lexicon.score(t.as_ref())).fold(F::zero(), |a, b| a + b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct SentimentComparison<F = f64> {
    pub target: String,
    pub mean_a: F,
    pub mean_b: F,
    pub n_sentences_a: usize,
    pub n_sentences_b: usize,
    pub test: TTestResult<F>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct WordContribution<F = f64> {
    pub token: String,
    pub frequency: usize,
    pub score: F,
    pub contribution: F,
}

/// Sentences containing `target`, in (document id, sentence index) order.
/// A sentence mentioning the target several times is yielded once.
fn target_sentences<'a>(
    docs: impl Iterator<Item = &'a Document>,
    target: &str,
) -> impl Iterator<Item = &'a [String]> {
    let target = target.to_string();
    let mut docs: Vec<&Document> = docs.collect();
    docs.sort_by(|a, b| a.id.cmp(&b.id));
    docs.into_iter().flat_map(move |d| {
        let target = target.clone();
        d.tokens
            .sentences
            .iter()
            .filter(move |s| s.contains(&target))
            .map(Vec::as_slice)
    })
}

pub fn compare_target_sentiment<F: Scalar>(
    corpus: &Corpus,
    target: &str,
    lexicon: &SentimentLexicon<F>,
) -> Result<SentimentComparison<F>> {
    let target = target.trim().to_lowercase();
    if target.is_empty() {
        return Err(Error::Config("empty sentiment target".into()));
    }
    let scores = |g: Group| -> Vec<F> {
        target_sentences(corpus.in_group(g), &target)
            .map(|s| sentence_score(s, lexicon))
            .collect()
    };
    let (a, b) = (scores(Group::A), scores(Group::B));
    for (g, v) in [("A", &a), ("B", &b)] {
        if v.len() < 2 {
            return Err(Error::GroupTooSmall {
                group: format!("{g} (sentences containing {target:?}; A has {}, B has {})", a.len(), b.len()),
                got: v.len(),
                needed: 2,
            });
        }
    }
    let test = welch_t_test(&a, &b)?;
    Ok(SentimentComparison {
        target,
        mean_a: test.mean_a,
        mean_b: test.mean_b,
        n_sentences_a: a.len(),
        n_sentences_b: b.len(),
        test,
    })
}

/// Frequency × score for every token in the target sentences of `docs`,
/// largest |contribution| first (ties by token), zero contributions dropped.
pub fn word_contributions<'a, F: Scalar>(
    docs: impl Iterator<Item = &'a Document>,
    target: &str,
    lexicon: &SentimentLexicon<F>,
    top_n: usize,
) -> Vec<WordContribution<F>> {
    let target = target.trim().to_lowercase();
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    for sentence in target_sentences(docs, &target) {
        for t in sentence {
            *freq.entry(t.as_str()).or_default() += 1;
        }
    }
    let mut out: Vec<WordContribution<F>> = freq
        .into_iter()
        .filter_map(|(token, frequency)| {
            let score = lexicon.score(token);
            let contribution = F::from_count(frequency) * score;
            (contribution != F::zero()).then(|| WordContribution {
                token: token.to_string(),
                frequency,
                score,
                contribution,
            })
        })
        .collect();
    out.sort_by(|x, y| {
        y.contribution
            .abs()
            .partial_cmp(&x.contribution.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| x.token.cmp(&y.token))
    });
    out.truncate(top_n);
    out
}

/// JSON report: comparison plus the top contributors of each group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct SentimentReport<F = f64> {
    pub comparison: SentimentComparison<F>,
    pub contributions_a: Vec<WordContribution<F>>,
    pub contributions_b: Vec<WordContribution<F>>,
}

pub fn sentiment_report<F: Scalar>(
    corpus: &Corpus,
    target: &str,
    lexicon: &SentimentLexicon<F>,
    top_n: usize,
) -> Result<SentimentReport<F>> {
    Ok(SentimentReport {
        comparison: compare_target_sentiment(corpus, target, lexicon)?,
        contributions_a: word_contributions(corpus.in_group(Group::A), target, lexicon, top_n),
        contributions_b: word_contributions(corpus.in_group(Group::B), target, lexicon, top_n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lex() -> SentimentLexicon {
        SentimentLexicon::new(
            [("good", 0.7), ("bad", -0.6), ("happy", 0.5), ("master", 0.3), ("zero", 0.0)],
            default_exclusions(),
        )
        .unwrap()
    }

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn sentence_scores() {
        assert_eq!(sentence_score(&s(&["nothing", "here"]), &lex()), 0.0);
        assert_eq!(sentence_score(&s(&["not", "happy"]), &lex()), 0.5);
        let v = sentence_score(&s(&["the", "good", "master", "was", "bad"]), &lex());
        assert!((v - 0.1).abs() < 1e-12);
    }

    fn corpus() -> Corpus {
        Corpus::new(vec![
            Document::new("a1", "The master bad. Nothing.", Group::A, None),
            Document::new("a2", "Master bad!", Group::A, None),
            Document::new("b1", "Master good. Master good.", Group::B, None),
            Document::new("b2", "Other stuff.", Group::B, None),
        ])
        .unwrap()
    }

    #[test]
    fn constructed_group_comparison() {
        let r = compare_target_sentiment(&corpus(), "master", &lex()).unwrap();
        assert_eq!((r.n_sentences_a, r.n_sentences_b), (2, 2));
        assert!((r.mean_a + 0.6).abs() < 1e-12 && (r.mean_b - 0.7).abs() < 1e-12);
    }

    #[test]
    fn too_few_target_sentences() {
        let err = compare_target_sentiment(&corpus(), "bad", &lex()).unwrap_err();
        assert!(matches!(err, Error::GroupTooSmall { got: 0, .. }));
    }

    #[test]
    fn repeated_target_counts_once() {
        let c = Corpus::new(vec![
            Document::new("a1", "master master bad.", Group::A, None),
            Document::new("a2", "master good.", Group::A, None),
            Document::new("b1", "master.", Group::B, None),
            Document::new("b2", "master.", Group::B, None),
        ])
        .unwrap();
        let r = compare_target_sentiment(&c, "master", &lex()).unwrap();
        assert_eq!(r.n_sentences_a, 2);
    }

    #[test]
    fn contributions() {
        let d = Document::new("x", "good good bad master zero", Group::A, None);
        let c = word_contributions([&d].into_iter(), "master", &lex(), 10);
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].token.as_str(), c[0].frequency), ("good", 2));
        assert!((c[0].contribution - 1.4).abs() < 1e-12);
        assert_eq!(c[1].token, "bad");
        assert!((c[1].contribution + 0.6).abs() < 1e-12);
        assert_eq!(word_contributions([&d].into_iter(), "master", &lex(), 1).len(), 1);
    }

    #[test]
    fn lexicon_parsing() {
        let l: SentimentLexicon = SentimentLexicon::parse_tsv("# c\ngood\t0.5\nbad\t-1\n", HashSet::new()).unwrap();
        assert_eq!(l.score("good"), 0.5);
        assert!(SentimentLexicon::<f64>::parse_tsv("x\t1.5\n", HashSet::new()).is_err());
        assert!(SentimentLexicon::<f64>::parse_tsv("x 0.5\n", HashSet::new()).is_err());
        assert_eq!(lex().score("master"), 0.0);
    }

    fn sentence() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(prop::sample::select(vec!["good", "bad", "happy", "master", "the", "zero"]), 0..12)
            .prop_map(|v| v.into_iter().map(String::from).collect())
    }

    proptest! {
        #[test]
        fn additive_over_concatenation(a in sentence(), b in sentence()) {
            let joined: Vec<String> = a.iter().chain(&b).cloned().collect();
            let lhs = sentence_score(&joined, &lex());
            let rhs = sentence_score(&a, &lex()) + sentence_score(&b, &lex());
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn exclusion_only_removes_that_token(a in sentence()) {
            let base = sentence_score(&a, &lex());
            let excluded = sentence_score(&a, &lex().with_exclusion("good"));
            let n_good = a.iter().filter(|t| *t == "good").count() as f64;
            prop_assert!((base - n_good * 0.7 - excluded).abs() < 1e-12);
        }

        #[test]
        fn doubling_scores(a in sentence()) {
            let doubled = lex().scaled(2.0);
            prop_assert!((sentence_score(&a, &doubled) - 2.0 * sentence_score(&a, &lex())).abs() < 1e-12);
        }
    }

    #[test]
    fn doubling_leaves_t_unchanged() {
        let c = Corpus::new(vec![
            Document::new("a1", "master good bad.", Group::A, None),
            Document::new("a2", "master bad.", Group::A, None),
            Document::new("a3", "master happy good.", Group::A, None),
            Document::new("b1", "master good.", Group::B, None),
            Document::new("b2", "master good happy.", Group::B, None),
        ])
        .unwrap();
        let base = compare_target_sentiment(&c, "master", &lex()).unwrap();
        let dbl = compare_target_sentiment(&c, "master", &lex().scaled(2.0)).unwrap();
        assert!((base.test.t - dbl.test.t).abs() < 1e-12);
        assert!((2.0 * base.mean_a - dbl.mean_a).abs() < 1e-12);
        let ca = word_contributions(c.in_group(Group::A), "master", &lex(), 5);
        let cd = word_contributions(c.in_group(Group::A), "master", &lex().scaled(2.0), 5);
        for (x, y) in ca.iter().zip(&cd) {
            assert!((2.0 * x.contribution - y.contribution).abs() < 1e-12);
        }
    }
}
