//! Per-document counts of configured word groups, compared between groups A
//! and B with Welch t-tests on raw counts and on per-1000-token rates.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Group, TokenizedDocument};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::{welch_t_test, TTestResult};

const DEFAULT_GROUPS: &str = include_str!("../data/wordgroups.json");

pub const CSV_HEADER: &str = "group,mean_A,mean_B,rate_A,rate_B,t,df,p,t_rate,df_rate,p_rate";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordGroup {
    pub name: String,
    pub members: BTreeSet<String>,
}

impl WordGroup {
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(name: impl Into<String>, members: I) -> Result<Self> {
        let name = name.into();
        let members: BTreeSet<String> = members
            .into_iter()
            .map(|m| m.as_ref().trim().to_lowercase())
            .filter(|m| !m.is_empty())
            .collect();
        if members.is_empty() {
            return Err(Error::WordGroups(format!("group {name:?} has no members")));
        }
        Ok(Self { name, members })
    }
}

/// Parses the JSON word-group config: `[{"name": .., "members": [..]}, ..]`.
pub fn parse_word_groups(json: &str) -> Result<Vec<WordGroup>> {
    let raw: Vec<WordGroup> = serde_json::from_str(json)?;
    if raw.is_empty() {
        return Err(Error::WordGroups("no word groups configured".into()));
    }
    raw.into_iter().map(|g| WordGroup::new(g.name, g.members)).collect()
}

pub fn load_word_groups(path: impl AsRef<Path>) -> Result<Vec<WordGroup>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_word_groups(&text)
}

/// The seven target groups bundled with the crate (whipping, beating,
/// patrollers, rape, breeding, happy, Klan).
pub fn default_word_groups() -> Vec<WordGroup> {
    parse_word_groups(DEFAULT_GROUPS).expect("bundled word groups are valid")
}

pub fn count_group(doc: &TokenizedDocument, group: &WordGroup) -> usize {
    doc.tokens_flat.iter().filter(|t| group.members.contains(t.as_str())).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct FrequencyComparison<F = f64> {
    pub group_name: String,
    pub mean_a: F,
    pub mean_b: F,
    /// Mean occurrences per 1000 tokens. Absent for the document-length
    /// comparison, where a rate is meaningless.
    pub rate_a: Option<F>,
    pub rate_b: Option<F>,
    pub test: TTestResult<F>,
    pub test_rate: Option<TTestResult<F>>,
}

fn split_by_group<F: Scalar>(corpus: &Corpus, value: impl Fn(&crate::corpus::Document) -> F) -> Result<(Vec<F>, Vec<F>)> {
    let a: Vec<F> = corpus.in_group(Group::A).map(&value).collect();
    let b: Vec<F> = corpus.in_group(Group::B).map(&value).collect();
    for (g, v) in [("A", &a), ("B", &b)] {
        if v.len() < 2 {
            return Err(Error::GroupTooSmall {
                group: g.into(),
                got: v.len(),
                needed: 2,
            });
        }
    }
    Ok((a, b))
}

fn per_thousand<F: Scalar>(count: usize, len: usize) -> F {
    if len == 0 {
        F::zero()
    } else {
        F::from_count(count) * F::lit(1000.0) / F::from_count(len)
    }
}

pub fn compare_word_group<F: Scalar>(corpus: &Corpus, group: &WordGroup) -> Result<FrequencyComparison<F>> {
    let (counts_a, counts_b) = split_by_group(corpus, |d| F::from_count(count_group(&d.tokens, group)))?;
    let (rates_a, rates_b) = split_by_group(corpus, |d| per_thousand(count_group(&d.tokens, group), d.length_words))?;
    let test = welch_t_test(&counts_a, &counts_b)?;
    let test_rate = welch_t_test(&rates_a, &rates_b)?;
    Ok(FrequencyComparison {
        group_name: group.name.clone(),
        mean_a: test.mean_a,
        mean_b: test.mean_b,
        rate_a: Some(test_rate.mean_a),
        rate_b: Some(test_rate.mean_b),
        test,
        test_rate: Some(test_rate),
    })
}

pub fn compare_doc_lengths<F: Scalar>(corpus: &Corpus) -> Result<FrequencyComparison<F>> {
    let (a, b) = split_by_group(corpus, |d| F::from_count(d.length_words))?;
    let test = welch_t_test(&a, &b)?;
    Ok(FrequencyComparison {
        group_name: "document length".into(),
        mean_a: test.mean_a,
        mean_b: test.mean_b,
        rate_a: None,
        rate_b: None,
        test,
        test_rate: None,
    })
}

fn opt<F: Scalar>(v: Option<F>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the comparison table in the report CSV layout.
pub fn write_csv<F: Scalar, W: Write>(out: W, rows: &[FrequencyComparison<F>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::csv("<wordfreq report>", e);
    w.write_record(CSV_HEADER.split(',')).map_err(io)?;
    for r in rows {
        let (t_rate, df_rate, p_rate) = match &r.test_rate {
            Some(t) => (Some(t.t), Some(t.df), Some(t.p_two_sided)),
            None => (None, None, None),
        };
        w.write_record([
            r.group_name.clone(),
            r.mean_a.to_string(),
            r.mean_b.to_string(),
            opt(r.rate_a),
            opt(r.rate_b),
            r.test.t.to_string(),
            r.test.df.to_string(),
            r.test.p_two_sided.to_string(),
            opt(t_rate),
            opt(df_rate),
            opt(p_rate),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<wordfreq report>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{tokenize, Document};
    use proptest::prelude::*;

    fn whip() -> WordGroup {
        WordGroup::new("whip", ["whips", "whipped", "whipping"]).unwrap()
    }

    fn corpus(a: &[&str], b: &[&str]) -> Corpus {
        let mut docs = Vec::new();
        for (i, t) in a.iter().enumerate() {
            docs.push(Document::new(format!("a{i}"), *t, Group::A, None));
        }
        for (i, t) in b.iter().enumerate() {
            docs.push(Document::new(format!("b{i}"), *t, Group::B, None));
        }
        Corpus::new(docs).unwrap()
    }

    #[test]
    fn counting() {
        assert_eq!(count_group(&tokenize(""), &whip()), 0);
        let d = tokenize("he whipped us and whipping went on");
        assert_eq!(count_group(&d, &whip()), 2);
    }

    #[test]
    fn constructed_group_means() {
        let c = corpus(
            &["they whipped and whipped", "whips whipping now", "whipped whipped"],
            &["quiet days", "no trouble here", "nothing"],
        );
        let r: FrequencyComparison = compare_word_group(&c, &whip()).unwrap();
        assert_eq!((r.mean_a, r.mean_b), (2.0, 0.0));
        assert_eq!(r.test.p_two_sided, 0.0);
        let rate = r.test_rate.unwrap();
        assert!(rate.mean_a > 0.0 && rate.mean_b == 0.0);
    }

    #[test]
    fn identical_lengths_give_unit_p() {
        let c = corpus(&["one two three", "four five six"], &["a b c", "d e f"]);
        let r: FrequencyComparison = compare_doc_lengths(&c).unwrap();
        assert_eq!(r.test.p_two_sided, 1.0);
        assert!(r.rate_a.is_none());
    }

    #[test]
    fn undersized_group_named_in_error() {
        let c = corpus(&["whipped"], &["x", "y"]);
        match compare_word_group::<f64>(&c, &whip()) {
            Err(Error::GroupTooSmall { group, got: 1, .. }) => assert_eq!(group, "A"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bundled_groups() {
        let g = default_word_groups();
        assert_eq!(g.len(), 7);
        assert!(g[2].members.contains("paddyrollers"));
        assert!(parse_word_groups("[]").is_err());
        assert!(parse_word_groups(r#"[{"name":"x","members":[]}]"#).is_err());
    }

    #[test]
    fn csv_layout() {
        let c = corpus(&["whipped x", "whipped y z"], &["x", "whipped y"]);
        let rows = vec![compare_word_group::<f64>(&c, &whip()).unwrap(), compare_doc_lengths(&c).unwrap()];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("whip,1,0.5,"));
        assert!(lines[2].starts_with("document length,2.5,1.5,,,"));
        assert!(lines[2].ends_with(",,,"));
    }

    proptest! {
        #[test]
        fn count_is_additive(a in "(whipped|whips|the|boy| |\\.){0,30}", b in "(whipped|whipping|girl| |\\.){0,30}") {
            let joined = format!("{a} {b}");
            prop_assert_eq!(
                count_group(&tokenize(&joined), &whip()),
                count_group(&tokenize(&a), &whip()) + count_group(&tokenize(&b), &whip())
            );
        }

        #[test]
        fn renaming_group_changes_nothing_numeric(name in "[a-z ]{1,12}") {
            let c = corpus(&["whipped x", "whipped y whips"], &["x", "whipped y", "z"]);
            let base: FrequencyComparison = compare_word_group(&c, &whip()).unwrap();
            let renamed = WordGroup { name: name.clone(), ..whip() };
            let other: FrequencyComparison = compare_word_group(&c, &renamed).unwrap();
            prop_assert_eq!(base.test, other.test);
            prop_assert_eq!(base.test_rate, other.test_rate);
        }
    }
}
