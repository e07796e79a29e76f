use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use textcontrast::corpus::{load_corpus, Corpus, Document, Group, GroupLabels};
use textcontrast::sentiment::{compare_target_sentiment, SentimentLexicon};
use textcontrast::synthetic::{contrast_corpus, contrast_lexicon, write_corpus, ContrastSpec};
use textcontrast::wordfreq::{compare_doc_lengths, compare_word_group, count_group, default_word_groups, WordGroup};
use textcontrast::{Error, FrequencyComparison64, SentimentComparison64};

#[test]
fn length_contrast_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut docs = Vec::new();
    for (g, n) in [(Group::A, 100), (Group::B, 50)] {
        for i in 0..15 {
            let len = rng.random_range(n - 1..=n + 1);
            let text = vec!["word"; len].join(" ");
            docs.push(Document::new(format!("{g}{i}"), text, g, None));
        }
    }
    let corpus = Corpus::new(docs).unwrap();
    let cmp: FrequencyComparison64 = compare_doc_lengths(&corpus).unwrap();
    assert!((cmp.mean_a / cmp.mean_b - 2.0).abs() < 0.05);
    assert!(cmp.test.p_two_sided < 1e-6);
}

/// Counts by splitting on anything that is not a letter, digit or apostrophe,
/// independently of the library tokenizer.
fn grep_count(text: &str, members: &[&str]) -> usize {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .filter(|w| members.contains(&w.to_lowercase().as_str()))
        .count()
}

#[test]
fn counts_match_independent_scan() {
    let corpus = contrast_corpus(&ContrastSpec::default(), 2).unwrap();
    let groups = default_word_groups();
    for doc in corpus.documents() {
        for g in &groups {
            let members: Vec<&str> = g.members.iter().map(String::as_str).collect();
            assert_eq!(count_group(&doc.tokens, g), grep_count(&doc.text, &members), "{} {}", doc.id, g.name);
        }
    }
}

#[test]
fn themed_word_groups_lean_the_right_way() {
    let corpus = contrast_corpus(&ContrastSpec::default(), 2).unwrap();
    let groups = default_word_groups();
    let whip = groups.iter().find(|g| g.members.contains("whipped")).unwrap();
    let happy = groups.iter().find(|g| g.members.contains("happy")).unwrap();
    let w: FrequencyComparison64 = compare_word_group(&corpus, whip).unwrap();
    let h: FrequencyComparison64 = compare_word_group(&corpus, happy).unwrap();
    assert!(w.mean_a > w.mean_b && w.test.p_two_sided < 0.01);
    assert!(h.mean_b > h.mean_a && h.test.p_two_sided < 0.01);

    let renamed = WordGroup::new("renamed", whip.members.iter().cloned()).unwrap();
    let r: FrequencyComparison64 = compare_word_group(&corpus, &renamed).unwrap();
    assert_eq!((r.test, r.test_rate), (w.test, w.test_rate));
}

#[test]
fn sentiment_on_contrast_corpus() {
    let corpus = contrast_corpus(&ContrastSpec::default(), 2).unwrap();
    let lexicon: SentimentLexicon = SentimentLexicon::parse_tsv(contrast_lexicon(), Default::default()).unwrap();
    let cmp: SentimentComparison64 = compare_target_sentiment(&corpus, "family", &lexicon).unwrap();
    assert!(cmp.n_sentences_a >= 2 && cmp.n_sentences_b >= 2);
    assert!(cmp.mean_b > cmp.mean_a);
}

#[test]
fn disk_roundtrip_and_manifest_errors() {
    let corpus = contrast_corpus(&ContrastSpec { docs_per_group: 4, unknown_docs: 2, ..Default::default() }, 0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_corpus(&corpus, dir.path()).unwrap();
    let loaded = load_corpus(&manifest, &GroupLabels::default()).unwrap();
    assert_eq!(loaded.count(Group::A), 4);
    assert_eq!(loaded.unknown_ids().len(), 2);
    assert_eq!(loaded.filter_state("arkansas").count(Group::A), 2);

    fs::remove_file(dir.path().join("texts/A001.txt")).unwrap();
    fs::remove_file(dir.path().join("texts/B003.txt")).unwrap();
    match load_corpus(&manifest, &GroupLabels::default()) {
        Err(Error::MissingFiles(missing)) => {
            let ids: Vec<&str> = missing.iter().map(|m| m.id.as_str()).collect();
            assert_eq!(ids, ["A001", "B003"]);
        }
        other => panic!("expected missing files, got {other:?}"),
    }

    let dup = dir.path().join("dup.csv");
    fs::write(&dup, "id,path,group,state\nx,texts/A000.txt,A,\nx,texts/A002.txt,B,\n").unwrap();
    let err = load_corpus(&dup, &GroupLabels::default()).unwrap_err();
    assert!(matches!(err, Error::Manifest { .. }), "{err}");
    assert!(err.to_string().contains('3'), "{err}");

    let custom = dir.path().join("custom.csv");
    fs::write(&custom, "id,path,group,state\np,texts/A000.txt,black,\nq,texts/A002.txt,White,\n").unwrap();
    let labels = GroupLabels {
        a: "black".into(),
        b: "white".into(),
    };
    let c = load_corpus(&custom, &labels).unwrap();
    assert_eq!((c.get("p").unwrap().group, c.get("q").unwrap().group), (Group::A, Group::B));
    assert!(load_corpus(&custom, &GroupLabels::default()).is_err());
}
