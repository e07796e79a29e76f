use textcontrast::corpus::{build_dtm, PreprocessedDoc};
use textcontrast::synthetic::{recovery_corpus, RecoveryCorpus, RECOVERY_TOPICS};
use textcontrast::topics::{align_topics, fit_lda, infer_theta, relevance, topic_summary, LdaConfig};
use textcontrast::TopicModel64;

fn config(seed: u64) -> LdaConfig {
    LdaConfig {
        alpha: 0.1,
        iterations: 300,
        burn_in: 100,
        ..LdaConfig::new(2)
    }
    .with_seed(seed)
}

fn fit(docs: &[PreprocessedDoc], seed: u64) -> TopicModel64 {
    let (vocab, dtm) = build_dtm(docs, 1).unwrap();
    fit_lda(&vocab, &dtm, &config(seed)).unwrap()
}

/// Model topic carrying each generating vocabulary.
fn generating_alignment(model: &TopicModel64) -> Vec<usize> {
    let reference: Vec<Vec<f64>> = RECOVERY_TOPICS
        .iter()
        .map(|words| {
            model
                .vocab
                .terms()
                .iter()
                .map(|t| if words.contains(&t.as_str()) { 1.0 / 3.0 } else { 0.0 })
                .collect()
        })
        .collect();
    align_topics(&reference, &model.phi)
}

fn theta_mass_on_source(r: &RecoveryCorpus, model: &TopicModel64) -> f64 {
    let m = generating_alignment(model);
    r.source
        .iter()
        .enumerate()
        .map(|(d, &s)| model.theta[d][m[s]])
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn recovers_generating_topics() {
    for seed in 0..3 {
        let r = recovery_corpus(20, 200, 100 + seed);
        let model = fit(&r.docs, seed);
        assert!(theta_mass_on_source(&r, &model) >= 0.95, "seed {seed}");
        let m = generating_alignment(&model);
        for (s, words) in RECOVERY_TOPICS.iter().enumerate() {
            let leak: f64 = model
                .vocab
                .terms()
                .iter()
                .zip(&model.phi[m[s]])
                .filter(|(t, _)| !words.contains(&t.as_str()))
                .map(|(_, &p)| p)
                .sum();
            assert!(leak < 0.05, "seed {seed} topic {s}: {leak}");
        }
    }
}

#[test]
fn simplex_closure() {
    let r = recovery_corpus(20, 200, 5);
    let model = fit(&r.docs, 5);
    for row in model.phi.iter().chain(&model.theta) {
        assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        assert!(row.iter().all(|&p| p > 0.0 && p < 1.0));
    }
    assert!((model.marginals.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
}

#[test]
fn same_seed_same_model_bits() {
    let r = recovery_corpus(20, 200, 8);
    let a = fit(&r.docs, 42);
    let b = fit(&r.docs, 42);
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}

#[test]
fn permuting_documents_permutes_theta() {
    let r = recovery_corpus(20, 200, 13);
    let base = fit(&r.docs, 3);
    let mut shuffled = r.docs.clone();
    shuffled.reverse();
    shuffled.rotate_left(7);
    let other = fit(&shuffled, 3);

    let m = align_topics(&base.phi, &other.phi);
    for (t, &o) in m.iter().enumerate() {
        let l1: f64 = base.phi[t].iter().zip(&other.phi[o]).map(|(a, b)| (a - b).abs()).sum();
        assert!(l1 < 0.05, "topic {t}: {l1}");
    }
    let idx = other.doc_index();
    for (d, id) in base.doc_ids.iter().enumerate() {
        let row = &other.theta[idx[id.as_str()]];
        let tv: f64 = (0..2).map(|t| (base.theta[d][t] - row[m[t]]).abs()).sum::<f64>() / 2.0;
        assert!(tv < 0.05, "{id}: {tv}");
    }
}

#[test]
fn inference_agrees_with_training() {
    let r = recovery_corpus(20, 200, 21);
    let model = fit(&r.docs, 21);
    for (d, doc) in r.docs.iter().enumerate() {
        let inf = infer_theta(&model, &doc.tokens, 100, d as u64);
        assert!(!inf.fallback);
        let tv: f64 = inf.theta.iter().zip(&model.theta[d]).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
        assert!(tv <= 0.15, "{}: {tv}", doc.id);
    }

    let m = generating_alignment(&model);
    let fresh = recovery_corpus(1, 150, 999);
    let inf = infer_theta(&model, &fresh.docs[0].tokens, 100, 1);
    assert!(inf.theta[m[0]] >= 0.9, "{:?}", inf.theta);

    let oov = infer_theta(&model, &["q", "r"], 100, 1);
    assert!(oov.fallback);
    assert_eq!(oov.theta, vec![0.5, 0.5]);
}

#[test]
fn top_terms_come_from_generating_vocabulary() {
    let r = recovery_corpus(20, 200, 2);
    let model = fit(&r.docs, 2);
    let m = generating_alignment(&model);
    for (s, words) in RECOVERY_TOPICS.iter().enumerate() {
        let ranking = relevance(&model, m[s], 1.0).unwrap();
        for t in &ranking.terms[..3] {
            assert!(words.contains(&t.term.as_str()), "topic {s}: {}", t.term);
        }
    }
}

#[test]
fn unit_lambda_matches_phi_order() {
    let r = recovery_corpus(20, 200, 4);
    let model = fit(&r.docs, 4);
    for topic in 0..model.k() {
        let ranking = relevance(&model, topic, 1.0).unwrap();
        let phi = &model.phi[topic];
        let mut by_phi: Vec<usize> = (0..phi.len()).collect();
        by_phi.sort_by(|&a, &b| phi[b].total_cmp(&phi[a]).then(model.vocab.terms()[a].cmp(&model.vocab.terms()[b])));
        let expected: Vec<&str> = by_phi.iter().map(|&i| model.vocab.terms()[i].as_str()).collect();
        let got: Vec<&str> = ranking.terms.iter().map(|t| t.term.as_str()).collect();
        assert_eq!(got, expected);
    }
    let rows = topic_summary(&model, &[1.0, 0.4, 0.2], 100).unwrap();
    assert_eq!(rows.len(), 2 * 3 * 6);
}

#[test]
fn model_file_roundtrip() {
    let r = recovery_corpus(5, 50, 6);
    let model = fit(&r.docs, 6);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    model.save(&path).unwrap();
    assert_eq!(TopicModel64::load(&path).unwrap(), model);
}
