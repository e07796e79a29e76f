//! Pipeline stages. Each stage writes its artifacts and returns a JSON value
//! for the bundled report. Shared inputs (corpus, document-term matrix,
//! topic model, cross-validation) are built once per run.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{bail, Context as _, Result};
use serde::Serialize;
use serde_json::{json, Value};
use textcontrast::compare::{
    fit_sweep_models, sweep_rows, topic_score_table, write_score_csv, write_sweep_csv, SplitDirection,
};
use textcontrast::corpus::{
    build_dtm, dtm_to_json, load_corpus, preprocess_for_topics, Corpus, DocTermMatrix, Group, GroupLabels,
    ReplacementTable, Stopwords, Vocabulary,
};
use textcontrast::predict::{
    knn_cross_validate, knn_predict, tsne_embed, write_cv_csv, write_embedding_csv, write_prediction_csv,
    CrossValidation, LabeledPoint, TsneConfig,
};
use textcontrast::sentiment::{default_exclusions, parse_exclusions, sentiment_report, SentimentLexicon};
use textcontrast::topics::{fit_lda, infer_theta, relevance, topic_summary, write_summary_csv, TopicModel};
use textcontrast::wordfreq::{
    compare_doc_lengths, compare_word_group, count_group, default_word_groups, load_word_groups, write_csv,
    FrequencyComparison, WordGroup, CSV_HEADER,
};
use textcontrast::Error as CoreError;

use crate::config::RunConfig;
use crate::output::Outputs;
use crate::svg::{self, Series};

type Model = TopicModel<f64>;

pub struct Context {
    pub config: RunConfig,
    pub out: Outputs,
    /// Explicit model file to use instead of fitting.
    pub model_path: Option<std::path::PathBuf>,
    corpus: Option<Corpus>,
    stopwords: Option<Stopwords>,
    dtm: Option<(Vocabulary, DocTermMatrix)>,
    model: Option<Model>,
    cv: Option<CrossValidation>,
    pub timing: BTreeMap<String, f64>,
}

impl Context {
    pub fn new(config: RunConfig, out: Outputs) -> Self {
        Self {
            config,
            out,
            model_path: None,
            corpus: None,
            stopwords: None,
            dtm: None,
            model: None,
            cv: None,
            timing: BTreeMap::new(),
        }
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let r = f(self);
        *self.timing.entry(stage.to_string()).or_default() += start.elapsed().as_secs_f64();
        r
    }

    fn label(&self, g: Group) -> String {
        match g {
            Group::A => self.config.group_a_label.clone(),
            Group::B => self.config.group_b_label.clone(),
            Group::Unknown => "unknown".into(),
        }
    }

    pub fn corpus(&mut self) -> Result<&Corpus> {
        if self.corpus.is_none() {
            let labels = GroupLabels {
                a: self.config.group_a_label.clone(),
                b: self.config.group_b_label.clone(),
            };
            let mut corpus = load_corpus(self.config.manifest()?, &labels)?;
            if let Some(state) = &self.config.state {
                corpus = corpus.filter_state(state);
                if corpus.is_empty() {
                    bail!(CoreError::EmptyCorpus);
                }
            }
            if let Some(path) = &self.config.replacements_path {
                corpus = corpus.with_replacements(&ReplacementTable::from_csv(path)?);
            }
            self.corpus = Some(corpus);
        }
        Ok(self.corpus.as_ref().unwrap())
    }

    fn stopwords(&mut self) -> Result<&Stopwords> {
        if self.stopwords.is_none() {
            self.stopwords = Some(match &self.config.stopwords_path {
                Some(p) => Stopwords::from_file(p)?,
                None => Stopwords::english(),
            });
        }
        Ok(self.stopwords.as_ref().unwrap())
    }

    pub fn dtm(&mut self) -> Result<&(Vocabulary, DocTermMatrix)> {
        if self.dtm.is_none() {
            let stopwords = self.stopwords()?.clone();
            let docs = self.corpus()?.preprocess(&stopwords);
            self.dtm = Some(build_dtm(&docs, self.config.min_count)?);
        }
        Ok(self.dtm.as_ref().unwrap())
    }

    fn fit_model(&mut self) -> Result<Model> {
        let config = self.config.lda_config();
        let (vocab, dtm) = self.dtm()?;
        Ok(fit_lda(vocab, dtm, &config)?)
    }

    /// `model.json` left in the output directory by an earlier run with the
    /// same LDA settings and the same documents and vocabulary.
    fn previous_model(&mut self) -> Result<Option<Model>> {
        let path = self.out.path("model.json");
        if !path.exists() {
            return Ok(None);
        }
        let Ok(model) = Model::load(&path) else {
            return Ok(None);
        };
        let config = self.config.lda_config();
        let (vocab, dtm) = self.dtm()?;
        let same = model.config == config && model.vocab == *vocab && model.doc_ids == dtm.doc_ids();
        if same {
            log::info!("reusing {}", path.display());
        }
        Ok(same.then_some(model))
    }

    /// The model given by `--model`, or a fresh fit with the configured K.
    pub fn model(&mut self) -> Result<&Model> {
        if self.model.is_none() {
            let model = match self.model_path.clone() {
                Some(p) => Model::load(&p).with_context(|| format!("loading model {}", p.display()))?,
                None => match self.previous_model()? {
                    Some(m) => m,
                    None => self.timed("lda_fit", |c| c.fit_model())?,
                },
            };
            self.model = Some(model);
        }
        Ok(self.model.as_ref().unwrap())
    }

    /// θ for every document of the corpus, in corpus order. Documents absent
    /// from the model are folded in.
    fn thetas(&mut self) -> Result<Vec<LabeledPoint<f64>>> {
        self.model()?;
        self.corpus()?;
        self.stopwords()?;
        let (model, corpus, stopwords) = (
            self.model.as_ref().unwrap(),
            self.corpus.as_ref().unwrap(),
            self.stopwords.as_ref().unwrap(),
        );
        let index = model.doc_index();
        let mut folded = 0;
        let points = corpus
            .documents()
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let theta = match index.get(d.id.as_str()) {
                    Some(&row) => model.theta[row].clone(),
                    None => {
                        folded += 1;
                        let tokens = preprocess_for_topics(&d.tokens, stopwords);
                        infer_theta(model, &tokens, self.config.lda.infer_iterations, self.config.infer_seed(i)).theta
                    }
                };
                LabeledPoint::new(d.id.clone(), theta, d.group)
            })
            .collect();
        if folded > 0 {
            log::warn!("{folded} documents were not in the model; their topic distributions were inferred");
        }
        Ok(points)
    }

    fn cross_validation(&mut self) -> Result<&CrossValidation> {
        if self.cv.is_none() {
            let labeled: Vec<LabeledPoint<f64>> = self.thetas()?.into_iter().filter(|p| p.group.is_labeled()).collect();
            let folds = self.config.knn.folds.min(labeled.len());
            if folds < self.config.knn.folds {
                log::warn!("only {} labeled documents; using {folds} folds", labeled.len());
            }
            let cv = knn_cross_validate(&labeled, &self.config.knn.k_values, folds, self.config.knn_seed())?;
            self.cv = Some(cv);
        }
        Ok(self.cv.as_ref().unwrap())
    }
}

fn corpus_summary(ctx: &mut Context) -> Result<Value> {
    let c = ctx.corpus()?;
    let (a, b, u) = (c.count(Group::A), c.count(Group::B), c.count(Group::Unknown));
    let words: usize = c.documents().iter().map(|d| d.length_words).sum();
    Ok(json!({ "documents": c.len(), "group_a": a, "group_b": b, "unknown": u, "words": words }))
}

pub fn preprocess(ctx: &mut Context) -> Result<Value> {
    ctx.timed("preprocess", |ctx| {
        let corpus = corpus_summary(ctx)?;
        let min_count = ctx.config.min_count;
        let (vocab, dtm) = ctx.dtm()?;
        let summary = json!({
            "corpus": corpus,
            "vocabulary_size": vocab.len(),
            "total_tokens": dtm.total_tokens(),
            "min_count": min_count,
            "row_totals": dtm.doc_ids().iter().enumerate()
                .map(|(d, id)| (id.clone(), dtm.row_total(d)))
                .collect::<BTreeMap<_, _>>(),
            "empty_documents": dtm.empty_docs(),
        });
        let (vocab, dtm) = ctx.dtm.as_ref().unwrap();
        let text = dtm_to_json(vocab, dtm)?;
        ctx.out.write_bytes("dtm.json", text.as_bytes())?;
        ctx.out.json("preprocess.json", &summary)?;
        Ok(summary)
    })
}

fn word_groups(config: &RunConfig) -> Result<Vec<WordGroup>> {
    Ok(match &config.wordgroups_path {
        Some(p) => load_word_groups(p)?,
        None => default_word_groups(),
    })
}

/// Means without a test, for groups too small to test.
fn describe_only(corpus: &Corpus, group: &WordGroup) -> Vec<String> {
    let mean = |g: Group, f: &dyn Fn(usize, usize) -> f64| {
        let v: Vec<f64> = corpus
            .in_group(g)
            .map(|d| f(count_group(&d.tokens, group), d.length_words))
            .collect();
        if v.is_empty() {
            String::new()
        } else {
            (v.iter().sum::<f64>() / v.len() as f64).to_string()
        }
    };
    let count = |c: usize, _: usize| c as f64;
    let rate = |c: usize, n: usize| if n == 0 { 0.0 } else { c as f64 * 1000.0 / n as f64 };
    let mut row = vec![
        group.name.clone(),
        mean(Group::A, &count),
        mean(Group::B, &count),
        mean(Group::A, &rate),
        mean(Group::B, &rate),
    ];
    row.resize(11, String::new());
    row
}

pub fn wordfreq(ctx: &mut Context) -> Result<Value> {
    ctx.timed("wordfreq", |ctx| {
        let groups = word_groups(&ctx.config)?;
        let corpus = ctx.corpus()?;
        let mut tested: Vec<FrequencyComparison<f64>> = Vec::new();
        let mut body = format!("{CSV_HEADER}\n").into_bytes();
        for g in &groups {
            match compare_word_group(corpus, g) {
                Ok(c) => {
                    let mut row = Vec::new();
                    write_csv(&mut row, std::slice::from_ref(&c))?;
                    let header_end = row.iter().position(|&b| b == b'\n').map_or(0, |i| i + 1);
                    body.extend_from_slice(&row[header_end..]);
                    tested.push(c);
                }
                Err(CoreError::GroupTooSmall { group, got, .. }) => {
                    log::warn!("group {group} has {got} documents; {:?} reported without a t-test", g.name);
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(describe_only(corpus, g))?;
                    body.extend_from_slice(&w.into_inner()?);
                }
                Err(e) => return Err(e.into()),
            }
        }
        ctx.out.csv("wordfreq.csv", |w| {
            w.extend_from_slice(&body);
            Ok(())
        })?;

        let lengths = match compare_doc_lengths::<f64>(ctx.corpus()?) {
            Ok(l) => {
                ctx.out.csv("doc_lengths.csv", |w| write_csv(w, std::slice::from_ref(&l)))?;
                Some(l)
            }
            Err(CoreError::GroupTooSmall { .. }) => {
                log::warn!("document-length comparison needs two documents per group; skipped");
                None
            }
            Err(e) => return Err(e.into()),
        };
        Ok(json!({ "word_groups": tested, "document_length": lengths }))
    })
}

#[derive(Serialize)]
struct ContributionRow<'a> {
    group: String,
    rank: usize,
    token: &'a str,
    frequency: usize,
    score: f64,
    contribution: f64,
}

pub fn sentiment(ctx: &mut Context) -> Result<Value> {
    ctx.timed("sentiment", |ctx| {
        let Some(lexicon_path) = ctx.config.lexicon_path.clone() else {
            bail!(CoreError::Config("no sentiment lexicon configured (set lexicon_path)".into()));
        };
        let exclusions = match &ctx.config.exclusions_path {
            Some(p) => parse_exclusions(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
            None => default_exclusions(),
        };
        let text = std::fs::read_to_string(&lexicon_path).with_context(|| format!("reading {}", lexicon_path.display()))?;
        let lexicon: SentimentLexicon<f64> = SentimentLexicon::parse_tsv(&text, exclusions)?;
        let target = ctx.config.sentiment.target.clone();
        let top_n = ctx.config.sentiment.top_n;
        let report = sentiment_report(ctx.corpus()?, &target, &lexicon, top_n)?;

        let mut w = csv::Writer::from_writer(Vec::new());
        for (g, list) in [(Group::A, &report.contributions_a), (Group::B, &report.contributions_b)] {
            for (i, c) in list.iter().enumerate() {
                w.serialize(ContributionRow {
                    group: ctx.label(g),
                    rank: i + 1,
                    token: &c.token,
                    frequency: c.frequency,
                    score: c.score,
                    contribution: c.contribution,
                })?;
            }
        }
        let mut bytes = w.into_inner()?;
        if bytes.is_empty() {
            bytes = b"group,rank,token,frequency,score,contribution\n".to_vec();
        }
        ctx.out.csv("sentiment_contributions.csv", |out| {
            out.extend_from_slice(&bytes);
            Ok(())
        })?;
        for (g, list) in [(Group::A, &report.contributions_a), (Group::B, &report.contributions_b)] {
            let bars: Vec<(String, f64)> = list.iter().map(|c| (c.token.clone(), c.contribution)).collect();
            let title = format!("Sentiment contributions around \"{target}\": {}", ctx.label(g));
            let chart = svg::bar_chart(&title, "frequency x score", &bars, svg::BLUE, svg::RED);
            ctx.out.svg(&format!("sentiment_contributions_{g}.svg"), &chart)?;
        }
        ctx.out.json("sentiment.json", &report)?;
        Ok(serde_json::to_value(&report)?)
    })
}

fn write_theta_csv(ctx: &mut Context, points: &[LabeledPoint<f64>], k: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["doc_id".to_string(), "group".to_string()];
    header.extend((0..k).map(|t| format!("topic_{t}")));
    w.write_record(&header)?;
    for p in points {
        let mut rec = vec![p.id.clone(), ctx.label(p.group)];
        rec.extend(p.features.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner()?;
    ctx.out.csv("theta.csv", |out| {
        out.extend_from_slice(&bytes);
        Ok(())
    })
}

pub fn topics_fit(ctx: &mut Context) -> Result<Value> {
    ctx.model_path = None;
    ctx.model()?;
    ctx.timed("topics_fit", |ctx| {
        let model = ctx.model.as_ref().unwrap();
        let json = model.to_json()?;
        let info = json!({
            "k": model.k(),
            "vocabulary_size": model.vocab.len(),
            "documents": model.doc_ids.len(),
            "config": model.config,
            "empty_documents": model.empty_docs,
        });
        let k = model.k();
        ctx.out.write_bytes("model.json", json.as_bytes())?;
        let points = ctx.thetas()?;
        write_theta_csv(ctx, &points, k)?;
        ctx.out.json("topics_fit.json", &info)?;
        Ok(info)
    })
}

pub fn topics_summary(ctx: &mut Context) -> Result<Value> {
    ctx.model()?;
    ctx.timed("topics_summary", |ctx| {
        let model = ctx.model.as_ref().unwrap();
        let rows = topic_summary(model, &ctx.config.summary.lambdas, ctx.config.summary.top_n)?;
        ctx.out.csv("topic_summary.csv", |w| write_summary_csv(w, &rows))?;
        Ok(serde_json::to_value(&rows)?)
    })
}

pub fn compare_sweep(ctx: &mut Context) -> Result<Value> {
    ctx.timed("compare_sweep", |ctx| {
        let (k_min, k_max) = (ctx.config.sweep.k_min, ctx.config.sweep.k_max);
        let defaults = ctx.config.lda_defaults();
        let seed = ctx.config.seed;
        let (vocab, dtm) = ctx.dtm()?;
        let models: Vec<Model> = fit_sweep_models(vocab, dtm, k_min, k_max, &defaults, seed)?;
        let mut result = serde_json::Map::new();
        for direction in SplitDirection::BOTH {
            let rows = sweep_rows(ctx.corpus()?, &models, direction, seed)?;
            let name = direction.name();
            ctx.out.csv(&format!("sweep_{name}.csv"), |w| write_sweep_csv(w, &rows))?;
            let (split, test) = (ctx.label(direction.split_group()), ctx.label(direction.split_group().other()));
            let chart = svg::line_chart(
                &format!("Average topic distance: split {split}, test {test}"),
                "number of topics K",
                "Euclidean distance",
                &[
                    Series {
                        name: "baseline (train vs valid)",
                        colour: svg::GREY,
                        points: rows.iter().map(|r| (r.k as f64, r.baseline)).collect(),
                    },
                    Series {
                        name: "dist (train vs test)",
                        colour: svg::RED,
                        points: rows.iter().map(|r| (r.k as f64, r.dist)).collect(),
                    },
                ],
            );
            ctx.out.svg(&format!("sweep_{name}.svg"), &chart)?;
            result.insert(name.to_string(), serde_json::to_value(&rows)?);
        }
        Ok(Value::Object(result))
    })
}

pub fn compare_scores(ctx: &mut Context) -> Result<Value> {
    ctx.model()?;
    ctx.corpus()?;
    ctx.timed("compare_scores", |ctx| {
        let model = ctx.model.as_ref().unwrap();
        let rows = topic_score_table(model, ctx.corpus.as_ref().unwrap())?;
        let top_n = ctx.config.summary.top_n;
        let mut top_words = Vec::new();
        for t in 0..model.k() {
            let ranking = relevance(model, t, 1.0)?;
            let words: Vec<String> = ranking.terms.into_iter().take(top_n).map(|r| r.term).collect();
            top_words.push((t, words.join(" ")));
        }
        ctx.out.csv("topic_scores.csv", |w| write_score_csv(w, &rows))?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["topic", "top_words"])?;
        for (t, words) in &top_words {
            w.write_record([t.to_string(), words.clone()])?;
        }
        let bytes = w.into_inner()?;
        ctx.out.csv("topic_top_words.csv", |out| {
            out.extend_from_slice(&bytes);
            Ok(())
        })?;
        Ok(json!({ "scores": rows, "top_words": top_words.into_iter().map(|(_, w)| w).collect::<Vec<_>>() }))
    })
}

pub fn embed(ctx: &mut Context) -> Result<Value> {
    let points = ctx.thetas()?;
    ctx.timed("embed", |ctx| {
        let mut config: TsneConfig = ctx.config.tsne_config();
        if config.perplexity >= TsneConfig::max_perplexity(points.len()) {
            let clamped = config.clamped_for(points.len());
            log::warn!("perplexity {} infeasible for {} points; using {}", config.perplexity, points.len(), clamped.perplexity);
            config = clamped;
        }
        let e = tsne_embed(&points, &config)?;
        ctx.out.csv("embedding.csv", |w| write_embedding_csv(w, &e.points))?;
        let series: Vec<(Group, &str)> = vec![(Group::A, svg::BLUE), (Group::B, svg::RED), (Group::Unknown, svg::GREY)];
        let labels: Vec<String> = series.iter().map(|(g, _)| ctx.label(*g)).collect();
        let chart = svg::scatter_chart(
            "t-SNE of document topic distributions",
            &series
                .iter()
                .zip(&labels)
                .map(|((g, colour), name)| Series {
                    name,
                    colour,
                    points: e.points.iter().filter(|p| p.group == *g).map(|p| (p.x, p.y)).collect(),
                })
                .filter(|s| !s.points.is_empty())
                .collect::<Vec<_>>(),
        );
        ctx.out.svg("embedding.svg", &chart)?;
        let max_entropy_error = e.calibration.iter().map(|c| c.entropy_error).fold(0.0, f64::max);
        let info = json!({
            "perplexity": config.perplexity,
            "max_entropy_error": max_entropy_error,
            "kl_trace": e.kl_trace,
            "points": e.points,
        });
        ctx.out.json("embedding.json", &info)?;
        Ok(info)
    })
}

pub fn predict_cv(ctx: &mut Context) -> Result<Value> {
    ctx.cross_validation()?;
    ctx.timed("predict_cv", |ctx| {
        let cv = ctx.cv.clone().unwrap();
        ctx.out.csv("knn_cv.csv", |w| write_cv_csv(w, &cv.results))?;
        let chart = svg::line_chart(
            &format!("kNN cross-validated accuracy ({} folds)", cv.folds),
            "neighbours k",
            "accuracy",
            &[Series {
                name: "accuracy",
                colour: svg::BLUE,
                points: cv.results.iter().map(|r| (r.k as f64, r.accuracy)).collect(),
            }],
        );
        ctx.out.svg("knn_cv.svg", &chart)?;
        ctx.out.json("knn_cv.json", &cv)?;
        Ok(serde_json::to_value(&cv)?)
    })
}

pub fn predict_label(ctx: &mut Context) -> Result<Value> {
    let k = match ctx.config.knn.k {
        Some(k) => k,
        None => ctx
            .cross_validation()?
            .best_k
            .context("cross-validation produced no usable k; set knn.k")?,
    };
    let points = ctx.thetas()?;
    ctx.timed("predict_label", |ctx| {
        let (train, queries): (Vec<_>, Vec<_>) = points.into_iter().partition(|p| p.group.is_labeled());
        let preds = knn_predict(&train, &queries, k)?;
        let mut w = Vec::new();
        write_prediction_csv(&mut w, &preds)?;
        // group column carries the configured labels
        let mut r = csv::Reader::from_reader(w.as_slice());
        let mut out = csv::Writer::from_writer(Vec::new());
        out.write_record(r.headers()?)?;
        for rec in r.records() {
            let rec = rec?;
            let g = if &rec[1] == "A" { Group::A } else { Group::B };
            out.write_record([&rec[0], &ctx.label(g), &rec[2]])?;
        }
        let bytes = out.into_inner()?;
        ctx.out.csv("predictions.csv", |o| {
            o.extend_from_slice(&bytes);
            Ok(())
        })?;
        Ok(json!({ "k": k, "predictions": preds }))
    })
}

/// Every stage, plus `report.json` and `run.json`.
pub fn report(ctx: &mut Context, command: &str) -> Result<()> {
    let start = Instant::now();
    let mut bundle = serde_json::Map::new();
    bundle.insert("config_hash".into(), json!(ctx.config.hash()));
    bundle.insert("seed".into(), json!(ctx.config.seed));
    bundle.insert("preprocess".into(), preprocess(ctx)?);
    bundle.insert("wordfreq".into(), wordfreq(ctx)?);
    let sentiment = if ctx.config.lexicon_path.is_some() {
        sentiment(ctx)?
    } else {
        log::warn!("no lexicon configured; sentiment skipped");
        Value::Null
    };
    bundle.insert("sentiment".into(), sentiment);
    bundle.insert("topics".into(), topics_fit(ctx)?);
    bundle.insert("topic_summary".into(), topics_summary(ctx)?);
    bundle.insert("sweep".into(), compare_sweep(ctx)?);
    bundle.insert("topic_scores".into(), compare_scores(ctx)?);
    bundle.insert("embedding".into(), embed(ctx)?);
    bundle.insert("knn_cv".into(), predict_cv(ctx)?);
    bundle.insert("predictions".into(), predict_label(ctx)?);
    ctx.out.raw_json("report.json", &Value::Object(bundle))?;
    ctx.timing.insert("total".into(), start.elapsed().as_secs_f64());
    write_run_manifest(ctx, command)
}

/// `run.json`: versions, configuration and its hash, input and artifact
/// digests, and wall-clock timings (the only field that varies between
/// identical runs).
pub fn write_run_manifest(ctx: &mut Context, command: &str) -> Result<()> {
    let config: Value = serde_json::from_str(&ctx.config.canonical_json())?;
    let mut inputs = Vec::new();
    let c = &ctx.config;
    for p in [&c.manifest_path, &c.replacements_path, &c.stopwords_path, &c.lexicon_path, &c.exclusions_path, &c.wordgroups_path]
        .into_iter()
        .flatten()
    {
        let bytes = std::fs::read(p).with_context(|| format!("reading {}", p.display()))?;
        inputs.push(json!({ "path": p.display().to_string(), "sha256": crate::output::sha256_hex(&bytes) }));
    }
    if let Some(corpus) = &ctx.corpus {
        let mut h = sha2::Sha256::default();
        for d in corpus.documents() {
            sha2::Digest::update(&mut h, d.id.as_bytes());
            sha2::Digest::update(&mut h, [0]);
            sha2::Digest::update(&mut h, d.text.as_bytes());
            sha2::Digest::update(&mut h, [0]);
        }
        inputs.push(json!({ "path": "<corpus texts>", "sha256": hex::encode(sha2::Digest::finalize(h)) }));
    }
    let run = json!({
        "tool": "textcontrast",
        "cli_version": env!("CARGO_PKG_VERSION"),
        "library_version": textcontrast::VERSION,
        "command": command,
        "config_hash": ctx.config.hash(),
        "seed": ctx.config.seed,
        "config": config,
        "inputs": inputs,
        "artifacts": ctx.out.records()?,
        "timing": ctx.timing,
    });
    ctx.out.raw_json("run.json", &run)
}
