mod config;
mod output;
mod pipeline;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use textcontrast::synthetic::{contrast_corpus, contrast_lexicon, write_corpus, ContrastSpec};

use crate::config::{raw_value, resolve};
use crate::output::Outputs;
use crate::pipeline::Context;

#[derive(Parser)]
#[command(name = "textcontrast", version, about = "Compare two groups of documents: word use, sentiment, topics and group prediction")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML or JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    group_a_label: Option<String>,
    #[arg(long, global = true)]
    group_b_label: Option<String>,
    /// Corpus manifest (CSV with id, path, group, state).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Restrict to documents from one state.
    #[arg(long, global = true)]
    state: Option<String>,
    /// Override any configuration key, e.g. `--set lda.k=12`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize, remove stopwords, stem and build the document-term matrix.
    Preprocess,
    /// Word-group frequency and document-length t-tests.
    Wordfreq,
    /// Sentiment of sentences around a target word.
    Sentiment {
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        top_n: Option<usize>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    #[command(subcommand)]
    Topics(TopicsCommand),
    #[command(subcommand)]
    Compare(CompareCommand),
    /// Two-dimensional t-SNE map of document topic distributions.
    Embed {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        perplexity: Option<f64>,
    },
    #[command(subcommand)]
    Predict(PredictCommand),
    /// Every analysis, plus report.json and run.json.
    Report,
    /// Write a synthetic two-group corpus with a lexicon and a ready config.
    Synth {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 30)]
        docs_per_group: usize,
        #[arg(long, default_value_t = 4)]
        unknown_docs: usize,
    },
}

#[derive(Subcommand)]
enum TopicsCommand {
    /// Fit LDA and write the model and document-topic table.
    Fit {
        #[arg(long)]
        k: Option<usize>,
    },
    /// Top terms per topic at each relevance weight.
    Summary {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        top_n: Option<usize>,
    },
}

#[derive(Subcommand)]
enum CompareCommand {
    /// Average topic distance against the number of topics, both directions.
    Sweep {
        #[arg(long)]
        k_min: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Per-topic group ratio with t-tests.
    Scores {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PredictCommand {
    /// Cross-validated kNN accuracy over a range of k.
    Cv {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        folds: Option<usize>,
    },
    /// Predict the group of unlabeled documents.
    Label {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        neighbours: Option<usize>,
    },
}

type Overrides = Vec<(String, Value)>;

fn push<T: Into<Value>>(o: &mut Overrides, key: &str, v: Option<T>) {
    if let Some(v) = v {
        o.push((key.to_string(), v.into()));
    }
}

fn path_value(p: Option<&PathBuf>) -> Option<String> {
    p.map(|p| p.to_string_lossy().into_owned())
}

fn global_overrides(g: &Global) -> Result<Overrides> {
    let mut o = Vec::new();
    push(&mut o, "seed", g.seed);
    push(&mut o, "output_dir", path_value(g.output_dir.as_ref()));
    push(&mut o, "group_a_label", g.group_a_label.clone());
    push(&mut o, "group_b_label", g.group_b_label.clone());
    push(&mut o, "manifest_path", path_value(g.manifest.as_ref()));
    push(&mut o, "state", g.state.clone());
    for s in &g.set {
        let (k, v) = s
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got {s:?}"))?;
        o.push((k.trim().to_string(), raw_value(v)));
    }
    Ok(o)
}

/// Typed overrides from subcommand flags, and an explicit model file if any.
fn command_overrides(cmd: &Command, o: &mut Overrides) -> Option<PathBuf> {
    match cmd {
        Command::Sentiment { target, top_n, lexicon } => {
            push(o, "sentiment.target", target.clone());
            push(o, "sentiment.top_n", *top_n);
            push(o, "lexicon_path", path_value(lexicon.as_ref()));
            None
        }
        Command::Topics(TopicsCommand::Fit { k }) => {
            push(o, "lda.k", *k);
            None
        }
        Command::Topics(TopicsCommand::Summary { k, model, top_n }) => {
            push(o, "lda.k", *k);
            push(o, "summary.top_n", *top_n);
            model.clone()
        }
        Command::Compare(CompareCommand::Sweep { k_min, k_max }) => {
            push(o, "sweep.k_min", *k_min);
            push(o, "sweep.k_max", *k_max);
            None
        }
        Command::Compare(CompareCommand::Scores { k, model }) => {
            push(o, "lda.k", *k);
            model.clone()
        }
        Command::Embed { k, model, perplexity } => {
            push(o, "lda.k", *k);
            push(o, "tsne.perplexity", *perplexity);
            model.clone()
        }
        Command::Predict(PredictCommand::Cv { k, model, folds }) => {
            push(o, "lda.k", *k);
            push(o, "knn.folds", *folds);
            model.clone()
        }
        Command::Predict(PredictCommand::Label { k, model, neighbours }) => {
            push(o, "lda.k", *k);
            push(o, "knn.k", *neighbours);
            model.clone()
        }
        Command::Preprocess | Command::Wordfreq | Command::Report | Command::Synth { .. } => None,
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Preprocess => "preprocess",
        Command::Wordfreq => "wordfreq",
        Command::Sentiment { .. } => "sentiment",
        Command::Topics(TopicsCommand::Fit { .. }) => "topics fit",
        Command::Topics(TopicsCommand::Summary { .. }) => "topics summary",
        Command::Compare(CompareCommand::Sweep { .. }) => "compare sweep",
        Command::Compare(CompareCommand::Scores { .. }) => "compare scores",
        Command::Embed { .. } => "embed",
        Command::Predict(PredictCommand::Cv { .. }) => "predict cv",
        Command::Predict(PredictCommand::Label { .. }) => "predict label",
        Command::Report => "report",
        Command::Synth { .. } => "synth",
    }
}

fn synth(dir: &Path, docs_per_group: usize, unknown_docs: usize, seed: u64) -> Result<()> {
    let spec = ContrastSpec {
        docs_per_group,
        unknown_docs,
        ..Default::default()
    };
    let corpus = contrast_corpus(&spec, seed)?;
    write_corpus(&corpus, dir)?;
    std::fs::write(dir.join("lexicon.tsv"), contrast_lexicon())?;
    let config = format!(
        r#"manifest_path = "manifest.csv"
lexicon_path = "lexicon.tsv"
output_dir = "out"
seed = {seed}

[lda]
k = 4
alpha = 0.1
iterations = 300
burn_in = 100

[sweep]
k_min = 2
k_max = 8

[sentiment]
target = "family"

[tsne]
perplexity = 10.0

[knn]
k_values = [1, 3, 5, 7, 9, 11, 13, 15]
folds = 5
"#
    );
    std::fs::write(dir.join("config.toml"), config)?;
    println!("{}", json!({ "corpus": dir.join("manifest.csv"), "config": dir.join("config.toml"), "documents": corpus.len() }));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let mut overrides = global_overrides(&cli.global)?;
    let model_path = command_overrides(&cli.command, &mut overrides);
    let config = resolve(cli.global.config.as_deref(), &overrides)?;
    if let Command::Synth { dir, docs_per_group, unknown_docs } = &cli.command {
        return synth(dir, *docs_per_group, *unknown_docs, config.seed);
    }

    let out = Outputs::new(&config.output_dir, config.hash(), config.seed)?;
    let mut ctx = Context::new(config, out);
    ctx.model_path = model_path;
    let name = command_name(&cli.command);
    let result = match &cli.command {
        Command::Report => pipeline::report(&mut ctx, name),
        cmd => stage(&mut ctx, cmd).and_then(|_| pipeline::write_run_manifest(&mut ctx, name)),
    };
    if let Err(e) = result {
        ctx.out.cleanup();
        return Err(e);
    }
    println!("{}", json!({ "command": name, "output_dir": ctx.out.dir(), "artifacts": ctx.out.records()?.len() }));
    Ok(())
}

fn stage(ctx: &mut Context, cmd: &Command) -> Result<Value> {
    match cmd {
        Command::Preprocess => pipeline::preprocess(ctx),
        Command::Wordfreq => pipeline::wordfreq(ctx),
        Command::Sentiment { .. } => pipeline::sentiment(ctx),
        Command::Topics(TopicsCommand::Fit { .. }) => pipeline::topics_fit(ctx),
        Command::Topics(TopicsCommand::Summary { .. }) => pipeline::topics_summary(ctx),
        Command::Compare(CompareCommand::Sweep { .. }) => pipeline::compare_sweep(ctx),
        Command::Compare(CompareCommand::Scores { .. }) => pipeline::compare_scores(ctx),
        Command::Embed { .. } => pipeline::embed(ctx),
        Command::Predict(PredictCommand::Cv { .. }) => pipeline::predict_cv(ctx),
        Command::Predict(PredictCommand::Label { .. }) => pipeline::predict_label(ctx),
        Command::Report | Command::Synth { .. } => unreachable!("handled by run"),
    }
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    for cause in e.chain() {
        if let Some(core) = cause.downcast_ref::<textcontrast::Error>() {
            return core.kind();
        }
        if cause.is::<std::io::Error>() {
            return "io";
        }
    }
    "config"
}

fn report_error(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::from(if kind == "usage" { 2 } else { 1 })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error("usage", e.render().to_string().trim()),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(error_kind(&e), &format!("{e:#}")),
    }
}
