//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 partial failure
//! (some episodes failed to generate, or some model calls failed).

mod config;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dynagrid::client::ModelClient;
use dynagrid::dataset::{manifest_hash, write_dataset, Dataset, ManifestHeader, EPISODES_DIR, MANIFEST_FILE};
use dynagrid::eval::{
    aggregate, curves_csv, read_records, reference_model, report_json, report_markdown, rescore, run_eval,
    sort_records, write_records, EvalOptions, EvalRecord, Model, Outcome,
};
use dynagrid::generate::generate_dataset;
use dynagrid::render::{render_episode, render_episode_generic, Layout, RenderError, RenderStyle};
use dynagrid::taxonomy::{catalog_json, BudgetConfig, Family};
use rayon::prelude::*;

pub use config::{FileConfig, GenerationConfig};

#[derive(Debug, Parser)]
#[command(name = "dynagrid", version, about = "Generate grid-reasoning datasets and evaluate models on them")]
pub struct Cli {
    /// TOML file with defaults for any flag, plus `[[models]]` endpoints.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dataset.
    Generate(GenerateArgs),
    /// Query a model on every episode of a dataset.
    Eval(EvalArgs),
    /// Re-parse and re-score stored records against the answers.
    Score(ScoreArgs),
    /// Aggregate records into report.md, report.json and curves.csv.
    Report(ReportArgs),
    /// Render episodes as PNG images.
    Render(RenderArgs),
    /// Print the task catalog as JSON.
    Catalog(CatalogArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Multiplier on every per-value instance count.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Train pairs per episode.
    #[arg(long)]
    pub n_train: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub concurrency: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// A reference model (oracle, random, constant, echo) or a configured model id.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub trials: Option<u32>,
    #[arg(long)]
    pub concurrency: Option<usize>,
    /// Records file, also used as the resume checkpoint.
    /// Defaults to `<dataset>/records/<model>.jsonl`.
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// TOML file overriding prompt template fields.
    #[arg(long)]
    pub template: Option<PathBuf>,
    /// Seed for the random reference model.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub records: PathBuf,
    /// Where to write the re-scored records; defaults to overwriting the input.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// One or more records files.
    #[arg(long, required = true, num_args = 1..)]
    pub records: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LayoutArg {
    Single,
    Multi,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "multi")]
    pub layout: LayoutArg,
    #[arg(long, default_value_t = 16)]
    pub cell_px: u32,
    #[arg(long, default_value_t = 1)]
    pub line_px: u32,
    /// Only these episodes.
    #[arg(long = "episode")]
    pub episodes: Vec<String>,
    /// At most this many episodes, in manifest order.
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long)]
    pub concurrency: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

/// How a command ended.
#[derive(Debug)]
pub enum Failure {
    /// Bad configuration or unreadable input.
    Config(anyhow::Error),
    /// The command ran but some of its work failed.
    Partial(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Partial(_) => 2,
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

pub fn run(cli: Cli, out: &mut dyn Write) -> CmdResult {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Generate(a) => generate(&file, a, out),
        Command::Eval(a) => eval(&file, a, out),
        Command::Score(a) => score(a, out).map_err(Failure::from),
        Command::Report(a) => report(a, out).map_err(Failure::from),
        Command::Render(a) => render(&file, a, out).map_err(Failure::from),
        Command::Catalog(a) => {
            let cfg = BudgetConfig::scaled(a.scale).map_err(|e| anyhow!(e))?;
            writeln!(out, "{}", catalog_json(&cfg)).map_err(|e| anyhow!(e))?;
            Ok(())
        }
    }
}

fn generate(file: &FileConfig, a: GenerateArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = GenerationConfig {
        master_seed: a.seed.or(file.seed).unwrap_or(config::DEFAULT_SEED),
        scale: a.scale.or(file.scale).unwrap_or(1.0),
        n_train: a.n_train.or(file.n_train).unwrap_or(dynagrid::generate::DEFAULT_TRAIN_PAIRS),
    };
    let root = a.out.or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from("data"));
    let workers = a.concurrency.or(file.concurrency).unwrap_or_else(config::default_concurrency);
    let budget = BudgetConfig::scaled(cfg.scale).map_err(|e| anyhow!(e))?;
    if cfg.n_train == 0 {
        return Err(anyhow!("--n-train must be at least 1").into());
    }
    let previous = manifest_hash(&root);
    if previous.is_some() {
        // Stale episodes from an earlier run would otherwise linger.
        let episodes = root.join(EPISODES_DIR);
        if episodes.exists() {
            fs::remove_dir_all(&episodes).with_context(|| format!("clearing {}", episodes.display()))?;
        }
    }
    let started = Instant::now();
    let outcome = generate_dataset(&budget, cfg.master_seed, cfg.n_train, workers).map_err(|e| anyhow!(e))?;
    let header = ManifestHeader::new(
        cfg.master_seed,
        cfg.n_train,
        cfg.scale,
        outcome.episodes.len(),
        serde_json::to_value(&cfg).map_err(|e| anyhow!(e))?,
    );
    let summary = write_dataset(&root, &outcome, &header).map_err(|e| anyhow!(e))?;
    let mut per_family: BTreeMap<usize, (Family, usize)> = BTreeMap::new();
    for (key, _) in &outcome.episodes {
        let pos = Family::ALL.iter().position(|&f| f == key.task.family).unwrap_or(usize::MAX);
        per_family.entry(pos).or_insert((key.task.family, 0)).1 += 1;
    }
    let io = |e: std::io::Error| Failure::Config(anyhow!(e));
    for (family, n) in per_family.values() {
        writeln!(out, "family={family} count={n}").map_err(io)?;
    }
    writeln!(out, "total={}", summary.episodes).map_err(io)?;
    writeln!(out, "failures={}", outcome.failures.len()).map_err(io)?;
    writeln!(out, "elapsed_s={:.2}", started.elapsed().as_secs_f64()).map_err(io)?;
    writeln!(out, "manifest_hash={}", summary.manifest_hash).map_err(io)?;
    match previous {
        Some(p) if p == summary.manifest_hash => writeln!(out, "note: identical manifest hash to the previous run").map_err(io)?,
        Some(_) => writeln!(out, "note: manifest hash differs from the previous run").map_err(io)?,
        None => {}
    }
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        let mut msg = format!("{} episode(s) could not be generated", outcome.failures.len());
        for f in outcome.failures.iter().take(10) {
            msg += &format!("\n  {}: {}", f.key.episode_id(), f.error);
        }
        Err(Failure::Partial(msg))
    }
}

fn pick_model(file: &FileConfig, id: &str, seed: u64) -> Result<Box<dyn Model>> {
    if let Some(handle) = file.model(id) {
        return Ok(Box::new(ModelClient::http(handle.clone())?));
    }
    reference_model(id, seed).ok_or_else(|| {
        anyhow!("unknown model {id}: expected oracle, random, constant, echo or a model_id from [[models]] in the config")
    })
}

fn eval(file: &FileConfig, a: EvalArgs, out: &mut dyn Write) -> CmdResult {
    let model_id = a.model.or_else(|| file.model.clone()).ok_or_else(|| anyhow!("no --model given"))?;
    let seed = a.seed.or(file.seed).unwrap_or(config::DEFAULT_SEED);
    let model = pick_model(file, &model_id, seed)?;
    let template = config::load_template(a.template.as_deref().or(file.template.as_deref()))?;
    let dataset = Dataset::open(&a.dataset).map_err(|e| anyhow!(e))?;
    let records_path = a
        .records
        .unwrap_or_else(|| a.dataset.join("records").join(format!("{}.jsonl", model.model_id())));
    let opts = EvalOptions {
        trials: a.trials.or(file.trials).unwrap_or(config::DEFAULT_TRIALS),
        concurrency: a.concurrency.or(file.concurrency).unwrap_or_else(config::default_concurrency),
        template,
        checkpoint: Some(records_path.clone()),
    };
    let records = run_eval(&dataset, model.as_ref(), &opts).map_err(|e| anyhow!(e))?;
    let mine: Vec<&EvalRecord> = records.iter().filter(|r| r.model_id == model.model_id()).collect();
    let correct = mine.iter().filter(|r| r.correct).count();
    let transport = mine
        .iter()
        .filter(|r| matches!(r.parsed, Outcome::TransportError { .. }))
        .count();
    let mean_latency = mine.iter().map(|r| r.latency_ms).sum::<f64>() / mine.len().max(1) as f64;
    let io = |e: std::io::Error| Failure::Config(anyhow!(e));
    writeln!(out, "model={}", model.model_id()).map_err(io)?;
    writeln!(out, "records={}", mine.len()).map_err(io)?;
    writeln!(out, "correct={correct}").map_err(io)?;
    writeln!(out, "accuracy={:.4}", correct as f64 / mine.len().max(1) as f64).map_err(io)?;
    writeln!(out, "transport_errors={transport}").map_err(io)?;
    writeln!(out, "mean_latency_ms={mean_latency:.2}").map_err(io)?;
    writeln!(out, "records_file={}", records_path.display()).map_err(io)?;
    if transport > 0 {
        return Err(Failure::Partial(format!("{transport} model call(s) failed")));
    }
    Ok(())
}

fn score(a: ScoreArgs, out: &mut dyn Write) -> Result<()> {
    let dataset = Dataset::open(&a.dataset)?;
    let answers = dataset.answers()?;
    let mut records = read_records(&a.records)?;
    rescore(&mut records, &answers)?;
    sort_records(&mut records, &dataset.rows);
    write_records(a.out.as_deref().unwrap_or(&a.records), &records)?;
    let mut by_model: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in &records {
        let e = by_model.entry(&r.model_id).or_default();
        e.0 += usize::from(r.correct);
        e.1 += 1;
    }
    for (model, (correct, n)) in by_model {
        writeln!(out, "model={model} records={n} correct={correct} accuracy={:.4}", correct as f64 / n as f64)?;
    }
    Ok(())
}

fn report(a: ReportArgs, out: &mut dyn Write) -> Result<()> {
    let dataset = Dataset::open(&a.dataset)?;
    let mut records = Vec::new();
    for p in &a.records {
        records.extend(read_records(p)?);
    }
    let metrics = aggregate(&records, &dataset.rows)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    for (name, body) in [
        ("report.md", report_markdown(&metrics)),
        ("report.json", report_json(&metrics)),
        ("curves.csv", curves_csv(&metrics)),
    ] {
        let path = a.out.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    for m in &metrics.models {
        writeln!(out, "model={} overall={:.2}", m.model_id, m.overall * 100.0)?;
    }
    writeln!(out, "wrote {}", a.out.display())?;
    Ok(())
}

fn render(file: &FileConfig, a: RenderArgs, out: &mut dyn Write) -> Result<()> {
    let dataset = Dataset::open(&a.dataset)?;
    let style = RenderStyle {
        cell_px: a.cell_px,
        line_px: a.line_px,
        layout: match a.layout {
            LayoutArg::Single => Layout::SingleImage,
            LayoutArg::Multi => Layout::MultiImage,
        },
        ..RenderStyle::default()
    };
    let rows: Vec<_> = dataset
        .rows
        .iter()
        .filter(|r| a.episodes.is_empty() || a.episodes.contains(&r.episode_id))
        .take(a.limit.unwrap_or(usize::MAX))
        .collect();
    if !a.episodes.is_empty() && rows.len() != a.episodes.len() {
        bail!("some requested episodes are not in {}", a.dataset.join(MANIFEST_FILE).display());
    }
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let workers = a.concurrency.or(file.concurrency).unwrap_or_else(config::default_concurrency);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let results: Vec<Result<(usize, bool)>> = pool.install(|| {
        rows.par_iter()
            .map(|row| {
                let puzzle = dataset.puzzle(row)?;
                let (images, fallback) = match render_episode(&puzzle, &style) {
                    Ok(images) => (images, false),
                    Err(RenderError::LayoutUnsupported(_)) => (render_episode_generic(&puzzle, &style)?, true),
                    Err(e) => return Err(e.into()),
                };
                for img in &images {
                    let path = a.out.join(img.file_name(&row.episode_id));
                    fs::write(&path, &img.png).with_context(|| format!("writing {}", path.display()))?;
                }
                Ok((images.len(), fallback))
            })
            .collect()
    });
    let mut files = 0;
    let mut fallbacks = 0;
    for r in results {
        let (n, fb) = r?;
        files += n;
        fallbacks += usize::from(fb);
    }
    writeln!(out, "episodes={} files={files}", rows.len())?;
    if fallbacks > 0 {
        writeln!(out, "note: {fallbacks} episode(s) without 3 train pairs used the generic layout")?;
    }
    Ok(())
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with(args: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 1;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Config(e) => {
                    let _ = writeln!(err, "error: {e:#}");
                }
                Failure::Partial(msg) => {
                    let _ = writeln!(err, "partial failure: {msg}");
                }
            }
            f.exit_code()
        }
    }
}
