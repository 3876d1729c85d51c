//! Prompting, response parsing, exact-match scoring and aggregation.

mod metrics;
mod parse;
mod prompt;
mod report;

use std::collections::{HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use metrics::{aggregate, variance, FamilyMetrics, LevelMetrics, MetricsReport, ModelMetrics, TaskMetrics, ValueMetrics};
pub use parse::{parse_grid, score, ParseFailure};
pub use prompt::{build_prompt, format_grid, PromptTemplate};
pub use report::{curves_csv, report_json, report_markdown};

use crate::client::{ClientError, ModelClient, TokenUsage, TransportErrorKind};
use crate::dataset::{canonical_json, Dataset, DatasetError, ManifestRow, Puzzle};
use crate::grid::Grid;
use crate::seed::{derive_seed, rng};
use crate::solve::{solve, SolverParams};
use crate::taxonomy::task;

/// What came back for one attempt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Parsed { grid: Grid },
    ParseFailure { reason: ParseFailure },
    TransportError { kind: TransportErrorKind, attempts: u32, message: String },
}

impl Outcome {
    pub fn from_response(text: &str) -> Self {
        match parse_grid(text) {
            Ok(grid) => Self::Parsed { grid },
            Err(reason) => Self::ParseFailure { reason },
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        match self {
            Self::Parsed { grid } => Some(grid),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub episode_id: String,
    pub model_id: String,
    pub trial_index: u32,
    pub raw_response: String,
    pub parsed: Outcome,
    pub correct: bool,
    pub latency_ms: f64,
    #[serde(default)]
    pub token_usage: Option<TokenUsage>,
}

impl EvalRecord {
    pub fn key(&self) -> (String, u32, String) {
        (self.episode_id.clone(), self.trial_index, self.model_id.clone())
    }
}

/// One request to a model.
pub struct Query<'a> {
    pub row: &'a ManifestRow,
    pub puzzle: &'a Puzzle,
    pub prompt: &'a str,
    pub trial: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub text: String,
    pub token_usage: Option<TokenUsage>,
}

impl Reply {
    fn text(text: String) -> Self {
        Self { text, token_usage: None }
    }
}

pub trait Model: Send + Sync {
    fn model_id(&self) -> &str;
    fn respond(&self, query: &Query<'_>) -> Result<Reply, ClientError>;
}

impl Model for ModelClient {
    fn model_id(&self) -> &str {
        &self.handle().model_id
    }

    fn respond(&self, query: &Query<'_>) -> Result<Reply, ClientError> {
        self.complete(query.prompt).map(|c| Reply {
            text: c.text,
            token_usage: c.token_usage,
        })
    }
}

/// Answers by running the task's solver on the test input.
pub struct Oracle;

impl Model for Oracle {
    fn model_id(&self) -> &str {
        "oracle"
    }

    fn respond(&self, q: &Query<'_>) -> Result<Reply, ClientError> {
        let text = task(&q.row.task_id)
            .ok()
            .and_then(|t| {
                let params = SolverParams::for_task(t, q.row.variable_value).ok()?;
                solve(t, &params, &q.puzzle.test_input).ok()
            })
            .map_or_else(|| "no solution".to_string(), |g| format_grid(&g));
        Ok(Reply::text(text))
    }
}

/// Uniform random cells in the test input's shape, seeded per (episode, trial).
pub struct RandomGrid {
    pub seed: u64,
}

impl Model for RandomGrid {
    fn model_id(&self) -> &str {
        "random_grid"
    }

    fn respond(&self, q: &Query<'_>) -> Result<Reply, ClientError> {
        let mut r = rng(derive_seed(self.seed, &q.row.episode_id, 0, u64::from(q.trial)));
        let (rows, cols) = (q.puzzle.test_input.rows(), q.puzzle.test_input.cols());
        let cells = (0..rows * cols).map(|_| r.random_range(0..=9u8)).collect();
        let g = Grid::new(rows, cols, cells).expect("test input dimensions are valid");
        Ok(Reply::text(format_grid(&g)))
    }
}

/// Always the same grid.
pub struct ConstantGrid {
    pub grid: Grid,
}

impl Default for ConstantGrid {
    fn default() -> Self {
        Self {
            grid: Grid::from_rows(&[[0u8]]).expect("1x1 grid"),
        }
    }
}

impl Model for ConstantGrid {
    fn model_id(&self) -> &str {
        "constant_grid"
    }

    fn respond(&self, _: &Query<'_>) -> Result<Reply, ClientError> {
        Ok(Reply::text(format_grid(&self.grid)))
    }
}

/// Returns the test input unchanged.
pub struct EchoInput;

impl Model for EchoInput {
    fn model_id(&self) -> &str {
        "echo_input"
    }

    fn respond(&self, q: &Query<'_>) -> Result<Reply, ClientError> {
        Ok(Reply::text(format_grid(&q.puzzle.test_input)))
    }
}

pub const REFERENCE_MODELS: [&str; 4] = ["oracle", "random_grid", "constant_grid", "echo_input"];

/// Reference model by id (`random` and `constant` and `echo` are accepted as
/// short forms).
pub fn reference_model(id: &str, seed: u64) -> Option<Box<dyn Model>> {
    match id {
        "oracle" => Some(Box::new(Oracle)),
        "random_grid" | "random" => Some(Box::new(RandomGrid { seed })),
        "constant_grid" | "constant" => Some(Box::new(ConstantGrid::default())),
        "echo_input" | "echo" => Some(Box::new(EchoInput)),
        _ => None,
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("record for {episode_id} does not match any manifest row")]
    UnjoinableRecord { episode_id: String },
    #[error("trials must be at least 1")]
    NoTrials,
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub trials: u32,
    pub concurrency: usize,
    pub template: PromptTemplate,
    /// Records file; existing records for the same model are kept and not
    /// re-queried, new ones are appended as they complete.
    pub checkpoint: Option<PathBuf>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            trials: 3,
            concurrency: 4,
            template: PromptTemplate::default(),
            checkpoint: None,
        }
    }
}

/// Reads a records file. A truncated final line (an interrupted write) is
/// dropped; any other malformed line is an error.
pub fn read_records(path: &Path) -> Result<Vec<EvalRecord>, EvalError> {
    let text = fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let mut out = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        match serde_json::from_str(line) {
            Ok(r) => out.push(r),
            Err(_) if i + 1 == lines.len() && !text.ends_with('\n') => {}
            Err(e) => {
                return Err(EvalError::Dataset(DatasetError::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    column: e.column(),
                    message: e.to_string(),
                }))
            }
        }
    }
    Ok(out)
}

pub fn write_records(path: &Path, records: &[EvalRecord]) -> Result<(), EvalError> {
    let io = |source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    for r in records {
        writeln!(w, "{}", canonical_json(r)).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Sorts records by manifest order, then trial, then model.
pub fn sort_records(records: &mut [EvalRecord], rows: &[ManifestRow]) {
    let order: HashMap<&str, usize> = rows.iter().enumerate().map(|(i, r)| (r.episode_id.as_str(), i)).collect();
    records.sort_by(|a, b| {
        let pos = |r: &EvalRecord| order.get(r.episode_id.as_str()).copied().unwrap_or(usize::MAX);
        (pos(a), &a.episode_id, a.trial_index, &a.model_id).cmp(&(pos(b), &b.episode_id, b.trial_index, &b.model_id))
    });
}

fn query_once(model: &dyn Model, row: &ManifestRow, puzzle: &Puzzle, prompt: &str, trial: u32, truth: &Grid) -> EvalRecord {
    let started = Instant::now();
    let reply = model.respond(&Query {
        row,
        puzzle,
        prompt,
        trial,
    });
    let latency_ms = started.elapsed().as_secs_f64() * 1000.0;
    let (raw_response, parsed, token_usage) = match reply {
        Ok(r) => {
            let parsed = Outcome::from_response(&r.text);
            (r.text, parsed, r.token_usage)
        }
        Err(ClientError::Transport { kind, attempts, message }) => {
            (String::new(), Outcome::TransportError { kind, attempts, message }, None)
        }
        Err(e @ ClientError::Auth { .. }) => (
            String::new(),
            Outcome::TransportError {
                kind: TransportErrorKind::Client,
                attempts: 0,
                message: e.to_string(),
            },
            None,
        ),
    };
    EvalRecord {
        episode_id: row.episode_id.clone(),
        model_id: model.model_id().to_string(),
        trial_index: trial,
        correct: parsed.grid() == Some(truth),
        raw_response,
        parsed,
        latency_ms,
        token_usage,
    }
}

/// Queries `model` `trials` times on every episode of the dataset. Per-episode
/// transport failures become records; only setup problems abort. The result
/// (including resumed records) is sorted by manifest order and trial.
pub fn run_eval(dataset: &Dataset, model: &dyn Model, opts: &EvalOptions) -> Result<Vec<EvalRecord>, EvalError> {
    if opts.trials == 0 {
        return Err(EvalError::NoTrials);
    }
    let answers = dataset.answers()?;
    let model_id = model.model_id().to_string();
    let mut done: Vec<EvalRecord> = match &opts.checkpoint {
        Some(p) if p.exists() => read_records(p)?,
        _ => Vec::new(),
    };
    let mine: HashSet<(String, u32)> = done
        .iter()
        .filter(|r| r.model_id == model_id)
        .map(|r| (r.episode_id.clone(), r.trial_index))
        .collect();
    let jobs: Vec<(&ManifestRow, u32)> = dataset
        .rows
        .iter()
        .flat_map(|row| (0..opts.trials).map(move |t| (row, t)))
        .filter(|(row, t)| !mine.contains(&(row.episode_id.clone(), *t)))
        .collect();

    let sink = match &opts.checkpoint {
        Some(p) => {
            // Rewrite what was read so a truncated tail line is gone.
            write_records(p, &done)?;
            Some(Mutex::new(OpenOptions::new().append(true).open(p).map_err(|source| EvalError::Io {
                path: p.clone(),
                source,
            })?))
        }
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.concurrency.max(1))
        .build()
        .map_err(|e| EvalError::Pool(e.to_string()))?;
    let fresh: Vec<EvalRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(row, trial)| -> Result<EvalRecord, EvalError> {
                let puzzle = dataset.puzzle(row)?;
                let prompt = build_prompt(&puzzle, &opts.template);
                let record = query_once(model, row, &puzzle, &prompt, trial, &answers[&row.episode_id]);
                if let (Some(sink), Some(path)) = (&sink, &opts.checkpoint) {
                    let mut f = sink.lock().unwrap();
                    writeln!(f, "{}", canonical_json(&record)).map_err(|source| EvalError::Io {
                        path: path.clone(),
                        source,
                    })?;
                }
                Ok(record)
            })
            .collect::<Result<_, _>>()
    })?;
    done.extend(fresh);
    sort_records(&mut done, &dataset.rows);
    if let Some(p) = &opts.checkpoint {
        write_records(p, &done)?;
    }
    Ok(done)
}

/// Re-parses stored responses and re-scores them against the answers.
/// Transport failures stay as they are.
pub fn rescore(records: &mut [EvalRecord], answers: &HashMap<String, Grid>) -> Result<(), EvalError> {
    for r in records {
        let truth = answers.get(&r.episode_id).ok_or_else(|| EvalError::UnjoinableRecord {
            episode_id: r.episode_id.clone(),
        })?;
        if !matches!(r.parsed, Outcome::TransportError { .. }) {
            r.parsed = Outcome::from_response(&r.raw_response);
        }
        r.correct = r.parsed.grid() == Some(truth);
    }
    Ok(())
}

/// Fraction of correct records.
pub fn overall_accuracy(records: &[EvalRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    records.iter().filter(|r| r.correct).count() as f64 / records.len() as f64
}
