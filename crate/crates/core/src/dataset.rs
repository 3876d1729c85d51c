//! On-disk dataset layout.
//!
//! ```text
//! <root>/manifest.jsonl                    header line, then one row per episode
//! <root>/answers.jsonl                     {"episode_id", "test_output"} per line
//! <root>/episodes/<task_id>/<id>.json      model-facing train pairs + test input
//! ```
//!
//! Every JSON document is written in canonical form (object keys sorted, no
//! insignificant whitespace, trailing newline) so file hashes are stable.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::generate::{DatasetOutcome, Episode, EpisodeKey, Pair};
use crate::grid::{Grid, MAX_COLOR, MAX_SIDE};
use crate::taxonomy::{CognitiveLevel, Family};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const ANSWERS_FILE: &str = "answers.jsonl";
pub const EPISODES_DIR: &str = "episodes";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: invariant violated: {invariant}")]
    InvariantViolation { path: PathBuf, invariant: String },
    #[error("{path}: {message}")]
    Manifest { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, e: serde_json::Error) -> DatasetError {
    DatasetError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Compact JSON with object keys in sorted order.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json's Value map is ordered by key.
    let v = serde_json::to_value(value).expect("serializable value");
    serde_json::to_string(&v).expect("value serializes")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical serialization of a grid.
pub fn grid_checksum(grid: &Grid) -> String {
    sha256_hex(canonical_json(grid).as_bytes())
}

/// The model-facing part of an episode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Puzzle {
    pub train: Vec<Pair>,
    pub test_input: Grid,
}

impl From<&Episode> for Puzzle {
    fn from(e: &Episode) -> Self {
        Self {
            train: e.train.clone(),
            test_input: e.test_input.clone(),
        }
    }
}

#[derive(Serialize)]
struct TestInput<'a> {
    input: &'a Grid,
}

#[derive(Serialize)]
struct PuzzleFile<'a> {
    train: &'a [Pair],
    test: [TestInput<'a>; 1],
}

impl Puzzle {
    /// ARC-style JSON without the test output.
    pub fn to_json(&self) -> String {
        canonical_json(&PuzzleFile {
            train: &self.train,
            test: [TestInput {
                input: &self.test_input,
            }],
        })
    }
}

/// Grid as read from disk: rectangular (checked during parsing, so errors
/// carry a position) but with unchecked cell values.
struct RawGrid(Vec<Vec<i64>>);

impl<'de> Deserialize<'de> for RawGrid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || width == 0 {
            return Err(D::Error::custom("empty grid"));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != width) {
            return Err(D::Error::custom(format!(
                "ragged grid: row {i} has {} cells, expected {width}",
                rows[i].len()
            )));
        }
        Ok(RawGrid(rows))
    }
}

impl RawGrid {
    fn validate(self, path: &Path) -> Result<Grid, DatasetError> {
        let violation = |invariant: String| DatasetError::InvariantViolation {
            path: path.to_path_buf(),
            invariant,
        };
        let (rows, cols) = (self.0.len(), self.0[0].len());
        if rows > MAX_SIDE || cols > MAX_SIDE {
            return Err(violation(format!("grid dimensions {rows}x{cols} exceed {MAX_SIDE}")));
        }
        let mut cells = Vec::with_capacity(rows * cols);
        for (r, row) in self.0.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if !(0..=i64::from(MAX_COLOR)).contains(&v) {
                    return Err(violation(format!("cell range: value {v} at ({r}, {c}) outside 0..={MAX_COLOR}")));
                }
                cells.push(v as u8);
            }
        }
        Grid::new(rows, cols, cells).map_err(|e| violation(e.to_string()))
    }
}

#[derive(Deserialize)]
struct RawPair {
    input: RawGrid,
    output: RawGrid,
}

#[derive(Deserialize)]
struct RawTest {
    input: RawGrid,
}

#[derive(Deserialize)]
struct RawPuzzle {
    train: Vec<RawPair>,
    test: Vec<RawTest>,
}

pub fn parse_puzzle(text: &str, path: &Path) -> Result<Puzzle, DatasetError> {
    let raw: RawPuzzle = serde_json::from_str(text).map_err(|e| parse_err(path, e))?;
    let mut tests = raw.test.into_iter();
    let (Some(test), None) = (tests.next(), tests.next()) else {
        return Err(DatasetError::InvariantViolation {
            path: path.to_path_buf(),
            invariant: "exactly one test input".into(),
        });
    };
    let train = raw
        .train
        .into_iter()
        .map(|p| {
            Ok(Pair {
                input: p.input.validate(path)?,
                output: p.output.validate(path)?,
            })
        })
        .collect::<Result<Vec<_>, DatasetError>>()?;
    if train.is_empty() {
        return Err(DatasetError::InvariantViolation {
            path: path.to_path_buf(),
            invariant: "at least one train pair".into(),
        });
    }
    Ok(Puzzle {
        train,
        test_input: test.input.validate(path)?,
    })
}

pub fn read_episode(path: &Path) -> Result<Puzzle, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_puzzle(&text, path)
}

/// Relative path of an episode file.
pub fn episode_path(task_id: &str, episode_id: &str) -> String {
    format!("{EPISODES_DIR}/{task_id}/{episode_id}.json")
}

/// Writes the model-facing file and returns its path relative to `root`.
pub fn write_episode(root: &Path, episode_id: &str, episode: &Episode) -> Result<String, DatasetError> {
    let rel = episode_path(&episode.task_id, episode_id);
    let path = root.join(&rel);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut text = Puzzle::from(episode).to_json();
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(rel)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub format: String,
    pub master_seed: u64,
    pub n_train: usize,
    pub budget_scale: f64,
    pub episodes: usize,
    /// The resolved run configuration the dataset was generated from.
    pub config: serde_json::Value,
    pub config_hash: String,
}

impl ManifestHeader {
    pub const FORMAT: &'static str = "dynagrid-manifest/1";

    pub fn new(master_seed: u64, n_train: usize, budget_scale: f64, episodes: usize, config: serde_json::Value) -> Self {
        let config_hash = sha256_hex(canonical_json(&config).as_bytes());
        Self {
            format: Self::FORMAT.to_string(),
            master_seed,
            n_train,
            budget_scale,
            episodes,
            config,
            config_hash,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub episode_id: String,
    pub task_id: String,
    pub level: CognitiveLevel,
    pub family: Family,
    pub variant: String,
    pub variable_name: String,
    pub variable_value: i32,
    pub seed: u64,
    pub path: String,
    pub answer_checksum: String,
    pub n_train: usize,
}

impl ManifestRow {
    pub fn new(key: &EpisodeKey, episode: &Episode, path: String) -> Self {
        let t = key.task;
        Self {
            episode_id: key.episode_id(),
            task_id: t.task_id.clone(),
            level: t.level,
            family: t.family,
            variant: t.variant.clone(),
            variable_name: t.variable.name.clone(),
            variable_value: key.value,
            seed: key.seed,
            path,
            answer_checksum: grid_checksum(&episode.test_output),
            n_train: episode.n_train(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerRow {
    pub episode_id: String,
    pub test_output: Grid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WriteSummary {
    pub episodes: usize,
    pub manifest_hash: String,
}

fn jsonl<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&canonical_json(&r));
        out.push('\n');
    }
    out
}

/// Writes episode files, the answers sidecar and the manifest.
pub fn write_dataset(root: &Path, outcome: &DatasetOutcome, header: &ManifestHeader) -> Result<WriteSummary, DatasetError> {
    fs::create_dir_all(root).map_err(io_err(root))?;
    let rows: Vec<ManifestRow> = outcome
        .episodes
        .par_iter()
        .map(|(key, episode)| {
            let rel = write_episode(root, &key.episode_id(), episode)?;
            Ok(ManifestRow::new(key, episode, rel))
        })
        .collect::<Result<_, DatasetError>>()?;
    let answers = outcome.episodes.iter().map(|(key, e)| AnswerRow {
        episode_id: key.episode_id(),
        test_output: e.test_output.clone(),
    });
    let answers_path = root.join(ANSWERS_FILE);
    fs::write(&answers_path, jsonl(answers)).map_err(io_err(&answers_path))?;
    let manifest = canonical_json(header) + "\n" + &jsonl(&rows);
    let manifest_path = root.join(MANIFEST_FILE);
    fs::write(&manifest_path, &manifest).map_err(io_err(&manifest_path))?;
    Ok(WriteSummary {
        episodes: rows.len(),
        manifest_hash: sha256_hex(manifest.as_bytes()),
    })
}

/// Hash of an existing manifest, if there is one.
pub fn manifest_hash(root: &Path) -> Option<String> {
    fs::read(root.join(MANIFEST_FILE)).ok().map(|b| sha256_hex(&b))
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| DatasetError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                column: e.column(),
                message: e.to_string(),
            })
        })
        .collect()
}

/// A dataset opened from disk.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub root: PathBuf,
    pub header: ManifestHeader,
    pub rows: Vec<ManifestRow>,
}

impl Dataset {
    pub fn open(root: &Path) -> Result<Self, DatasetError> {
        let path = root.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let mut lines = text.lines();
        let first = lines.next().ok_or_else(|| DatasetError::Manifest {
            path: path.clone(),
            message: "empty manifest".into(),
        })?;
        let header: ManifestHeader = serde_json::from_str(first).map_err(|e| parse_err(&path, e))?;
        let rows = lines
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| DatasetError::Parse {
                    path: path.clone(),
                    line: i + 2,
                    column: e.column(),
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<ManifestRow>, _>>()?;
        Ok(Self {
            root: root.to_path_buf(),
            header,
            rows,
        })
    }

    pub fn puzzle(&self, row: &ManifestRow) -> Result<Puzzle, DatasetError> {
        read_episode(&self.root.join(&row.path))
    }

    /// Ground-truth test outputs keyed by episode id, checked against the
    /// manifest checksums.
    pub fn answers(&self) -> Result<HashMap<String, Grid>, DatasetError> {
        let path = self.root.join(ANSWERS_FILE);
        let rows: Vec<AnswerRow> = read_jsonl(&path)?;
        let answers: HashMap<String, Grid> = rows.into_iter().map(|a| (a.episode_id, a.test_output)).collect();
        for row in &self.rows {
            match answers.get(&row.episode_id) {
                Some(g) if grid_checksum(g) == row.answer_checksum => {}
                Some(_) => {
                    return Err(DatasetError::Manifest {
                        path,
                        message: format!("answer checksum mismatch for {}", row.episode_id),
                    })
                }
                None => {
                    return Err(DatasetError::Manifest {
                        path,
                        message: format!("no answer for {}", row.episode_id),
                    })
                }
            }
        }
        Ok(answers)
    }
}
