//! Seeded, constraint-checked synthesis of inputs, episodes and datasets.
//!
//! Samplers build candidates mostly correct by construction; every candidate
//! is then validated against the task's constraint set and solved, and
//! rejected candidates are redrawn up to [`ATTEMPT_CAP`] times.

mod attribute;
mod physics;
mod place;
mod sequential;
mod spatial;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{constraint_set, ConstraintSet};
use crate::grid::Grid;
use crate::seed::{derive_seed, rng, Rng};
use crate::solve::{apply, SolveError, SolverParams};
use crate::taxonomy::{all_slots, BudgetConfig, ShapeMode, Slot, TaskKind, TaskSpec};

use place::Placer;

/// Candidates drawn per grid before giving up.
pub const ATTEMPT_CAP: usize = 1000;

pub const DEFAULT_TRAIN_PAIRS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("variable value {value} outside {min}..={max} for {task_id}")]
    VariableOutOfRange { task_id: String, value: i32, min: i32, max: i32 },
    #[error("no valid grid for {task_id} at value {value} (seed {seed}) after {attempts} attempts")]
    GenerationExhausted {
        task_id: String,
        value: i32,
        seed: u64,
        attempts: usize,
    },
    #[error("an episode needs at least one train pair")]
    NoTrainPairs,
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    pub input: Grid,
    pub output: Grid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Episode {
    pub task_id: String,
    pub variable_value: i32,
    pub seed: u64,
    pub train: Vec<Pair>,
    pub test_input: Grid,
    pub test_output: Grid,
}

impl Episode {
    pub fn n_train(&self) -> usize {
        self.train.len()
    }

    /// Every input grid, train first.
    pub fn inputs(&self) -> impl Iterator<Item = &Grid> {
        self.train.iter().map(|p| &p.input).chain([&self.test_input])
    }
}

fn sample(kind: TaskKind, params: &SolverParams, rng: &mut Rng) -> Option<Placer> {
    match (kind, params) {
        (TaskKind::Size(mode), &SolverParams::Size { side, .. }) => attribute::size(rng, mode, side),
        (TaskKind::Count(mode), &SolverParams::Count { target_count, .. }) => attribute::count(rng, mode, target_count),
        (TaskKind::Shape(mode), &SolverParams::Shape { shape_index, .. }) => attribute::shape(rng, mode, shape_index),
        (TaskKind::Move(d), &SolverParams::Move { distance, .. }) => spatial::movement(rng, d, distance),
        (TaskKind::Rotation(pivot), SolverParams::Rotation { .. }) => spatial::rotation(rng, pivot),
        (TaskKind::Symmetry(axis), &SolverParams::Symmetry { object_count, .. }) => {
            spatial::symmetry(rng, axis, object_count)
        }
        (TaskKind::Categorization(_), SolverParams::Categorization { rules }) => sequential::categorization(rng, rules),
        (TaskKind::Sort(key, _), &SolverParams::Sort { object_count, .. }) => sequential::sort(rng, key, object_count),
        (TaskKind::Planning(style), &SolverParams::Planning { steps }) => sequential::planning(rng, style, steps),
        (TaskKind::Gravity(layout), &SolverParams::Gravity { applications }) => {
            physics::gravity(rng, layout, applications)
        }
        (TaskKind::Reflection(_), SolverParams::Reflection { .. }) => physics::reflection(rng),
        (TaskKind::Expansion(layout), &SolverParams::Expansion { applications }) => {
            physics::expansion(rng, layout, applications)
        }
        _ => None,
    }
}

/// Instances whose rule legitimately leaves the grid unchanged: a single
/// object is already sorted, and stamping a dot is the identity.
fn identity_allowed(kind: TaskKind, params: &SolverParams) -> bool {
    match (kind, params) {
        (TaskKind::Sort(..), SolverParams::Sort { object_count, .. }) => *object_count == 1,
        (TaskKind::Shape(ShapeMode::Stamp), SolverParams::Shape { shape_index, .. }) => *shape_index == 1,
        _ => false,
    }
}

/// Draws one validated (input, output) pair whose input differs from every
/// grid in `taken`.
struct PairSampler<'a> {
    task: &'a TaskSpec,
    value: i32,
    seed: u64,
    params: SolverParams,
    constraints: ConstraintSet,
    identity_ok: bool,
}

impl<'a> PairSampler<'a> {
    fn new(task: &'a TaskSpec, value: i32, seed: u64) -> Result<Self, GenerateError> {
        let params = SolverParams::for_task(task, value).map_err(|e| match e {
            SolveError::VariableOutOfRange { value, min, max } => GenerateError::VariableOutOfRange {
                task_id: task.task_id.clone(),
                value,
                min,
                max,
            },
            _ => unreachable!("for_task only rejects out-of-range values"),
        })?;
        Ok(Self {
            task,
            value,
            seed,
            constraints: constraint_set(task, &params),
            identity_ok: identity_allowed(task.kind, &params),
            params,
        })
    }

    fn draw(&self, rng: &mut Rng, taken: &[Pair]) -> Result<Pair, GenerateError> {
        for _ in 0..ATTEMPT_CAP {
            let Some(candidate) = sample(self.task.kind, &self.params, rng) else {
                continue;
            };
            let input = candidate.grid();
            if taken.iter().any(|p| p.input == input) || self.constraints.validate(&input).is_err() {
                continue;
            }
            let Ok(output) = apply(&self.params, &input) else {
                continue;
            };
            if output == input && !self.identity_ok {
                continue;
            }
            return Ok(Pair { input, output });
        }
        Err(GenerateError::GenerationExhausted {
            task_id: self.task.task_id.clone(),
            value: self.value,
            seed: self.seed,
            attempts: ATTEMPT_CAP,
        })
    }
}

/// One constraint-satisfying input for the task at `value`. It is the first
/// train input of the episode generated from the same seed.
pub fn generate_input(task: &TaskSpec, value: i32, seed: u64) -> Result<Grid, GenerateError> {
    let sampler = PairSampler::new(task, value, seed)?;
    Ok(sampler.draw(&mut rng(seed), &[])?.input)
}

pub fn generate_episode(task: &TaskSpec, value: i32, seed: u64, n_train: usize) -> Result<Episode, GenerateError> {
    if n_train == 0 {
        return Err(GenerateError::NoTrainPairs);
    }
    let sampler = PairSampler::new(task, value, seed)?;
    let mut r = rng(seed);
    let mut pairs: Vec<Pair> = Vec::with_capacity(n_train + 1);
    while pairs.len() <= n_train {
        let pair = sampler.draw(&mut r, &pairs)?;
        pairs.push(pair);
    }
    let test = pairs.pop().expect("n_train + 1 pairs drawn");
    Ok(Episode {
        task_id: task.task_id.clone(),
        variable_value: value,
        seed,
        train: pairs,
        test_input: test.input,
        test_output: test.output,
    })
}

/// Position of an episode within a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpisodeKey {
    pub task: &'static TaskSpec,
    pub value: i32,
    pub index: u32,
    pub seed: u64,
}

impl EpisodeKey {
    pub fn episode_id(&self) -> String {
        format!("{}-v{}-{:03}", self.task.task_id, self.value, self.index)
    }
}

/// Every episode key of a dataset in manifest order: catalog order of tasks,
/// then variable value, then index.
pub fn dataset_keys(config: &BudgetConfig, master_seed: u64) -> Vec<EpisodeKey> {
    all_slots(config)
        .into_iter()
        .flat_map(|Slot { task, value, count }| {
            (0..count).map(move |index| EpisodeKey {
                task,
                value,
                index,
                seed: derive_seed(master_seed, &task.task_id, value, u64::from(index)),
            })
        })
        .collect()
}

#[derive(Debug)]
pub struct GenerationFailure {
    pub key: EpisodeKey,
    pub error: GenerateError,
}

#[derive(Debug, Default)]
pub struct DatasetOutcome {
    pub episodes: Vec<(EpisodeKey, Episode)>,
    pub failures: Vec<GenerationFailure>,
}

/// Generates every episode of the dataset on `workers` threads. Results come
/// back in manifest order whatever the scheduling; failed instances are
/// collected instead of aborting the run.
pub fn generate_dataset(
    config: &BudgetConfig,
    master_seed: u64,
    n_train: usize,
    workers: usize,
) -> Result<DatasetOutcome, GenerateError> {
    let keys = dataset_keys(config, master_seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| GenerateError::Pool(e.to_string()))?;
    let results: Vec<(EpisodeKey, Result<Episode, GenerateError>)> = pool.install(|| {
        keys.into_par_iter()
            .map(|key| {
                let episode = generate_episode(key.task, key.value, key.seed, n_train);
                (key, episode)
            })
            .collect()
    });
    let mut outcome = DatasetOutcome::default();
    for (key, result) in results {
        match result {
            Ok(e) => outcome.episodes.push((key, e)),
            Err(error) => outcome.failures.push(GenerationFailure { key, error }),
        }
    }
    Ok(outcome)
}
