use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{EvalError, EvalRecord};
use crate::dataset::ManifestRow;
use crate::taxonomy::{CognitiveLevel, Family};

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueMetrics {
    pub variable_value: i32,
    pub episodes: usize,
    pub trials: usize,
    pub attempted: usize,
    pub correct: usize,
    /// Mean over trials of the per-trial fraction correct.
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskMetrics {
    pub task_id: String,
    pub level: CognitiveLevel,
    pub family: Family,
    pub variant: String,
    pub values: Vec<ValueMetrics>,
    pub mean_accuracy: f64,
    /// Population variance of the per-value accuracies.
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMetrics {
    pub family: Family,
    pub level: CognitiveLevel,
    /// Unweighted mean of the task accuracies.
    pub accuracy: f64,
    /// Unweighted mean of the task variances.
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMetrics {
    pub level: CognitiveLevel,
    /// Unweighted mean of the family accuracies.
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetrics {
    pub model_id: String,
    pub tasks: Vec<TaskMetrics>,
    pub families: Vec<FamilyMetrics>,
    pub levels: Vec<LevelMetrics>,
    /// Unweighted mean of the level accuracies.
    pub overall: f64,
}

impl ModelMetrics {
    pub fn task(&self, task_id: &str) -> Option<&TaskMetrics> {
        self.tasks.iter().find(|t| t.task_id == task_id)
    }

    pub fn family(&self, family: Family) -> Option<&FamilyMetrics> {
        self.families.iter().find(|f| f.family == family)
    }

    pub fn level(&self, level: CognitiveLevel) -> Option<&LevelMetrics> {
        self.levels.iter().find(|l| l.level == level)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub variance_kind: String,
    pub models: Vec<ModelMetrics>,
}

#[derive(Default)]
struct Tally {
    correct: usize,
    attempted: usize,
}

/// Joins records to the manifest and aggregates per model. Models are
/// ordered by id, tasks by manifest order, values ascending, so the result
/// does not depend on record order.
pub fn aggregate(records: &[EvalRecord], rows: &[ManifestRow]) -> Result<MetricsReport, EvalError> {
    let by_id: HashMap<&str, (usize, &ManifestRow)> =
        rows.iter().enumerate().map(|(i, r)| (r.episode_id.as_str(), (i, r))).collect();
    // model -> task position -> value -> trial -> tally, plus distinct episodes
    type Trials = BTreeMap<u32, Tally>;
    type Values = BTreeMap<i32, (Trials, std::collections::BTreeSet<usize>)>;
    let mut tree: BTreeMap<&str, BTreeMap<usize, (&ManifestRow, Values)>> = BTreeMap::new();
    let mut task_pos: HashMap<&str, usize> = HashMap::new();
    for (i, r) in rows.iter().enumerate() {
        task_pos.entry(r.task_id.as_str()).or_insert(i);
    }
    for rec in records {
        let &(row_idx, row) = by_id.get(rec.episode_id.as_str()).ok_or_else(|| EvalError::UnjoinableRecord {
            episode_id: rec.episode_id.clone(),
        })?;
        let pos = task_pos[row.task_id.as_str()];
        let (_, values) = tree
            .entry(rec.model_id.as_str())
            .or_default()
            .entry(pos)
            .or_insert_with(|| (row, BTreeMap::new()));
        let (trials, episodes) = values.entry(row.variable_value).or_default();
        let t = trials.entry(rec.trial_index).or_default();
        t.attempted += 1;
        t.correct += usize::from(rec.correct);
        episodes.insert(row_idx);
    }

    let models = tree
        .into_iter()
        .map(|(model_id, tasks)| {
            let tasks: Vec<TaskMetrics> = tasks
                .into_values()
                .map(|(row, values)| {
                    let values: Vec<ValueMetrics> = values
                        .into_iter()
                        .map(|(variable_value, (trials, episodes))| {
                            let per_trial: Vec<f64> =
                                trials.values().map(|t| t.correct as f64 / t.attempted as f64).collect();
                            ValueMetrics {
                                variable_value,
                                episodes: episodes.len(),
                                trials: trials.len(),
                                attempted: trials.values().map(|t| t.attempted).sum(),
                                correct: trials.values().map(|t| t.correct).sum(),
                                accuracy: mean(&per_trial),
                            }
                        })
                        .collect();
                    let accs: Vec<f64> = values.iter().map(|v| v.accuracy).collect();
                    TaskMetrics {
                        task_id: row.task_id.clone(),
                        level: row.level,
                        family: row.family,
                        variant: row.variant.clone(),
                        mean_accuracy: mean(&accs),
                        variance: variance(&accs),
                        values,
                    }
                })
                .collect();
            let families: Vec<FamilyMetrics> = Family::ALL
                .into_iter()
                .filter_map(|family| {
                    let members: Vec<&TaskMetrics> = tasks.iter().filter(|t| t.family == family).collect();
                    (!members.is_empty()).then(|| FamilyMetrics {
                        family,
                        level: family.level(),
                        accuracy: mean(&members.iter().map(|t| t.mean_accuracy).collect::<Vec<_>>()),
                        variance: mean(&members.iter().map(|t| t.variance).collect::<Vec<_>>()),
                    })
                })
                .collect();
            let levels: Vec<LevelMetrics> = CognitiveLevel::ALL
                .into_iter()
                .filter_map(|level| {
                    let accs: Vec<f64> = families.iter().filter(|f| f.level == level).map(|f| f.accuracy).collect();
                    (!accs.is_empty()).then(|| LevelMetrics {
                        level,
                        accuracy: mean(&accs),
                    })
                })
                .collect();
            let overall = mean(&levels.iter().map(|l| l.accuracy).collect::<Vec<_>>());
            ModelMetrics {
                model_id: model_id.to_string(),
                tasks,
                families,
                levels,
                overall,
            }
        })
        .collect();
    Ok(MetricsReport {
        variance_kind: "population".into(),
        models,
    })
}
