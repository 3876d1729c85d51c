//! Checks against the hand-labeled fixture files in `tests/fixtures`.

use std::path::Path;

use dynagrid::dataset::ManifestRow;
use dynagrid::eval::{aggregate, parse_grid, variance, EvalRecord, ParseFailure};
use dynagrid::grid::Grid;
use serde::Deserialize;

pub const TOLERANCE: f64 = 1e-12;

#[derive(Deserialize)]
struct NoisyResponse {
    name: String,
    response: String,
    #[serde(default)]
    grid: Option<Vec<Vec<u8>>>,
    #[serde(default)]
    failure: Option<ParseFailure>,
}

/// Parses every noisy response and compares with its label. Returns the
/// number of fixtures checked.
pub fn check_noisy_responses(dir: &Path) -> Result<usize, String> {
    let text = std::fs::read_to_string(dir.join("noisy_responses.json")).map_err(|e| e.to_string())?;
    let cases: Vec<NoisyResponse> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    for c in &cases {
        let expected: Result<Grid, ParseFailure> = match (&c.grid, c.failure) {
            (Some(rows), None) => Ok(Grid::from_rows(rows).map_err(|e| format!("{}: bad label: {e}", c.name))?),
            (None, Some(f)) => Err(f),
            _ => return Err(format!("{}: needs exactly one of grid or failure", c.name)),
        };
        let got = parse_grid(&c.response);
        if got != expected {
            bad.push(format!("{}: expected {expected:?}, got {got:?}", c.name));
        }
    }
    if bad.is_empty() {
        Ok(cases.len())
    } else {
        Err(bad.join("\n"))
    }
}

#[derive(Deserialize)]
struct ExpectedValue {
    task_id: String,
    variable_value: i32,
    accuracy: f64,
}

#[derive(Deserialize)]
struct ExpectedTask {
    task_id: String,
    mean_accuracy: f64,
    variance: f64,
}

#[derive(Deserialize)]
struct ExpectedFamily {
    family: dynagrid::taxonomy::Family,
    accuracy: f64,
    variance: f64,
}

#[derive(Deserialize)]
struct ExpectedLevel {
    level: dynagrid::taxonomy::CognitiveLevel,
    accuracy: f64,
}

#[derive(Deserialize)]
struct Expected {
    values: Vec<ExpectedValue>,
    tasks: Vec<ExpectedTask>,
    families: Vec<ExpectedFamily>,
    levels: Vec<ExpectedLevel>,
}

#[derive(Deserialize)]
struct MetricsFixture {
    rows: Vec<ManifestRow>,
    records: Vec<EvalRecord>,
    expected: Expected,
}

fn close(what: &str, got: f64, want: f64, bad: &mut Vec<String>) {
    if (got - want).abs() > TOLERANCE {
        bad.push(format!("{what}: got {got}, want {want}"));
    }
}

/// Aggregates the 500-record fixture and compares every figure with the
/// precomputed values. Returns the record count.
pub fn check_metrics_fixture(dir: &Path) -> Result<usize, String> {
    let text = std::fs::read_to_string(dir.join("metrics_fixture.json")).map_err(|e| e.to_string())?;
    let fx: MetricsFixture = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let report = aggregate(&fx.records, &fx.rows).map_err(|e| e.to_string())?;
    let [m] = report.models.as_slice() else {
        return Err(format!("expected one model, got {}", report.models.len()));
    };
    let mut bad = Vec::new();
    for e in &fx.expected.values {
        match m
            .task(&e.task_id)
            .and_then(|t| t.values.iter().find(|v| v.variable_value == e.variable_value))
        {
            Some(v) => close(&format!("{} v{}", e.task_id, e.variable_value), v.accuracy, e.accuracy, &mut bad),
            None => bad.push(format!("{} v{} missing", e.task_id, e.variable_value)),
        }
    }
    for e in &fx.expected.tasks {
        match m.task(&e.task_id) {
            Some(t) => {
                close(&format!("{} accuracy", e.task_id), t.mean_accuracy, e.mean_accuracy, &mut bad);
                close(&format!("{} variance", e.task_id), t.variance, e.variance, &mut bad);
            }
            None => bad.push(format!("{} missing", e.task_id)),
        }
    }
    for e in &fx.expected.families {
        match m.family(e.family) {
            Some(f) => {
                close(&format!("{} accuracy", e.family), f.accuracy, e.accuracy, &mut bad);
                close(&format!("{} variance", e.family), f.variance, e.variance, &mut bad);
            }
            None => bad.push(format!("{} missing", e.family)),
        }
    }
    for e in &fx.expected.levels {
        match m.level(e.level) {
            Some(l) => close(&format!("{} accuracy", e.level), l.accuracy, e.accuracy, &mut bad),
            None => bad.push(format!("{} missing", e.level)),
        }
    }
    if m.tasks.len() != fx.expected.tasks.len() {
        bad.push(format!("{} tasks aggregated, {} expected", m.tasks.len(), fx.expected.tasks.len()));
    }
    if variance(&[1.0, 0.0]) != 0.25 {
        bad.push("variance of {1, 0} is not 0.25".into());
    }
    if bad.is_empty() {
        Ok(fx.records.len())
    } else {
        Err(bad.join("\n"))
    }
}
