use std::fmt::Write as _;

use super::metrics::{MetricsReport, ModelMetrics};
use crate::taxonomy::{CognitiveLevel, Family};

fn pct(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

fn title(s: &str) -> String {
    let mut c = s.chars();
    c.next().map_or_else(String::new, |f| f.to_uppercase().chain(c).collect())
}

fn row(cells: &[String]) -> String {
    format!("| {} |\n", cells.join(" | "))
}

fn rule(n: usize) -> String {
    let mut cells = vec!["---".to_string()];
    cells.extend(std::iter::repeat_n("---:".to_string(), n - 1));
    row(&cells)
}

fn level_table(report: &MetricsReport) -> String {
    let mut header = vec!["Model".to_string()];
    for level in CognitiveLevel::ALL {
        for family in level.families() {
            header.push(format!("{} / {}", title(level.name()), title(family.name())));
        }
        header.push(format!("{} / Avg", title(level.name())));
    }
    header.push("Overall".into());
    let mut out = row(&header) + &rule(header.len());
    for m in &report.models {
        let mut cells = vec![m.model_id.clone()];
        for level in CognitiveLevel::ALL {
            for family in level.families() {
                cells.push(m.family(family).map_or("-".into(), |f| pct(f.accuracy)));
            }
            cells.push(m.level(level).map_or("-".into(), |l| pct(l.accuracy)));
        }
        cells.push(pct(m.overall));
        out += &row(&cells);
    }
    out
}

/// Task ids in first-seen order across models.
fn task_ids(report: &MetricsReport) -> Vec<(String, CognitiveLevel, Family, String)> {
    let mut ids: Vec<(String, CognitiveLevel, Family, String)> = Vec::new();
    for m in &report.models {
        for t in &m.tasks {
            if !ids.iter().any(|(id, ..)| *id == t.task_id) {
                ids.push((t.task_id.clone(), t.level, t.family, t.variant.clone()));
            }
        }
    }
    ids
}

fn task_table(report: &MetricsReport) -> String {
    let mut header = vec!["Task".to_string(), "Level".into(), "Family".into()];
    header.extend(report.models.iter().map(|m| m.model_id.clone()));
    let mut out = row(&header) + &rule(header.len());
    for (id, level, family, _) in task_ids(report) {
        let mut cells = vec![id.clone(), level.name().to_string(), family.name().to_string()];
        for m in &report.models {
            cells.push(
                m.task(&id)
                    .map_or("-".into(), |t| format!("{} / {:.4}", pct(t.mean_accuracy), t.variance)),
            );
        }
        out += &row(&cells);
    }
    out
}

fn directional_table(report: &MetricsReport) -> String {
    let tasks: Vec<(String, String)> = task_ids(report)
        .into_iter()
        .filter(|(_, _, f, _)| matches!(f, Family::Move | Family::Symmetry))
        .map(|(id, _, f, variant)| (id, format!("{} {}", title(f.name()), variant.replace('_', " "))))
        .collect();
    let mut header = vec!["Model".to_string()];
    header.extend(tasks.iter().map(|(_, label)| label.clone()));
    let mut out = row(&header) + &rule(header.len().max(2));
    for m in &report.models {
        let mut cells = vec![m.model_id.clone()];
        cells.extend(tasks.iter().map(|(id, _)| m.task(id).map_or("-".into(), |t| pct(t.mean_accuracy))));
        out += &row(&cells);
    }
    out
}

fn curve_lines(m: &ModelMetrics) -> String {
    let mut out = String::new();
    for t in &m.tasks {
        let points: Vec<String> = t
            .values
            .iter()
            .map(|v| format!("{}:{} (n={}, trials={})", v.variable_value, pct(v.accuracy), v.episodes, v.trials))
            .collect();
        let _ = writeln!(out, "- `{}`: {}", t.task_id, points.join(", "));
    }
    out
}

pub fn report_markdown(report: &MetricsReport) -> String {
    let mut out = String::from("# Evaluation report\n\n");
    out += "Accuracy is the exact-match rate, averaged over trials before averaging over variable values. \
            Variance is the population variance of the per-value accuracies within a task. \
            Family scores average their tasks; level scores average their families.\n\n";
    out += "## Accuracy by level and family [%]\n\n";
    out += &level_table(report);
    out += "\n## Per-task results (Accuracy [%] / Variance)\n\n";
    out += &task_table(report);
    out += "\n## Directional move and symmetry [%]\n\n";
    out += &directional_table(report);
    out += "\n## Accuracy by variable value [%]\n";
    for m in &report.models {
        let _ = write!(out, "\n### {}\n\n", m.model_id);
        out += &curve_lines(m);
    }
    out
}

pub fn report_json(report: &MetricsReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes") + "\n"
}

/// `model_id,task_id,variable_value,accuracy`, one row per task value.
pub fn curves_csv(report: &MetricsReport) -> String {
    let mut out = String::from("model_id,task_id,variable_value,accuracy\n");
    for m in &report.models {
        for t in &m.tasks {
            for v in &t.values {
                let _ = writeln!(out, "{},{},{},{}", m.model_id, t.task_id, v.variable_value, v.accuracy);
            }
        }
    }
    out
}
