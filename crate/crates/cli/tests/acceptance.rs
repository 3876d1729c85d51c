//! End-to-end acceptance checks. Prints one `[PASS]`/`[FAIL]` line per
//! criterion and exits nonzero if any fails.

#[path = "../../core/tests/support/properties.rs"]
#[allow(dead_code)]
mod properties;

#[path = "../../core/tests/support/fixtures.rs"]
mod fixtures;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dynagrid::client::{MockTransport, ModelClient, ModelHandle};
use dynagrid::dataset::Dataset;
use dynagrid::eval::{run_eval, EvalOptions};
use dynagrid::taxonomy::{CognitiveLevel, Family};

/// Single-worker wall-clock budget for the default dataset.
const GENERATION_BUDGET: Duration = Duration::from_secs(120);
const DEFAULT_TOTAL: usize = 3955;
const ORACLE_TRIALS: usize = 3;
const PROPERTY_CASES: u32 = 1000;
const MOCK_DELAY_MS: f64 = 50.0;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Check + 'a>);

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dynagrid"))
}

/// Runs the CLI and returns stdout; any nonzero exit is an error.
fn cli(args: &[&str]) -> Result<String, String> {
    let out = bin().args(args).output().map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    if !out.status.success() {
        return Err(format!(
            "dynagrid {} exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(stdout)
}

fn field<'a>(stdout: &'a str, key: &str) -> Result<&'a str, String> {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .or_else(|| {
            stdout
                .split_whitespace()
                .find_map(|t| t.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        })
        .ok_or_else(|| format!("no {key}= in output"))
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn files_under(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn counts_and_time(data: &Path) -> Check {
    let started = Instant::now();
    let out = cli(&["generate", "--seed", "0", "--concurrency", "1", "--out", s(data)])?;
    let elapsed = started.elapsed();
    let mut bad = Vec::new();
    for f in Family::ALL {
        let n: u32 = field(&out, &format!("family={} count", f.name()))?.parse().map_err(|_| "bad count")?;
        if n != f.default_budget() {
            bad.push(format!("{f}: {n} != {}", f.default_budget()));
        }
    }
    let total: usize = field(&out, "total")?.parse().map_err(|_| "bad total")?;
    if total != DEFAULT_TOTAL {
        bad.push(format!("total {total}"));
    }
    if field(&out, "failures")? != "0" {
        bad.push("generation failures".into());
    }
    let rows = Dataset::open(data).map_err(|e| e.to_string())?.rows.len();
    if rows != DEFAULT_TOTAL {
        bad.push(format!("manifest has {rows} rows"));
    }
    if elapsed > GENERATION_BUDGET {
        bad.push(format!("took {elapsed:?}"));
    }
    if bad.is_empty() {
        Ok(format!("{total} episodes in {:.1}s on one worker", elapsed.as_secs_f64()))
    } else {
        Err(bad.join("; "))
    }
}

fn oracle_is_perfect(data: &Path, records: &Path) -> Check {
    let out = cli(&[
        "eval",
        "--dataset",
        s(data),
        "--model",
        "oracle",
        "--trials",
        &ORACLE_TRIALS.to_string(),
        "--records",
        s(records),
    ])?;
    let n: usize = field(&out, "records")?.parse().map_err(|_| "bad records")?;
    let acc = field(&out, "accuracy")?;
    if n == ORACLE_TRIALS * DEFAULT_TOTAL && acc == "1.0000" {
        Ok(format!("{n} records, accuracy {acc}"))
    } else {
        Err(format!("{n} records, accuracy {acc}"))
    }
}

fn deterministic(first: &Path, second: &Path) -> Check {
    let out = cli(&["generate", "--seed", "0", "--out", s(second)])?;
    let (a, b) = (files_under(first), files_under(second));
    let a: BTreeMap<_, _> = a.into_iter().filter(|(p, _)| !p.starts_with("records")).collect();
    if a.len() != b.len() {
        return Err(format!("{} files vs {}", a.len(), b.len()));
    }
    if let Some((p, _)) = a.iter().find(|(p, bytes)| b.get(*p) != Some(bytes)) {
        return Err(format!("{} differs", p.display()));
    }
    Ok(format!("{} files identical, manifest {}", a.len(), &field(&out, "manifest_hash")?[..12]))
}

fn property_suites() -> Check {
    let mut bad = Vec::new();
    for (name, suite) in properties::SUITES {
        if let Err(e) = suite(PROPERTY_CASES) {
            bad.push(format!("{name}: {e}"));
        }
    }
    if bad.is_empty() {
        Ok(format!("{} suites x {PROPERTY_CASES} cases", properties::SUITES.len()))
    } else {
        Err(bad.join("\n"))
    }
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn metrics_fixture() -> Check {
    fixtures::check_metrics_fixture(&fixture_dir())
        .map(|n| format!("{n} records within {:e}", fixtures::TOLERANCE))
}

fn report_structure(data: &Path, records: &Path, out_dir: &Path) -> Check {
    cli(&["report", "--dataset", s(data), "--records", s(records), "--out", s(out_dir)])?;
    let md = std::fs::read_to_string(out_dir.join("report.md")).map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    let mut header = vec!["Model".to_string()];
    for level in CognitiveLevel::ALL {
        let title = |s: &str| format!("{}{}", s[..1].to_uppercase(), &s[1..]);
        for f in level.families() {
            header.push(format!("{} / {}", title(level.name()), title(f.name())));
        }
        header.push(format!("{} / Avg", title(level.name())));
    }
    header.push("Overall".into());
    let header_line = format!("| {} |", header.join(" | "));
    if !md.contains(&header_line) {
        bad.push(format!("missing header {header_line}"));
    }
    if !md.contains("| oracle | 100.00 |") {
        bad.push("no oracle row at 100.00".into());
    }
    for section in ["## Accuracy by level and family [%]", "## Per-task results (Accuracy [%] / Variance)"] {
        if !md.contains(section) {
            bad.push(format!("missing {section}"));
        }
    }
    let ds = Dataset::open(data).map_err(|e| e.to_string())?;
    let mut tasks: Vec<&str> = ds.rows.iter().map(|r| r.task_id.as_str()).collect();
    tasks.dedup();
    let task_cells = md.matches("100.00 / 0.0000").count();
    if task_cells != tasks.len() {
        bad.push(format!("{task_cells} per-task cells for {} tasks", tasks.len()));
    }
    for f in ["report.json", "curves.csv"] {
        if !out_dir.join(f).exists() {
            bad.push(format!("no {f}"));
        }
    }
    if bad.is_empty() {
        Ok(format!("{} columns, {} per-task cells", header.len(), task_cells))
    } else {
        Err(bad.join("; "))
    }
}

fn parse_fixtures() -> Check {
    fixtures::check_noisy_responses(&fixture_dir()).map(|n| format!("{n} responses"))
}

fn train_pairs_and_render(tmp: &Path) -> Check {
    let mut notes = Vec::new();
    for k in 1..=4usize {
        let dir = tmp.join(format!("k{k}"));
        cli(&["generate", "--scale", "0.02", "--n-train", &k.to_string(), "--out", s(&dir)])?;
        let ds = Dataset::open(&dir).map_err(|e| e.to_string())?;
        for row in &ds.rows {
            let p = ds.puzzle(row).map_err(|e| e.to_string())?;
            if p.train.len() != k || row.n_train != k {
                return Err(format!("{}: {} train pairs, wanted {k}", row.episode_id, p.train.len()));
            }
        }
        notes.push(format!("K={k}:{}", ds.rows.len()));
    }
    let data = tmp.join("k3");
    let ids: Vec<String> = Dataset::open(&data).map_err(|e| e.to_string())?.rows[..2]
        .iter()
        .map(|r| r.episode_id.clone())
        .collect();
    for (layout, per_episode) in [("multi", 7), ("single", 1)] {
        let out_dir = tmp.join(format!("png_{layout}"));
        let out = cli(&[
            "render", "--dataset", s(&data), "--out", s(&out_dir), "--layout", layout, "--episode", &ids[0],
            "--episode", &ids[1],
        ])?;
        let files = files_under(&out_dir);
        if field(&out, "files")? != (2 * per_episode).to_string() || files.len() != 2 * per_episode {
            return Err(format!("{layout}: {} files", files.len()));
        }
        if files.keys().any(|p| p.to_string_lossy().contains("output") && !p.to_string_lossy().contains("train")) {
            return Err("test output rendered".into());
        }
    }
    let out = cli(&["render", "--dataset", s(&tmp.join("k2")), "--out", s(&tmp.join("png_k2")), "--limit", "1"])?;
    if field(&out, "files")? != "5" {
        return Err("K=2 render did not give 5 panels".into());
    }
    notes.push("render 14/2 files".into());
    Ok(notes.join(", "))
}

fn mock_latency(tmp: &Path) -> Check {
    let dir = tmp.join("latency");
    cli(&["generate", "--scale", "0.01", "--out", s(&dir)])?;
    let ds = Dataset::open(&dir).map_err(|e| e.to_string())?;
    let t = MockTransport::canned("[[0]]").with_delay(Duration::from_millis(MOCK_DELAY_MS as u64));
    let client = ModelClient::new(ModelHandle::new("mock", "mock://"), Box::new(t)).map_err(|e| e.to_string())?;
    let opts = EvalOptions {
        trials: 1,
        concurrency: 4,
        ..EvalOptions::default()
    };
    let recs = run_eval(&ds, &client, &opts).map_err(|e| e.to_string())?;
    let min = recs.iter().map(|r| r.latency_ms).fold(f64::INFINITY, f64::min);
    if recs.len() == ds.rows.len() && min >= MOCK_DELAY_MS {
        Ok(format!("{} records, min latency {min:.1} ms", recs.len()))
    } else {
        Err(format!("{} records, min latency {min:.1} ms", recs.len()))
    }
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temp dir");
    let data = tmp.path().join("data");
    let records = tmp.path().join("oracle.jsonl");
    let criteria: Vec<Criterion> = vec![
        ("default dataset has the exact family counts within the time budget", Box::new(|| counts_and_time(&data))),
        ("oracle scores 1.000 on every episode and trial", Box::new(|| oracle_is_perfect(&data, &records))),
        ("same seed gives byte-identical datasets", Box::new(|| deterministic(&data, &tmp.path().join("again")))),
        ("transformation property suites hold", Box::new(property_suites)),
        ("aggregation matches the hand-computed fixture", Box::new(metrics_fixture)),
        ("report has the level/family table and per-task cells", Box::new(|| {
            report_structure(&data, &records, &tmp.path().join("report"))
        })),
        ("response parser handles the noisy fixtures", Box::new(parse_fixtures)),
        ("any train-pair count works and renders in both layouts", Box::new(|| train_pairs_and_render(tmp.path()))),
        ("mock model latency is recorded", Box::new(|| mock_latency(tmp.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        match check() {
            Ok(detail) => println!("[PASS] {}. {name} ({detail}) [{:.1}s]", i + 1, started.elapsed().as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
