//! Every (task, value) must yield a valid episode across many seeds.

use dynagrid::generate::generate_episode;
use dynagrid::grid::MAX_SIDE;
use dynagrid::seed::derive_seed;
use dynagrid::solve::{solve, SolverParams};
use dynagrid::taxonomy::catalog;
use rayon::prelude::*;

const SEEDS: u64 = 40;

#[test]
fn all_tasks_all_values_many_seeds() {
    let cells: Vec<_> = catalog()
        .iter()
        .flat_map(|t| t.variable.values().into_iter().map(move |v| (t, v)))
        .flat_map(|(t, v)| (0..SEEDS).map(move |s| (t, v, s)))
        .collect();
    let failures: Vec<String> = cells
        .par_iter()
        .filter_map(|&(t, v, s)| {
            let seed = derive_seed(1234, &t.task_id, v, s);
            let check = || -> Result<(), String> {
                let e = generate_episode(t, v, seed, 3).map_err(|e| e.to_string())?;
                let params = SolverParams::for_task(t, v).map_err(|e| e.to_string())?;
                let mut inputs = Vec::new();
                for p in e.train.iter().chain(std::iter::once(&dynagrid::generate::Pair {
                    input: e.test_input.clone(),
                    output: e.test_output.clone(),
                })) {
                    if solve(t, &params, &p.input).map_err(|e| e.to_string())? != p.output {
                        return Err("solver disagrees with stored output".into());
                    }
                    if p.input.rows() > MAX_SIDE || p.input.cols() > MAX_SIDE {
                        return Err("input too large".into());
                    }
                    inputs.push(p.input.clone());
                }
                inputs.sort_by_key(|g| g.cells().to_vec());
                inputs.dedup();
                if inputs.len() != 4 {
                    return Err("duplicate inputs within an episode".into());
                }
                Ok(())
            };
            check().err().map(|e| format!("{} v{} seed#{s}: {e}", t.task_id, v))
        })
        .collect();
    assert!(failures.is_empty(), "{} failures:\n{}", failures.len(), failures.join("\n"));
}
