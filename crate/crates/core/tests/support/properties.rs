//! Randomized property suites over the grid primitives and solvers. Each
//! suite runs a given number of cases and reports the first minimal failure.
//!
//! Shared between the core test target and the acceptance runner.

use std::collections::{HashSet, VecDeque};

use dynagrid::colors;
use dynagrid::generate::generate_input;
use dynagrid::grid::{connected_components, mirror, rotate, translate, Axis, Connectivity, Coord, Grid, GridObject, Pivot};
use dynagrid::solve::{gravity_step, path_search, settle_depth, solve_expansion, solve_gravity, solve_planning, solve_sort, trace_ray};
use dynagrid::taxonomy::{catalog, Family, Heading, SortDirection, SortKey, TaskKind, TaskSpec};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub type Suite = fn(u32) -> Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

/// Grids up to `max` per side with roughly `fill` non-background cells
/// drawn from `palette`.
fn grid_from(max: usize, palette: Vec<u8>, fill: f64) -> impl Strategy<Value = Grid> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| {
        let palette = palette.clone();
        proptest::collection::vec((proptest::bool::weighted(fill), 0..palette.len()), r * c).prop_map(move |cells| {
            let cells = cells.into_iter().map(|(on, i)| if on { palette[i] } else { 0 }).collect();
            Grid::new(r, c, cells).unwrap()
        })
    })
}

fn any_grid() -> impl Strategy<Value = Grid> {
    grid_from(12, (1..=9).collect(), 0.4)
}

fn tasks_of(pred: impl Fn(&TaskSpec) -> bool) -> Vec<&'static TaskSpec> {
    catalog().iter().filter(|t| pred(t)).collect()
}

/// (task, variable value, seed) for generated inputs of the selected tasks.
fn generated(pred: impl Fn(&TaskSpec) -> bool) -> impl Strategy<Value = (&'static TaskSpec, i32, u64)> {
    let tasks = tasks_of(pred);
    proptest::sample::select(tasks)
        .prop_flat_map(|t| (Just(t), proptest::sample::select(t.variable.values()), any::<u64>()))
}

pub fn rotation_four_quarter_turns(cases: u32) -> Result<(), String> {
    run(cases, (any_grid(), 0i32..12, 0i32..12), |(g, pr, pc)| {
        let mut r = g.clone();
        for _ in 0..4 {
            r = rotate(&r, 1, Pivot::GridCenter).unwrap();
        }
        prop_assert_eq!(&r, &g);
        let back = rotate(&rotate(&g, 1, Pivot::GridCenter).unwrap(), 3, Pivot::GridCenter).unwrap();
        prop_assert_eq!(&back, &g);
        // about a coordinate, when every quarter turn stays on the canvas
        let mut r = g.clone();
        for _ in 0..4 {
            match rotate(&r, 1, Pivot::Coordinate(pr, pc)) {
                Ok(next) => r = next,
                Err(_) => return Ok(()),
            }
        }
        prop_assert_eq!(&r, &g);
        Ok(())
    })
}

pub fn mirror_involution(cases: u32) -> Result<(), String> {
    run(cases, any_grid(), |g| {
        for axis in [Axis::Horizontal, Axis::Vertical] {
            let once = mirror(&g, axis).unwrap();
            prop_assert_eq!(&mirror(&once, axis).unwrap(), &g);
        }
        if g.rows() == g.cols() {
            let once = mirror(&g, Axis::MainDiagonal).unwrap();
            prop_assert_eq!(&mirror(&once, Axis::MainDiagonal).unwrap(), &g);
        } else {
            prop_assert!(mirror(&g, Axis::MainDiagonal).is_err());
        }
        Ok(())
    })
}

pub fn translate_inverse(cases: u32) -> Result<(), String> {
    run(cases, (any_grid(), -12i32..12, -12i32..12, any::<prop::sample::Index>()), |(g, dr, dc, pick)| {
        let objects = connected_components(&g, Connectivity::FourNeighbor, true);
        if objects.is_empty() {
            return Ok(());
        }
        let o = &objects[pick.index(objects.len())];
        // isolate the object so nothing is overwritten on the way
        let alone = dynagrid::grid::paint(&Grid::blank(g.rows(), g.cols()).unwrap(), o.cells.iter().copied()).unwrap();
        match translate(o, dr, dc, &alone) {
            Ok(moved) => {
                let shifted: GridObject = o.shifted(dr, dc);
                prop_assert_eq!(&translate(&shifted, -dr, -dc, &moved).unwrap(), &alone);
            }
            Err(_) => {
                let out = o.coords().any(|(r, c)| !alone.contains((r + dr, c + dc)));
                prop_assert!(out, "translate failed although the object fits");
            }
        }
        Ok(())
    })
}

fn column_multisets(g: &Grid) -> Vec<Vec<u8>> {
    (0..g.cols())
        .map(|c| {
            let mut col: Vec<u8> = (0..g.rows()).map(|r| g.get(r, c)).filter(|&v| v != 0).collect();
            col.sort_unstable();
            col
        })
        .collect()
}

pub fn gravity_fixpoint_and_columns(cases: u32) -> Result<(), String> {
    run(cases, (grid_from(10, vec![1, 2, 3], 0.35), 1u8..6), |(g, k)| {
        let depth = settle_depth(&g);
        let settled = solve_gravity(&g, depth as u8);
        prop_assert_eq!(&gravity_step(&settled), &settled);
        prop_assert_eq!(&solve_gravity(&settled, k), &settled);
        prop_assert_eq!(&solve_gravity(&g, depth as u8 + k), &settled);
        let after = solve_gravity(&g, k);
        prop_assert_eq!(column_multisets(&after), column_multisets(&g));
        prop_assert_eq!(column_multisets(&settled), column_multisets(&g));
        Ok(())
    })
}

pub fn expansion_monotone_and_blocked(cases: u32) -> Result<(), String> {
    run(cases, (grid_from(12, vec![colors::HEAT, colors::WALL, 7], 0.2), 0u8..8), |(g, k)| {
        let a = solve_expansion(&g, k);
        let b = solve_expansion(&g, k + 1);
        for r in 0..g.rows() {
            for c in 0..g.cols() {
                let orig = g.get(r, c);
                if orig != 0 {
                    prop_assert_eq!(a.get(r, c), orig, "obstacle or source changed at ({}, {})", r, c);
                    prop_assert_eq!(b.get(r, c), orig);
                }
                if a.get(r, c) == colors::HEAT {
                    prop_assert_eq!(b.get(r, c), colors::HEAT, "heat receded at ({}, {})", r, c);
                }
                prop_assert!(a.get(r, c) == orig || a.get(r, c) == colors::HEAT);
            }
        }
        Ok(())
    })
}

fn colors_multiset(g: &Grid) -> Vec<u8> {
    let mut v: Vec<u8> = g.cells().iter().copied().filter(|&v| v != 0).collect();
    v.sort_unstable();
    v
}

fn shapes_multiset(g: &Grid) -> Vec<(u8, Vec<Coord>)> {
    let mut v: Vec<(u8, Vec<Coord>)> = connected_components(g, Connectivity::FourNeighbor, true)
        .iter()
        .map(|o| (o.color, o.normalized_shape()))
        .collect();
    v.sort();
    v
}

pub fn sort_preserves_multiset(cases: u32) -> Result<(), String> {
    let gen = generated(|t| t.family == Family::Sort);
    let dirs = proptest::sample::select(vec![SortDirection::Ascending, SortDirection::Descending]);
    let keys = proptest::sample::select(vec![SortKey::Size, SortKey::Position]);
    run(cases, (gen, keys, dirs), |((task, value, seed), key, dir)| {
        let input = generate_input(task, value, seed).map_err(|e| TestCaseError::fail(e.to_string()))?;
        // any key and direction, not just the task's own
        let Ok(out) = solve_sort(&input, key, dir) else {
            return Ok(());
        };
        prop_assert_eq!(colors_multiset(&out), colors_multiset(&input));
        prop_assert_eq!(shapes_multiset(&out), shapes_multiset(&input));
        prop_assert_eq!((out.rows(), out.cols()), (input.rows(), input.cols()));
        Ok(())
    })
}

/// Plain breadth-first distance from agent to goal.
fn bfs_distance(g: &Grid) -> Option<usize> {
    let find = |v: u8| g.nonzero().find(|&(_, x)| x == v).map(|(p, _)| p);
    let (start, goal) = (find(colors::AGENT)?, find(colors::GOAL)?);
    let mut seen = HashSet::from([start]);
    let mut q = VecDeque::from([(start, 0)]);
    while let Some(((r, c), d)) = q.pop_front() {
        if (r, c) == goal {
            return Some(d);
        }
        for (dr, dc) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let n = (r + dr, c + dc);
            if matches!(g.at(n), Some(0) | Some(colors::GOAL)) && seen.insert(n) {
                q.push_back((n, d + 1));
            }
        }
    }
    None
}

pub fn planning_trail_matches_bfs(cases: u32) -> Result<(), String> {
    let random = grid_from(9, vec![colors::WALL], 0.25).prop_flat_map(|g| {
        let n = g.rows() * g.cols();
        (Just(g), 0..n, 0..n)
    });
    let gen = generated(|t| t.family == Family::Planning);
    run(cases, (gen, random), |((task, value, seed), (g, a, b))| {
        let generated_input = generate_input(task, value, seed).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let cols = g.cols();
        let mut candidates = vec![(generated_input, Some(value as u8))];
        if a != b {
            let placed = dynagrid::grid::paint(
                &g,
                [
                    (((a / cols) as i32, (a % cols) as i32), colors::AGENT),
                    (((b / cols) as i32, (b % cols) as i32), colors::GOAL),
                ],
            )
            .unwrap();
            candidates.push((placed, None));
        }
        for (input, steps) in candidates {
            let search = path_search(&input).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(search.distance, bfs_distance(&input));
            let Some(d) = search.distance else { continue };
            if let Some(s) = steps {
                prop_assert_eq!(d, usize::from(s));
            }
            match solve_planning(&input, d as u8) {
                Ok(out) => {
                    let trail = out.cells().iter().filter(|&&v| v == colors::TRAIL).count();
                    prop_assert_eq!(trail - input.cells().iter().filter(|&&v| v == colors::TRAIL).count(), d);
                    prop_assert_eq!(search.path_count, 1);
                }
                Err(_) => prop_assert!(search.path_count != 1 || d > u8::MAX as usize),
            }
        }
        Ok(())
    })
}

pub fn reflection_bounce_count(cases: u32) -> Result<(), String> {
    let gen = generated(|t| t.family == Family::Reflection);
    run(cases, gen, |(task, value, seed)| {
        let TaskKind::Reflection(heading) = task.kind else {
            unreachable!("reflection tasks only");
        };
        let input = generate_input(task, value, seed).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let trace = trace_ray(&input, heading, value as u8).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(trace.reflections, value as u8);
        prop_assert_eq!(count_turns(&trace.path, heading), usize::from(trace.reflections));
        Ok(())
    })
}

/// Direction changes along a diagonal path, counting a turn before the first
/// step when it does not follow the initial heading.
fn count_turns(path: &[Coord], heading: Heading) -> usize {
    let steps: Vec<Coord> = path.windows(2).map(|w| (w[1].0 - w[0].0, w[1].1 - w[0].1)).collect();
    let initial = usize::from(steps.first().is_some_and(|&s| s != heading.step()));
    initial + steps.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn components_partition(cases: u32) -> Result<(), String> {
    run(cases, any_grid(), |g| {
        for (conn, same) in [
            (Connectivity::FourNeighbor, true),
            (Connectivity::FourNeighbor, false),
            (Connectivity::EightNeighbor, true),
            (Connectivity::EightNeighbor, false),
        ] {
            let objects = connected_components(&g, conn, same);
            let mut seen = HashSet::new();
            for o in &objects {
                for &(p, v) in &o.cells {
                    prop_assert!(v != 0);
                    prop_assert_eq!(g.at(p), Some(v));
                    prop_assert!(seen.insert(p), "cell {:?} in two components", p);
                    if same {
                        prop_assert_eq!(v, o.color);
                    }
                }
            }
            prop_assert_eq!(seen.len(), g.count_nonzero());
            // maximality: no linkable neighbor sits in another component
            let mut owner = std::collections::HashMap::new();
            for (i, o) in objects.iter().enumerate() {
                for (p, _) in &o.cells {
                    owner.insert(*p, i);
                }
            }
            for (&(r, c), &i) in &owner {
                for &(dr, dc) in conn.offsets() {
                    let n = (r + dr, c + dc);
                    if let Some(&j) = owner.get(&n) {
                        let linked = !same || g.at(n) == g.at((r, c));
                        prop_assert!(!linked || i == j, "adjacent cells split across components");
                    }
                }
            }
        }
        Ok(())
    })
}

pub const SUITES: [(&str, Suite); 9] = [
    ("rotation four quarter turns", rotation_four_quarter_turns),
    ("mirror involution", mirror_involution),
    ("translate inverse", translate_inverse),
    ("gravity fixpoint and column multisets", gravity_fixpoint_and_columns),
    ("expansion monotone, obstacles kept", expansion_monotone_and_blocked),
    ("sort preserves multiset", sort_preserves_multiset),
    ("planning trail equals BFS length", planning_trail_matches_bfs),
    ("reflection bounce count exact", reflection_bounce_count),
    ("component partition", components_partition),
];
