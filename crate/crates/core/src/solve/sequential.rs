use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{malformed, SolveError};
use crate::colors;
use crate::grid::{connected_components, paint, Connectivity, Coord, Grid, GridObject};
use crate::shapes::library_index;
use crate::taxonomy::{CategoryAttribute, SortDirection, SortKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryRule {
    /// Color, library shape index or cell count, depending on the attribute.
    pub key: u8,
    /// New color for members; 0 erases them.
    pub recolor: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryRules {
    pub attribute: CategoryAttribute,
    pub rules: Vec<CategoryRule>,
}

impl CategoryRules {
    pub fn key_of(&self, object: &GridObject) -> Option<u8> {
        match self.attribute {
            CategoryAttribute::Color => Some(object.color),
            CategoryAttribute::Shape => library_index(&object.normalized_shape()),
            CategoryAttribute::CellCount => u8::try_from(object.len()).ok(),
        }
    }

    /// The single rule whose key matches the object.
    pub fn rule_for(&self, object: &GridObject) -> Result<CategoryRule, SolveError> {
        let key = self.key_of(object);
        let mut hits = self.rules.iter().filter(|r| Some(r.key) == key);
        match (hits.next(), hits.next()) {
            (Some(rule), None) => Ok(*rule),
            _ => Err(SolveError::AmbiguousCategory(key.unwrap_or(0))),
        }
    }
}

/// The first `count` categories of the task's fixed category table.
pub fn category_rules(attribute: CategoryAttribute, count: usize) -> CategoryRules {
    let table: [(u8, u8); 5] = match attribute {
        CategoryAttribute::Color => [(1, 8), (2, 7), (3, 9), (4, 5), (6, 0)],
        // domino, L, square, T, plus
        CategoryAttribute::Shape => [(2, 1), (4, 2), (5, 3), (6, 4), (8, 6)],
        CategoryAttribute::CellCount => [(1, 1), (2, 2), (3, 3), (4, 4), (5, 6)],
    };
    CategoryRules {
        attribute,
        rules: table
            .iter()
            .take(count)
            .map(|&(key, recolor)| CategoryRule { key, recolor })
            .collect(),
    }
}

pub fn solve_categorization(input: &Grid, rules: &CategoryRules) -> Result<Grid, SolveError> {
    let mut painted = Vec::new();
    for object in connected_components(input, Connectivity::FourNeighbor, true) {
        let rule = rules.rule_for(&object)?;
        painted.extend(object.coords().map(|p| (p, rule.recolor)));
    }
    Ok(paint(input, painted)?)
}

/// Lays objects out left to right from column 1 with one blank column
/// between them, each resting on the bottom row.
pub fn sort_layout(rows: usize, cols: usize, objects: &[GridObject]) -> Result<Grid, SolveError> {
    let bottom = rows as i32 - 1;
    let mut x = 1;
    let mut cells = Vec::new();
    for o in objects {
        let top = bottom - (o.bbox.height() as i32 - 1);
        for &((r, c), v) in &o.cells {
            cells.push(((top + r - o.bbox.min_row, x + c - o.bbox.min_col), v));
        }
        x += o.bbox.width() as i32 + 1;
    }
    if x - 1 > cols as i32 {
        return Err(malformed("sorted objects do not fit the canvas width"));
    }
    Ok(paint(&Grid::blank(rows, cols)?, cells)?)
}

pub fn solve_sort(input: &Grid, key: SortKey, direction: SortDirection) -> Result<Grid, SolveError> {
    let mut objects = connected_components(input, Connectivity::FourNeighbor, true);
    let key_of = |o: &GridObject| match key {
        SortKey::Size => o.len() as i32,
        SortKey::Position => o.bbox.min_row,
    };
    let mut keys: Vec<i32> = objects.iter().map(key_of).collect();
    keys.sort_unstable();
    if keys.windows(2).any(|w| w[0] == w[1]) {
        return Err(SolveError::TieBreak);
    }
    objects.sort_by_key(key_of);
    if direction == SortDirection::Descending {
        objects.reverse();
    }
    sort_layout(input.rows(), input.cols(), &objects)
}

/// Breadth-first search from the agent to the goal over background cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSearch {
    pub agent: Coord,
    pub goal: Coord,
    /// Shortest path length in moves, if reachable.
    pub distance: Option<usize>,
    /// Number of distinct shortest paths, saturating at 2.
    pub path_count: u8,
    /// The path from agent to goal inclusive, when it is unique.
    pub path: Option<Vec<Coord>>,
}

fn unique_cell(input: &Grid, color: u8, what: &str) -> Result<Coord, SolveError> {
    let mut it = input.nonzero().filter(|&(_, v)| v == color);
    match (it.next(), it.next()) {
        (Some((p, _)), None) => Ok(p),
        _ => Err(malformed(format!("expected exactly one {what} cell"))),
    }
}

pub fn path_search(input: &Grid) -> Result<PathSearch, SolveError> {
    let agent = unique_cell(input, colors::AGENT, "agent")?;
    let goal = unique_cell(input, colors::GOAL, "goal")?;
    let cols = input.cols();
    let idx = |(r, c): Coord| r as usize * cols + c as usize;
    let mut dist = vec![usize::MAX; input.rows() * cols];
    let mut count = vec![0u8; dist.len()];
    dist[idx(agent)] = 0;
    count[idx(agent)] = 1;
    let mut queue = VecDeque::from([agent]);
    while let Some(p) = queue.pop_front() {
        if p == goal {
            continue;
        }
        for (dr, dc) in Connectivity::FourNeighbor.offsets() {
            let n = (p.0 + dr, p.1 + dc);
            match input.at(n) {
                Some(0) => {}
                Some(_) if n == goal => {}
                _ => continue,
            }
            let (i, j) = (idx(p), idx(n));
            if dist[j] == usize::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(n);
            }
            if dist[j] == dist[i] + 1 {
                count[j] = count[j].saturating_add(count[i]).min(2);
            }
        }
    }
    let g = idx(goal);
    let distance = (dist[g] != usize::MAX).then_some(dist[g]);
    let path_count = count[g];
    let path = (path_count == 1).then(|| {
        let mut path = vec![goal];
        let mut p = goal;
        while p != agent {
            p = Connectivity::FourNeighbor
                .offsets()
                .iter()
                .map(|(dr, dc)| (p.0 + dr, p.1 + dc))
                .find(|&n| input.contains(n) && count[idx(n)] > 0 && dist[idx(n)] + 1 == dist[idx(p)])
                .expect("a unique path has a predecessor at every step");
            path.push(p);
        }
        path.reverse();
        path
    });
    Ok(PathSearch {
        agent,
        goal,
        distance,
        path_count,
        path,
    })
}

/// Paints the unique shortest path with the trail color and moves the agent
/// onto the goal.
pub fn solve_planning(input: &Grid, steps: u8) -> Result<Grid, SolveError> {
    let search = path_search(input)?;
    let path = search.path.ok_or(SolveError::NoUniquePath)?;
    if path.len() != usize::from(steps) + 1 {
        return Err(malformed(format!(
            "shortest path has {} moves, expected {steps}",
            path.len() - 1
        )));
    }
    let painted = path
        .iter()
        .map(|&p| (p, if p == search.goal { colors::AGENT } else { colors::TRAIL }));
    Ok(paint(input, painted)?)
}
