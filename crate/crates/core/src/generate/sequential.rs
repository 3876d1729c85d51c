use std::collections::VecDeque;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;

use super::place::{between, blob, pick, Placer};
use crate::colors::{self, OBJECT_COLORS};
use crate::grid::{Connectivity, Coord};
use crate::seed::Rng;
use crate::shapes::{dims, library_shape, random_polyomino};
use crate::solve::CategoryRules;
use crate::taxonomy::{CategoryAttribute, MazeStyle, SortKey};

pub(super) fn categorization(rng: &mut Rng, rules: &CategoryRules) -> Option<Placer> {
    let k = rules.rules.len() as i32;
    let total = k + between(rng, 0, 3);
    let lo = 7 + total / 2;
    let mut p = Placer::new(between(rng, lo, lo + 5) as usize, between(rng, lo, lo + 5) as usize);
    for i in 0..total {
        let rule = if i < k {
            rules.rules[i as usize]
        } else {
            *rules.rules.choose(rng)?
        };
        let (shape, color) = match rules.attribute {
            CategoryAttribute::Color => (blob(rng, 1, 4, 2, 2), rule.key),
            CategoryAttribute::Shape => (library_shape(rule.key)?.to_vec(), colors::GRAY),
            CategoryAttribute::CellCount => (random_polyomino(rng, usize::from(rule.key), 3, 3), colors::GRAY),
        };
        p.place(rng, &shape, color)?;
    }
    Some(p)
}

pub(super) fn sort(rng: &mut Rng, key: SortKey, count: u8) -> Option<Placer> {
    let n = i32::from(count);
    match key {
        SortKey::Size => {
            // Bottom-aligned bars of distinct heights in shuffled slots.
            let tallest = between(rng, n.max(2), n + 3);
            let mut heights: Vec<i32> = (1..=tallest).collect();
            heights.shuffle(rng);
            heights.truncate(n as usize);
            let rows = tallest + between(rng, 0, 3);
            let cols = 2 * n + 1 + between(rng, 0, 2);
            let mut p = Placer::new(rows as usize, cols as usize);
            for (i, h) in heights.into_iter().enumerate() {
                let color = pick(rng, &OBJECT_COLORS);
                for r in 0..h {
                    p.set((rows - 1 - r, 1 + 2 * i as i32), color);
                }
            }
            Some(p)
        }
        SortKey::Position => {
            // Small objects in column slots, each starting on its own row.
            let rows = between(rng, n + 2, n + 6);
            let mut tops: Vec<i32> = (0..rows - 1).collect();
            tops.shuffle(rng);
            let shapes: Vec<Vec<Coord>> = (0..n)
                .map(|_| blob(rng, 1, 3, 2, 2))
                .collect();
            let width: i32 = shapes.iter().map(|s| dims(s).1 + 1).sum();
            let cols = width + 1 + between(rng, 0, 3);
            let mut p = Placer::new(rows as usize, cols as usize);
            let mut x = between(rng, 0, 1);
            for (shape, top) in shapes.iter().zip(tops) {
                p.put(shape, (top, x), pick(rng, &OBJECT_COLORS));
                x += dims(shape).1 + 1;
            }
            Some(p)
        }
    }
}

/// Shortest-path distances and path counts (saturating at 2) from `from`
/// over cells that are background in `p`.
fn bfs(p: &Placer, from: Coord) -> (Vec<i32>, Vec<u8>) {
    let cols = p.cols();
    let idx = |(r, c): Coord| (r * cols + c) as usize;
    let mut dist = vec![-1; (p.rows() * cols) as usize];
    let mut count = vec![0u8; dist.len()];
    dist[idx(from)] = 0;
    count[idx(from)] = 1;
    let mut queue = VecDeque::from([from]);
    while let Some(q) = queue.pop_front() {
        for (dr, dc) in Connectivity::FourNeighbor.offsets() {
            let n = (q.0 + dr, q.1 + dc);
            if !p.inside(n) || p.get(n) != 0 {
                continue;
            }
            if dist[idx(n)] < 0 {
                dist[idx(n)] = dist[idx(q)] + 1;
                queue.push_back(n);
            }
            if dist[idx(n)] == dist[idx(q)] + 1 {
                count[idx(n)] = count[idx(n)].saturating_add(count[idx(q)]).min(2);
            }
        }
    }
    (dist, count)
}

fn carve_maze(rng: &mut Rng, p: &mut Placer) {
    for r in 0..p.rows() {
        for c in 0..p.cols() {
            p.set((r, c), colors::WALL);
        }
    }
    let start = (2 * rng.random_range(0..(p.rows() + 1) / 2), 2 * rng.random_range(0..(p.cols() + 1) / 2));
    p.set(start, 0);
    let mut stack = vec![start];
    while let Some(&(r, c)) = stack.last() {
        let options: Vec<Coord> = [(-2, 0), (2, 0), (0, -2), (0, 2)]
            .iter()
            .map(|&(dr, dc)| (r + dr, c + dc))
            .filter(|&n| p.inside(n) && p.get(n) == colors::WALL)
            .collect();
        match options.choose(rng) {
            Some(&n) => {
                p.set(((r + n.0) / 2, (c + n.1) / 2), 0);
                p.set(n, 0);
                stack.push(n);
            }
            None => {
                stack.pop();
            }
        }
    }
}

pub(super) fn planning(rng: &mut Rng, style: MazeStyle, steps: u8) -> Option<Placer> {
    let s = i32::from(steps);
    let mut p = match style {
        MazeStyle::Maze => {
            let mut p = Placer::new((2 * between(rng, 3, 6) + 1) as usize, (2 * between(rng, 3, 6) + 1) as usize);
            carve_maze(rng, &mut p);
            p
        }
        MazeStyle::Sparse | MazeStyle::Dense => {
            let density = if style == MazeStyle::Sparse { 0.12 } else { 0.32 };
            let lo = 5 + s / 2;
            let mut p = Placer::new(between(rng, lo, lo + 5) as usize, between(rng, lo, lo + 5) as usize);
            for r in 0..p.rows() {
                for c in 0..p.cols() {
                    if rng.random_bool(density) {
                        p.set((r, c), colors::WALL);
                    }
                }
            }
            p
        }
    };
    let open: Vec<Coord> = (0..p.rows())
        .flat_map(|r| (0..p.cols()).map(move |c| (r, c)))
        .filter(|&q| p.get(q) == 0)
        .collect();
    let &agent = open.choose(rng)?;
    let (dist, count) = bfs(&p, agent);
    let goals: Vec<Coord> = open
        .iter()
        .copied()
        .filter(|&(r, c)| {
            let i = (r * p.cols() + c) as usize;
            dist[i] == s && count[i] == 1
        })
        .collect();
    let &goal = goals.choose(rng)?;
    p.set(agent, colors::AGENT);
    p.set(goal, colors::GOAL);
    Some(p)
}
