//! Fixed ten-shape library and random polyomino sampling.

use rand::seq::IndexedRandom;
use rand::Rng as _;

use crate::grid::Coord;
use crate::seed::Rng;

/// Library shapes in a fixed orientation, normalized to a (0, 0) origin and
/// sorted row-major. Index 1 is the simplest, 10 the most complex; every
/// shape is 4-connected.
const LIBRARY: [&[Coord]; 10] = [
    // 1: dot
    &[(0, 0)],
    // 2: domino
    &[(0, 0), (0, 1)],
    // 3: bar of three
    &[(0, 0), (0, 1), (0, 2)],
    // 4: L triomino
    &[(0, 0), (1, 0), (1, 1)],
    // 5: 2x2 square
    &[(0, 0), (0, 1), (1, 0), (1, 1)],
    // 6: T tetromino
    &[(0, 0), (0, 1), (0, 2), (1, 1)],
    // 7: S tetromino
    &[(0, 1), (0, 2), (1, 0), (1, 1)],
    // 8: plus
    &[(0, 1), (1, 0), (1, 1), (1, 2), (2, 1)],
    // 9: U pentomino
    &[(0, 0), (0, 2), (1, 0), (1, 1), (1, 2)],
    // 10: 3x3 ring
    &[(0, 0), (0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1), (2, 2)],
];

pub const LIBRARY_SIZE: u8 = LIBRARY.len() as u8;

/// Shape by 1-based library index.
pub fn library_shape(index: u8) -> Option<&'static [Coord]> {
    LIBRARY.get(usize::from(index).checked_sub(1)?).copied()
}

/// Library index of a normalized footprint, if it is a library shape.
pub fn library_index(normalized: &[Coord]) -> Option<u8> {
    LIBRARY.iter().position(|s| *s == normalized).map(|i| i as u8 + 1)
}

/// (height, width) of a footprint.
pub fn dims(cells: &[Coord]) -> (i32, i32) {
    let h = cells.iter().map(|c| c.0).max().unwrap_or(-1) + 1;
    let w = cells.iter().map(|c| c.1).max().unwrap_or(-1) + 1;
    (h, w)
}

/// Shifts a footprint so its bounding box starts at (0, 0) and sorts it.
pub fn normalize(cells: &[Coord]) -> Vec<Coord> {
    let r0 = cells.iter().map(|c| c.0).min().unwrap_or(0);
    let c0 = cells.iter().map(|c| c.1).min().unwrap_or(0);
    let mut v: Vec<Coord> = cells.iter().map(|&(r, c)| (r - r0, c - c0)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Random 4-connected polyomino with exactly `size` cells fitting inside
/// `max_h x max_w`. Caller guarantees `size <= max_h * max_w`.
pub fn random_polyomino(rng: &mut Rng, size: usize, max_h: i32, max_w: i32) -> Vec<Coord> {
    debug_assert!(size >= 1 && size as i32 <= max_h * max_w);
    let start = (rng.random_range(0..max_h), rng.random_range(0..max_w));
    let mut cells = vec![start];
    while cells.len() < size {
        let frontier: Vec<Coord> = cells
            .iter()
            .flat_map(|&(r, c)| [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)])
            .filter(|&(r, c)| r >= 0 && c >= 0 && r < max_h && c < max_w && !cells.contains(&(r, c)))
            .collect();
        let &next = frontier.choose(rng).expect("box has room for the requested size");
        cells.push(next);
    }
    normalize(&cells)
}

/// Whether a footprint is 4-connected.
pub fn is_connected(cells: &[Coord]) -> bool {
    let Some(&first) = cells.first() else {
        return false;
    };
    let mut seen = vec![first];
    let mut stack = vec![first];
    while let Some((r, c)) = stack.pop() {
        for n in [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)] {
            if cells.contains(&n) && !seen.contains(&n) {
                seen.push(n);
                stack.push(n);
            }
        }
    }
    seen.len() == cells.len()
}
