use rand::Rng as _;

use crate::grid::{Coord, Grid};
use crate::seed::Rng;

const TRIES: usize = 40;

/// Scratch canvas that places footprints with a one-cell clearance ring so
/// placed objects never touch, not even diagonally.
#[derive(Debug, Clone)]
pub(crate) struct Placer {
    rows: i32,
    cols: i32,
    cells: Vec<u8>,
}

impl Placer {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows: rows as i32,
            cols: cols as i32,
            cells: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> i32 {
        self.rows
    }

    pub fn cols(&self) -> i32 {
        self.cols
    }

    pub fn inside(&self, (r, c): Coord) -> bool {
        r >= 0 && c >= 0 && r < self.rows && c < self.cols
    }

    pub fn get(&self, p: Coord) -> u8 {
        if self.inside(p) {
            self.cells[(p.0 * self.cols + p.1) as usize]
        } else {
            0
        }
    }

    pub fn set(&mut self, p: Coord, color: u8) {
        if self.inside(p) {
            self.cells[(p.0 * self.cols + p.1) as usize] = color;
        }
    }

    /// Whether `p` is on the canvas with no painted cell in its 3x3 block.
    pub fn clear_around(&self, (r, c): Coord) -> bool {
        self.inside((r, c)) && (-1..=1).all(|dr| (-1..=1).all(|dc| self.get((r + dr, c + dc)) == 0))
    }

    pub fn fits(&self, shape: &[Coord], (r0, c0): Coord) -> bool {
        shape.iter().all(|&(r, c)| self.clear_around((r0 + r, c0 + c)))
    }

    pub fn put(&mut self, shape: &[Coord], (r0, c0): Coord, color: u8) {
        for &(r, c) in shape {
            self.set((r0 + r, c0 + c), color);
        }
    }

    /// Puts `shape` at a random offset whose every cell satisfies `allowed`
    /// and keeps clear of earlier placements.
    pub fn place_where(
        &mut self,
        rng: &mut Rng,
        shape: &[Coord],
        color: u8,
        allowed: impl Fn(Coord) -> bool,
    ) -> Option<Coord> {
        let h = shape.iter().map(|p| p.0).max()? + 1;
        let w = shape.iter().map(|p| p.1).max()? + 1;
        if h > self.rows || w > self.cols {
            return None;
        }
        for _ in 0..TRIES {
            let at = (rng.random_range(0..=self.rows - h), rng.random_range(0..=self.cols - w));
            if self.fits(shape, at) && shape.iter().all(|&(r, c)| allowed((at.0 + r, at.1 + c))) {
                self.put(shape, at, color);
                return Some(at);
            }
        }
        None
    }

    pub fn place(&mut self, rng: &mut Rng, shape: &[Coord], color: u8) -> Option<Coord> {
        self.place_where(rng, shape, color, |_| true)
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.rows as usize, self.cols as usize, self.cells.clone()).expect("placer dimensions are valid")
    }
}

/// Uniform pick from an inclusive range.
pub(crate) fn between(rng: &mut Rng, lo: i32, hi: i32) -> i32 {
    rng.random_range(lo..=hi.max(lo))
}

/// A random color from `palette`.
pub(crate) fn pick(rng: &mut Rng, palette: &[u8]) -> u8 {
    palette[rng.random_range(0..palette.len())]
}

/// A random color other than `avoid`.
pub(crate) fn pick_except(rng: &mut Rng, palette: &[u8], avoid: &[u8]) -> u8 {
    let allowed: Vec<u8> = palette.iter().copied().filter(|c| !avoid.contains(c)).collect();
    pick(rng, &allowed)
}

/// Random polyomino with between `lo` and `hi` cells inside `max_h x max_w`.
pub(crate) fn blob(rng: &mut Rng, lo: i32, hi: i32, max_h: i32, max_w: i32) -> Vec<Coord> {
    let n = between(rng, lo, hi.min(max_h * max_w));
    crate::shapes::random_polyomino(rng, n as usize, max_h, max_w)
}
