use rand::Rng as _;

use super::place::{between, blob, pick, Placer};
use crate::colors::OBJECT_COLORS;
use crate::grid::{Axis, MAX_SIDE};
use crate::seed::Rng;
use crate::shapes::{dims, random_polyomino};
use crate::taxonomy::{Direction, RotationPivot};

const SIDE: i32 = MAX_SIDE as i32;

/// Canvas extent along one axis: the object, the travel, and some slack.
fn extent(rng: &mut Rng, object: i32, travel: i32) -> i32 {
    if travel == 0 {
        between(rng, object.max(4), 10)
    } else {
        object + travel + between(rng, 0, (SIDE - object - travel).min(4))
    }
}

/// Range of top-left offsets along one axis that keep source and destination
/// on the canvas.
fn start(rng: &mut Rng, len: i32, object: i32, step: i32, travel: i32) -> i32 {
    match step {
        s if s < 0 => between(rng, travel, len - object),
        s if s > 0 => between(rng, 0, len - object - travel),
        _ => between(rng, 0, len - object),
    }
}

pub(super) fn movement(rng: &mut Rng, direction: Direction, distance: u8) -> Option<Placer> {
    let d = i32::from(distance);
    let (dr, dc) = direction.step();
    let max_h = if dr != 0 { (SIDE - d).min(3) } else { 3 };
    let max_w = if dc != 0 { (SIDE - d).min(3) } else { 3 };
    let n = between(rng, 1, (max_h * max_w).min(5)) as usize;
    let shape = random_polyomino(rng, n, max_h, max_w);
    let (h, w) = dims(&shape);
    let rows = extent(rng, h, d * dr.abs());
    let cols = extent(rng, w, d * dc.abs());
    let mut p = Placer::new(rows as usize, cols as usize);
    let at = (start(rng, rows, h, dr, d), start(rng, cols, w, dc, d));
    p.put(&shape, at, pick(rng, &OBJECT_COLORS));
    Some(p)
}

pub(super) fn rotation(rng: &mut Rng, pivot: RotationPivot) -> Option<Placer> {
    match pivot {
        RotationPivot::Grid => {
            let mut p = Placer::new(between(rng, 3, 8) as usize, between(rng, 3, 8) as usize);
            for _ in 0..between(rng, 3, 8) {
                let at = (rng.random_range(0..p.rows()), rng.random_range(0..p.cols()));
                p.set(at, pick(rng, &OBJECT_COLORS));
            }
            Some(p)
        }
        RotationPivot::Endpoint | RotationPivot::Center => {
            let shape = blob(rng, 3, 6, 3, 3);
            let (h, w) = dims(&shape);
            if pivot == RotationPivot::Center && (h - w) % 2 != 0 {
                return None;
            }
            let mut p = Placer::new(between(rng, 7, 12) as usize, between(rng, 7, 12) as usize);
            let color = pick(rng, &OBJECT_COLORS);
            p.place(rng, &shape, color)?;
            Some(p)
        }
    }
}

pub(super) fn symmetry(rng: &mut Rng, axis: Axis, count: u8) -> Option<Placer> {
    let n = i32::from(count);
    let (rows, cols) = match axis {
        Axis::Vertical => (between(rng, 5 + n / 2, 9 + n), between(rng, 7, 13)),
        Axis::Horizontal => (between(rng, 7, 13), between(rng, 5 + n / 2, 9 + n)),
        Axis::MainDiagonal => {
            let s = between(rng, 7 + n / 2, 11 + n);
            (s, s)
        }
    };
    let mut p = Placer::new(rows as usize, cols as usize);
    for _ in 0..n {
        let shape = blob(rng, 1, 3, 2, 2);
        let color = pick(rng, &OBJECT_COLORS);
        p.place_where(rng, &shape, color, |(r, c)| match axis {
            Axis::Vertical => 2 * c + 1 < cols,
            Axis::Horizontal => 2 * r + 1 < rows,
            Axis::MainDiagonal => r > c,
        })?;
    }
    Some(p)
}
