use rand::Rng as _;

use super::place::{between, blob, pick, pick_except, Placer};
use crate::colors::{self, OBJECT_COLORS};
use crate::grid::Coord;
use crate::seed::Rng;
use crate::shapes::{library_shape, random_polyomino, LIBRARY_SIZE};
use crate::taxonomy::{CountMode, ShapeMode, SizeMode};

pub(super) fn size(rng: &mut Rng, mode: SizeMode, side: u8) -> Option<Placer> {
    let side = usize::from(side);
    let mut p = Placer::new(side, side);
    let s = side as i32;
    match mode {
        SizeMode::Crop => {
            let (h, w) = (between(rng, 2, 5), between(rng, 2, 5));
            let n = between(rng, 3, (h * w).min(10)) as usize;
            let shape = random_polyomino(rng, n, h, w);
            let color = pick(rng, &OBJECT_COLORS);
            p.place(rng, &shape, color)?;
        }
        SizeMode::Frame => {
            for _ in 0..between(rng, 1, 4) {
                let shape = blob(rng, 1, 4, 2, 3);
                let color = pick_except(rng, &OBJECT_COLORS, &[colors::FRAME]);
                p.place_where(rng, &shape, color, |(r, c)| r > 0 && c > 0 && r < s - 1 && c < s - 1)?;
            }
        }
        SizeMode::Diagonal => {
            let along = rng.random_range(0..s - 1);
            let at = if rng.random_bool(0.5) { (0, along) } else { (along, 0) };
            p.set(at, pick(rng, &OBJECT_COLORS));
        }
    }
    Some(p)
}

pub(super) fn count(rng: &mut Rng, mode: CountMode, n: u8) -> Option<Placer> {
    let n = i32::from(n);
    let distractors = if mode == CountMode::TargetColor { between(rng, 1, 3) } else { 0 };
    let total = n + distractors;
    let lo = 5 + total / 2;
    let mut p = Placer::new(between(rng, lo, lo + 6) as usize, between(rng, lo, lo + 6) as usize);
    let color = pick(rng, &OBJECT_COLORS);
    for i in 0..total {
        let c = match mode {
            CountMode::Objects => color,
            CountMode::TargetColor if i < n => colors::COUNT_TARGET,
            CountMode::TargetColor => pick_except(rng, &OBJECT_COLORS, &[colors::COUNT_TARGET]),
            CountMode::ColorSequence => pick(rng, &OBJECT_COLORS),
        };
        let shape = blob(rng, 1, 3, 2, 2);
        p.place(rng, &shape, c)?;
    }
    Some(p)
}

pub(super) fn shape(rng: &mut Rng, mode: ShapeMode, index: u8) -> Option<Placer> {
    let target = library_shape(index)?;
    match mode {
        ShapeMode::Stamp => {
            let mut p = Placer::new(between(rng, 8, 14) as usize, between(rng, 8, 14) as usize);
            let anchor = target[0];
            let mut markers = Vec::new();
            for _ in 0..between(rng, 1, 3) {
                let color = pick(rng, &OBJECT_COLORS);
                let at = p.place(rng, target, color)?;
                markers.push(((at.0 + anchor.0, at.1 + anchor.1), color));
            }
            let mut out = Placer::new(p.rows() as usize, p.cols() as usize);
            for (at, color) in markers {
                out.set(at, color);
            }
            Some(out)
        }
        ShapeMode::Crop => {
            let mut p = Placer::new(between(rng, 8, 14) as usize, between(rng, 8, 14) as usize);
            let color = pick_except(rng, &OBJECT_COLORS, &[colors::NOISE]);
            p.place(rng, target, color)?;
            let noise = (p.rows() * p.cols()) / between(rng, 5, 9);
            for _ in 0..noise {
                let q: Coord = (rng.random_range(0..p.rows()), rng.random_range(0..p.cols()));
                if p.get(q) == 0 {
                    p.set(q, colors::NOISE);
                }
            }
            Some(p)
        }
        ShapeMode::Match => {
            let mut p = Placer::new(between(rng, 10, 16) as usize, between(rng, 10, 16) as usize);
            let hits = between(rng, 1, 2);
            let others = between(rng, 1, 3);
            for i in 0..hits + others {
                let shape = if i < hits {
                    target
                } else {
                    let mut j = between(rng, 1, i32::from(LIBRARY_SIZE) - 1) as u8;
                    if j >= index {
                        j += 1;
                    }
                    library_shape(j)?
                };
                p.place(rng, shape, colors::GRAY)?;
            }
            Some(p)
        }
    }
}
