use rand::Rng as _;

use super::place::{between, pick, pick_except, Placer};
use crate::colors::{self, OBJECT_COLORS};
use crate::grid::{Coord, MAX_SIDE};
use crate::seed::Rng;
use crate::taxonomy::{ExpansionLayout, GravityLayout};

const SIDE: i32 = MAX_SIDE as i32;

/// Blocks of one tower, bottom first, as (height, width, col offset).
fn tower(rng: &mut Rng, blocks: i32, max_width: i32) -> Vec<(i32, i32, i32)> {
    let mut out: Vec<(i32, i32, i32)> = Vec::new();
    for _ in 0..blocks {
        let w = between(rng, 1, max_width);
        let off = match out.last() {
            // Overlap the block below by at least one column.
            Some(&(_, bw, bo)) => between(rng, (bo - w + 1).max(0), (bo + bw - 1).min(max_width - w)),
            None => between(rng, 0, max_width - w),
        };
        out.push((between(rng, 1, 2), w, off));
    }
    out
}

/// Stacks `blocks` floating above the floor, each separated from the one
/// below by a gap, so each application lands one more block.
fn drop_tower(rng: &mut Rng, p: &mut Placer, blocks: &[(i32, i32, i32)], left: i32) -> Option<()> {
    let mut bottom = p.rows() - 1 - between(rng, 1, 2);
    let mut below = 0;
    for &(h, w, off) in blocks {
        let top = bottom - h + 1;
        if top < 0 {
            return None;
        }
        let color = pick_except(rng, &OBJECT_COLORS, &[below]);
        for r in top..=bottom {
            for c in left + off..left + off + w {
                p.set((r, c), color);
            }
        }
        below = color;
        bottom = top - 1 - between(rng, 1, 2);
    }
    Some(())
}

fn tower_rows(rng: &mut Rng, k: i32) -> i32 {
    (4 * k + 2 + between(rng, 0, 3)).min(SIDE)
}

pub(super) fn gravity(rng: &mut Rng, layout: GravityLayout, k: u8) -> Option<Placer> {
    let k = i32::from(k);
    match layout {
        GravityLayout::Stack => {
            let width = between(rng, 2, 4);
            let cols = width + between(rng, 0, 4);
            let mut p = Placer::new(tower_rows(rng, k) as usize, cols as usize);
            let blocks = tower(rng, k, width);
            let left = between(rng, 0, cols - width);
            drop_tower(rng, &mut p, &blocks, left)?;
            Some(p)
        }
        GravityLayout::StackWithDebris => {
            let width = between(rng, 2, 3);
            let debris = between(rng, 1, 3);
            let cols = width + 2 * debris + 1 + between(rng, 0, 2);
            let rows = tower_rows(rng, k);
            let mut p = Placer::new(rows as usize, cols as usize);
            let blocks = tower(rng, k, width);
            drop_tower(rng, &mut p, &blocks, 0)?;
            // Grounded debris to the right of the tower.
            for i in 0..debris {
                let c = width + 1 + 2 * i;
                let color = pick(rng, &OBJECT_COLORS);
                for r in 0..between(rng, 1, 2) {
                    p.set((rows - 1 - r, c), color);
                }
            }
            Some(p)
        }
        GravityLayout::Towers => {
            let towers = between(rng, 2, 3);
            let widths: Vec<i32> = (0..towers).map(|_| between(rng, 1, 3)).collect();
            let cols = widths.iter().sum::<i32>() + towers - 1 + between(rng, 0, 2);
            let mut p = Placer::new(tower_rows(rng, k) as usize, cols as usize);
            let tallest = rng.random_range(0..towers);
            let mut left = 0;
            for (i, &w) in widths.iter().enumerate() {
                let n = if i as i32 == tallest { k } else { between(rng, 1, k) };
                let blocks = tower(rng, n, w);
                drop_tower(rng, &mut p, &blocks, left)?;
                left += w + 1;
            }
            Some(p)
        }
    }
}

pub(super) fn reflection(rng: &mut Rng) -> Option<Placer> {
    let mut p = Placer::new(between(rng, 4, 12) as usize, between(rng, 4, 12) as usize);
    let at = (rng.random_range(0..p.rows()), rng.random_range(0..p.cols()));
    p.set(at, colors::EMITTER);
    Some(p)
}

pub(super) fn expansion(rng: &mut Rng, layout: ExpansionLayout, k: u8) -> Option<Placer> {
    let k = i32::from(k);
    let side = |rng: &mut Rng| between(rng, (k + 3).min(SIDE), (2 * k + 6).min(SIDE)) as usize;
    let mut p = Placer::new(side(rng), side(rng));
    let sources = if layout == ExpansionLayout::Multi { between(rng, 2, 3) } else { 1 };
    for _ in 0..sources {
        p.place(rng, &[(0, 0)], colors::HEAT)?;
    }
    if layout == ExpansionLayout::Walls {
        for _ in 0..between(rng, 2, 4) {
            let len = between(rng, 2, 5);
            let seg: Vec<Coord> = if rng.random_bool(0.5) {
                (0..len).map(|i| (0, i)).collect()
            } else {
                (0..len).map(|i| (i, 0)).collect()
            };
            p.place(rng, &seg, colors::WALL)?;
        }
    }
    Some(p)
}
