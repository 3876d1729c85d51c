use super::{malformed, SolveError};
use crate::colors;
use crate::grid::{connected_components, Connectivity, Coord, Grid, GridObject};
use crate::taxonomy::Heading;

/// One gravity application. Every object (4-connected, single color) drops
/// as a rigid body until it would hit the floor or a cell that was occupied
/// before the step. Objects resting on a falling object wait for the next
/// application.
pub fn gravity_step(input: &Grid) -> Grid {
    let objects = connected_components(input, Connectivity::FourNeighbor, true);
    let rows = input.rows() as i32;
    let owner = owner_map(input, &objects);
    let cols = input.cols();
    let mut moves = Vec::with_capacity(objects.len());
    for (id, o) in objects.iter().enumerate() {
        let fall = o
            .coords()
            .map(|(r, c)| {
                let mut d = 0;
                while r + d + 1 < rows {
                    let below = owner[(r + d + 1) as usize * cols + c as usize];
                    if below != usize::MAX && below != id {
                        break;
                    }
                    d += 1;
                }
                d
            })
            .min()
            .unwrap_or(0);
        moves.push(fall);
    }
    let mut out = Grid::blank(input.rows(), input.cols()).expect("same dimensions as a valid grid");
    out = out.edit(|canvas| {
        for (o, fall) in objects.iter().zip(moves) {
            for &((r, c), v) in &o.cells {
                canvas.set((r + fall, c), v);
            }
        }
    });
    out
}

fn owner_map(input: &Grid, objects: &[GridObject]) -> Vec<usize> {
    let mut owner = vec![usize::MAX; input.rows() * input.cols()];
    for (id, o) in objects.iter().enumerate() {
        for (r, c) in o.coords() {
            owner[r as usize * input.cols() + c as usize] = id;
        }
    }
    owner
}

pub fn solve_gravity(input: &Grid, applications: u8) -> Grid {
    let mut g = input.clone();
    for _ in 0..applications {
        let next = gravity_step(&g);
        if next == g {
            break;
        }
        g = next;
    }
    g
}

/// Applications needed before nothing moves any more.
pub fn settle_depth(input: &Grid) -> usize {
    let mut g = input.clone();
    let mut depth = 0;
    loop {
        let next = gravity_step(&g);
        if next == g {
            return depth;
        }
        g = next;
        depth += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayTrace {
    /// Cells visited from the emitter onward, in order.
    pub path: Vec<Coord>,
    pub reflections: u8,
}

fn blocked(input: &Grid, p: Coord) -> bool {
    !matches!(input.at(p), Some(v) if v != colors::WALL)
}

/// Marches a diagonal ray from the emitter one cell per step. At a wall the
/// ray reflects off the face it hit; a corner reverses it. The trace stops
/// at the wall hit after `bounces` reflections.
pub fn trace_ray(input: &Grid, heading: Heading, bounces: u8) -> Result<RayTrace, SolveError> {
    let mut emitters = input.nonzero().filter(|&(_, v)| v == colors::EMITTER);
    let start = match (emitters.next(), emitters.next()) {
        (Some((p, _)), None) => p,
        _ => return Err(malformed("expected exactly one emitter")),
    };
    let (mut dr, mut dc) = heading.step();
    let mut p = start;
    let mut path = vec![p];
    let mut reflections = 0u8;
    let cap = 4 * input.rows() * input.cols() * (usize::from(bounces) + 1);
    for _ in 0..cap {
        let next = (p.0 + dr, p.1 + dc);
        if !blocked(input, next) {
            p = next;
            path.push(p);
            continue;
        }
        if reflections == bounces {
            return Ok(RayTrace { path, reflections });
        }
        let vertical = blocked(input, (p.0 + dr, p.1));
        let horizontal = blocked(input, (p.0, p.1 + dc));
        match (vertical, horizontal) {
            (true, false) => dr = -dr,
            (false, true) => dc = -dc,
            _ => {
                dr = -dr;
                dc = -dc;
            }
        }
        reflections += 1;
        if blocked(input, (p.0 + dr, p.1 + dc)) {
            return Err(SolveError::DegenerateRay);
        }
    }
    Err(malformed("ray did not settle"))
}

/// Paints the traced ray; the emitter keeps its color.
pub fn solve_reflection(input: &Grid, heading: Heading, bounces: u8) -> Result<Grid, SolveError> {
    let trace = trace_ray(input, heading, bounces)?;
    Ok(input.edit(|canvas| {
        for &p in &trace.path[1..] {
            if canvas.get(p) == Some(0) {
                canvas.set(p, colors::RAY);
            }
        }
    }))
}

/// Heated cells grow by one 4-neighbor ring per application into background
/// only; every other color blocks.
pub fn solve_expansion(input: &Grid, applications: u8) -> Grid {
    let mut g = input.clone();
    for _ in 0..applications {
        let ring: Vec<Coord> = g
            .nonzero()
            .filter(|&(_, v)| v == colors::HEAT)
            .flat_map(|((r, c), _)| Connectivity::FourNeighbor.offsets().iter().map(move |(dr, dc)| (r + dr, c + dc)))
            .filter(|&p| g.at(p) == Some(0))
            .collect();
        if ring.is_empty() {
            break;
        }
        g = g.edit(|canvas| {
            for p in ring {
                canvas.set(p, colors::HEAT);
            }
        });
    }
    g
}
