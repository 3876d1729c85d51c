//! Per-task input constraints: grid bounds, color assignment, structure and
//! placement predicates. Every predicate is a decidable check on one grid.

use std::fmt;

use thiserror::Error;

use crate::colors;
use crate::grid::{connected_components, Axis, BoundingBox, Connectivity, Coord, Grid, GridObject, MAX_SIDE};
use crate::shapes::{library_index, library_shape};
use crate::solve::{path_search, settle_depth, solve_expansion, trace_ray, CategoryRules, SolverParams};
use crate::taxonomy::{CountMode, RotationPivot, ShapeMode, SizeMode, SortKey, TaskKind, TaskSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{constraint}: {detail}")]
pub struct ConstraintViolation {
    pub constraint: String,
    pub detail: String,
}

type Check = Box<dyn Fn(&Grid) -> Result<(), String> + Send + Sync>;

pub struct Predicate {
    pub name: &'static str,
    check: Check,
}

impl Predicate {
    pub fn new(name: &'static str, check: impl Fn(&Grid) -> Result<(), String> + Send + Sync + 'static) -> Self {
        Self {
            name,
            check: Box::new(check),
        }
    }

    pub fn check(&self, grid: &Grid) -> Result<(), ConstraintViolation> {
        (self.check)(grid).map_err(|detail| ConstraintViolation {
            constraint: self.name.to_string(),
            detail,
        })
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridBounds {
    pub min_side: usize,
    pub max_side: usize,
    pub square: bool,
}

impl Default for GridBounds {
    fn default() -> Self {
        Self {
            min_side: 1,
            max_side: MAX_SIDE,
            square: false,
        }
    }
}

#[derive(Debug)]
pub struct ConstraintSet {
    pub bounds: GridBounds,
    /// Colors allowed on non-background cells.
    pub palette: Vec<u8>,
    pub structure: Vec<Predicate>,
    pub placement: Vec<Predicate>,
}

impl ConstraintSet {
    fn new(palette: &[u8]) -> Self {
        Self {
            bounds: GridBounds::default(),
            palette: palette.to_vec(),
            structure: Vec::new(),
            placement: Vec::new(),
        }
    }

    fn structure(mut self, name: &'static str, f: impl Fn(&Grid) -> Result<(), String> + Send + Sync + 'static) -> Self {
        self.structure.push(Predicate::new(name, f));
        self
    }

    fn placement(mut self, name: &'static str, f: impl Fn(&Grid) -> Result<(), String> + Send + Sync + 'static) -> Self {
        self.placement.push(Predicate::new(name, f));
        self
    }

    pub fn validate(&self, grid: &Grid) -> Result<(), ConstraintViolation> {
        let b = self.bounds;
        let violation = |constraint: &str, detail: String| ConstraintViolation {
            constraint: constraint.to_string(),
            detail,
        };
        for side in [grid.rows(), grid.cols()] {
            if side < b.min_side || side > b.max_side {
                return Err(violation(
                    "grid boundary",
                    format!("{}x{} outside {}..={}", grid.rows(), grid.cols(), b.min_side, b.max_side),
                ));
            }
        }
        if b.square && grid.rows() != grid.cols() {
            return Err(violation("grid boundary", format!("{}x{} is not square", grid.rows(), grid.cols())));
        }
        if let Some(((r, c), v)) = grid.nonzero().find(|(_, v)| !self.palette.contains(v)) {
            return Err(violation("color assignment", format!("color {v} at ({r}, {c}) not allowed")));
        }
        for p in self.structure.iter().chain(&self.placement) {
            p.check(grid)?;
        }
        Ok(())
    }
}

fn objects(grid: &Grid) -> Vec<GridObject> {
    connected_components(grid, Connectivity::FourNeighbor, true)
}

fn expect_count(what: &str, actual: usize, expected: usize) -> Result<(), String> {
    if actual == expected {
        Ok(())
    } else {
        Err(format!("{actual} {what}, expected {expected}"))
    }
}

/// Objects are 4-connected single-color blobs that do not touch one another,
/// not even diagonally.
fn separated(grid: &Grid) -> Result<(), String> {
    let loose = connected_components(grid, Connectivity::EightNeighbor, false).len();
    let tight = objects(grid).len();
    if loose == tight {
        Ok(())
    } else {
        Err("objects touch or are not 4-connected".into())
    }
}

fn single_object(grid: &Grid) -> Result<GridObject, String> {
    let mut objs = objects(grid);
    expect_count("objects", objs.len(), 1)?;
    Ok(objs.remove(0))
}

fn in_bounds(grid: &Grid, cells: impl IntoIterator<Item = Coord>) -> Result<(), String> {
    match cells.into_iter().find(|&p| !grid.contains(p)) {
        Some((r, c)) => Err(format!("cell would land at ({r}, {c})")),
        None => Ok(()),
    }
}

fn ring(p: Coord) -> impl Iterator<Item = Coord> {
    Connectivity::EightNeighbor.offsets().iter().map(move |&(dr, dc)| (p.0 + dr, p.1 + dc))
}

pub fn constraint_set(task: &TaskSpec, params: &SolverParams) -> ConstraintSet {
    let all = colors::OBJECT_COLORS;
    match (task.kind, params) {
        (TaskKind::Size(mode), &SolverParams::Size { side, .. }) => {
            let side = usize::from(side);
            let mut set = ConstraintSet::new(&all);
            set.bounds = GridBounds {
                min_side: side,
                max_side: side,
                square: true,
            };
            match mode {
                SizeMode::Crop => set.structure("one object", |g| single_object(g).map(|_| ())),
                SizeMode::Frame => {
                    set.palette.retain(|&c| c != colors::FRAME);
                    set.structure("objects present", |g| {
                        if g.count_nonzero() > 0 { Ok(()) } else { Err("blank grid".into()) }
                    })
                    .placement("border clear", |g| {
                        let (rows, cols) = (g.rows() as i32, g.cols() as i32);
                        match g.nonzero().find(|&((r, c), _)| r == 0 || c == 0 || r == rows - 1 || c == cols - 1) {
                            Some(((r, c), _)) => Err(format!("cell on border at ({r}, {c})")),
                            None => Ok(()),
                        }
                    })
                }
                SizeMode::Diagonal => set
                    .structure("one seed cell", |g| expect_count("cells", g.count_nonzero(), 1))
                    .placement("seed has room", |g| {
                        let ((r, c), _) = g.nonzero().next().ok_or("no seed")?;
                        if r as usize + 1 < g.rows() && c as usize + 1 < g.cols() {
                            Ok(())
                        } else {
                            Err("seed on last row or column".into())
                        }
                    }),
            }
        }
        (TaskKind::Count(mode), &SolverParams::Count { target_count, .. }) => {
            let n = usize::from(target_count);
            let set = ConstraintSet::new(&all).placement("separated objects", separated);
            match mode {
                CountMode::Objects => set
                    .structure("object count", move |g| expect_count("objects", objects(g).len(), n))
                    .structure("single color", |g| {
                        let mut colors = g.nonzero().map(|(_, v)| v);
                        let first = colors.next();
                        if colors.all(|v| Some(v) == first) { Ok(()) } else { Err("several colors".into()) }
                    }),
                CountMode::TargetColor => set
                    .structure("target count", move |g| {
                        let hits = objects(g).iter().filter(|o| o.color == colors::COUNT_TARGET).count();
                        expect_count("target objects", hits, n)
                    })
                    .structure("distractors present", |g| {
                        if objects(g).iter().any(|o| o.color != colors::COUNT_TARGET) {
                            Ok(())
                        } else {
                            Err("no distractor".into())
                        }
                    }),
                CountMode::ColorSequence => {
                    set.structure("object count", move |g| expect_count("objects", objects(g).len(), n))
                }
            }
        }
        (TaskKind::Shape(mode), &SolverParams::Shape { shape_index, .. }) => {
            let shape: Vec<Coord> = library_shape(shape_index).unwrap_or(&[]).to_vec();
            match mode {
                ShapeMode::Stamp => ConstraintSet::new(&all)
                    .structure("single-cell markers", |g| {
                        let objs = connected_components(g, Connectivity::EightNeighbor, false);
                        if objs.is_empty() || objs.len() > 3 {
                            return Err(format!("{} markers, expected 1..=3", objs.len()));
                        }
                        match objs.iter().find(|o| o.len() != 1) {
                            Some(_) => Err("marker is not a single cell".into()),
                            None => Ok(()),
                        }
                    })
                    .placement("stamps fit apart", move |g| {
                        let anchor = shape[0];
                        let stamps: Vec<Vec<Coord>> = g
                            .nonzero()
                            .map(|((r, c), _)| shape.iter().map(|&(sr, sc)| (r + sr - anchor.0, c + sc - anchor.1)).collect())
                            .collect();
                        for (i, s) in stamps.iter().enumerate() {
                            in_bounds(g, s.iter().copied())?;
                            for other in &stamps[i + 1..] {
                                if s.iter().any(|&p| ring(p).chain([p]).any(|q| other.contains(&q))) {
                                    return Err("stamps touch".into());
                                }
                            }
                        }
                        Ok(())
                    }),
                ShapeMode::Crop => ConstraintSet::new(&all).structure("shape among noise", move |g| {
                    let cells: Vec<(Coord, u8)> = g.nonzero().filter(|&(_, v)| v != colors::NOISE).collect();
                    let obj = GridObject::from_cells(cells).ok_or("no shape")?;
                    if obj.cells.iter().any(|&(_, v)| v != obj.color) {
                        return Err("shape has several colors".into());
                    }
                    if obj.normalized_shape() == shape {
                        Ok(())
                    } else {
                        Err("non-noise cells do not form the library shape".into())
                    }
                }),
                ShapeMode::Match => ConstraintSet::new(&[colors::GRAY])
                    .placement("separated objects", separated)
                    .structure("library shapes", move |g| {
                        let objs = objects(g);
                        if objs.iter().any(|o| library_index(&o.normalized_shape()).is_none()) {
                            return Err("object outside the shape library".into());
                        }
                        if objs.iter().any(|o| o.normalized_shape() == shape) {
                            Ok(())
                        } else {
                            Err("target shape absent".into())
                        }
                    }),
            }
        }
        (TaskKind::Move(_), &SolverParams::Move { direction, distance }) => ConstraintSet::new(&all)
            .structure("one object", |g| single_object(g).map(|_| ()))
            .placement("fits after move", move |g| {
                let (dr, dc) = direction.step();
                let d = i32::from(distance);
                in_bounds(g, g.nonzero().map(|((r, c), _)| (r + dr * d, c + dc * d)))
            }),
        (TaskKind::Rotation(pivot), &SolverParams::Rotation { quarter_turns, .. }) => match pivot {
            RotationPivot::Grid => ConstraintSet::new(&all).structure("objects present", |g| {
                if g.count_nonzero() > 0 { Ok(()) } else { Err("blank grid".into()) }
            }),
            RotationPivot::Endpoint => ConstraintSet::new(&all)
                .structure("one object", |g| single_object(g).map(|_| ()))
                .placement("fits after rotation", move |g| {
                    let o = single_object(g)?;
                    let (pr, pc) = o.first_cell();
                    in_bounds(
                        g,
                        o.coords().map(|(r, c)| {
                            let (dr, dc) = crate::grid::rotate_offset((r - pr, c - pc), quarter_turns);
                            (pr + dr, pc + dc)
                        }),
                    )
                }),
            RotationPivot::Center => ConstraintSet::new(&all)
                .structure("one object", |g| single_object(g).map(|_| ()))
                .structure("bounding box parity", |g| {
                    let b = single_object(g)?.bbox;
                    if (b.height() + b.width()) % 2 == 0 {
                        Ok(())
                    } else {
                        Err("height and width differ by an odd amount".into())
                    }
                })
                .placement("fits after rotation", move |g| {
                    let o = single_object(g)?;
                    let b = o.bbox;
                    let (cr, cc) = (b.min_row + b.max_row, b.min_col + b.max_col);
                    in_bounds(
                        g,
                        o.coords().map(|(r, c)| {
                            let (dr, dc) = crate::grid::rotate_offset((2 * r - cr, 2 * c - cc), quarter_turns);
                            ((cr + dr) / 2, (cc + dc) / 2)
                        }),
                    )
                }),
        },
        (TaskKind::Symmetry(_), &SolverParams::Symmetry { axis, object_count }) => {
            let n = usize::from(object_count);
            let mut set = ConstraintSet::new(&all)
                .structure("object count", move |g| expect_count("objects", objects(g).len(), n))
                .placement("separated objects", separated)
                .placement("source half", move |g| {
                    let (rows, cols) = (g.rows() as i32, g.cols() as i32);
                    let outside = g.nonzero().find(|&((r, c), _)| match axis {
                        Axis::Vertical => 2 * c + 1 >= cols,
                        Axis::Horizontal => 2 * r + 1 >= rows,
                        Axis::MainDiagonal => r <= c,
                    });
                    match outside {
                        Some(((r, c), _)) => Err(format!("cell ({r}, {c}) not strictly on the source side")),
                        None => Ok(()),
                    }
                });
            set.bounds.square = axis == Axis::MainDiagonal;
            set
        }
        (TaskKind::Categorization(_), SolverParams::Categorization { rules }) => {
            let (known, present) = (rules.clone(), rules.clone());
            ConstraintSet::new(&all)
                .placement("separated objects", separated)
                .structure("known categories", move |g| {
                    objects(g)
                        .iter()
                        .try_for_each(|o| known.rule_for(o).map(|_| ()).map_err(|e| e.to_string()))
                })
                .structure("every category present", move |g| categories_present(g, &present))
        }
        (TaskKind::Sort(key, _), &SolverParams::Sort { object_count, .. }) => {
            let n = usize::from(object_count);
            ConstraintSet::new(&all)
                .placement("separated objects", separated)
                .structure("object count", move |g| expect_count("objects", objects(g).len(), n))
                .structure("distinct sort keys", move |g| {
                    let mut keys: Vec<i32> = objects(g)
                        .iter()
                        .map(|o| match key {
                            SortKey::Size => o.len() as i32,
                            SortKey::Position => o.bbox.min_row,
                        })
                        .collect();
                    keys.sort_unstable();
                    if keys.windows(2).any(|w| w[0] == w[1]) {
                        Err("two objects share a sort key".into())
                    } else {
                        Ok(())
                    }
                })
                .placement("layout fits", |g| {
                    let objs = objects(g);
                    let width: usize = objs.iter().map(|o| o.bbox.width() + 1).sum();
                    let tallest = objs.iter().map(|o| o.bbox.height()).max().unwrap_or(0);
                    if width <= g.cols() && tallest <= g.rows() {
                        Ok(())
                    } else {
                        Err("objects do not fit the sorted layout".into())
                    }
                })
        }
        (TaskKind::Planning(_), &SolverParams::Planning { steps }) => {
            ConstraintSet::new(&[colors::AGENT, colors::GOAL, colors::WALL]).structure("unique path", move |g| {
                let s = path_search(g).map_err(|e| e.to_string())?;
                if s.path_count != 1 {
                    return Err(format!("{} shortest paths", if s.path_count == 0 { "no" } else { "several" }));
                }
                expect_count("moves", s.distance.unwrap_or(0), usize::from(steps))
            })
        }
        (TaskKind::Gravity(_), &SolverParams::Gravity { applications }) => ConstraintSet::new(&all)
            .structure("settle depth", move |g| expect_count("applications to settle", settle_depth(g), usize::from(applications))),
        (TaskKind::Reflection(heading), &SolverParams::Reflection { bounces, .. }) => {
            ConstraintSet::new(&[colors::EMITTER, colors::WALL]).structure("ray trace", move |g| {
                let t = trace_ray(g, heading, bounces).map_err(|e| e.to_string())?;
                expect_count("reflections", usize::from(t.reflections), usize::from(bounces))?;
                if t.path.len() > 1 { Ok(()) } else { Err("ray never leaves the emitter".into()) }
            })
        }
        (TaskKind::Expansion(_), &SolverParams::Expansion { applications }) => {
            ConstraintSet::new(&[colors::HEAT, colors::WALL])
                .structure("heat source", |g| {
                    if g.nonzero().any(|(_, v)| v == colors::HEAT) { Ok(()) } else { Err("no heat source".into()) }
                })
                .structure("last ring grows", move |g| {
                    let before = solve_expansion(g, applications.saturating_sub(1));
                    if solve_expansion(&before, 1) != before {
                        Ok(())
                    } else {
                        Err(format!("expansion stops before {applications} applications"))
                    }
                })
        }
        // Mismatches are rejected by the solver before constraints are built.
        _ => ConstraintSet::new(&all).structure("parameters match task", |_| Err("parameter family mismatch".into())),
    }
}

fn categories_present(g: &Grid, rules: &CategoryRules) -> Result<(), String> {
    let keys: Vec<Option<u8>> = objects(g).iter().map(|o| rules.key_of(o)).collect();
    match rules.rules.iter().find(|r| !keys.contains(&Some(r.key))) {
        Some(r) => Err(format!("category {} missing", r.key)),
        None => Ok(()),
    }
}

/// Tight box of all non-background cells.
pub fn content_bbox(grid: &Grid) -> Option<BoundingBox> {
    BoundingBox::of(&grid.nonzero().map(|(p, _)| p).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::task;

    fn set_for(id: &str, value: i32) -> ConstraintSet {
        let t = task(id).unwrap();
        constraint_set(t, &SolverParams::for_task(t, value).unwrap())
    }

    fn g(rows: &[&[u8]]) -> Grid {
        Grid::from_rows(rows).unwrap()
    }

    #[test]
    fn move_fit_is_checked() {
        let set = set_for("move_right", 2);
        assert!(set.validate(&g(&[&[1, 0, 0]])).is_ok());
        let err = set.validate(&g(&[&[0, 1, 0]])).unwrap_err();
        assert_eq!(err.constraint, "fits after move");
    }

    #[test]
    fn count_requires_exact_separated_objects() {
        let set = set_for("count_objects", 2);
        assert!(set.validate(&g(&[&[1, 0, 1]])).is_ok());
        assert!(set.validate(&g(&[&[1, 0, 0]])).is_err());
        assert!(set.validate(&g(&[&[1, 0], &[0, 1]])).is_err());
    }

    #[test]
    fn size_bounds_are_exact() {
        let set = set_for("size_crop", 10);
        assert_eq!(set.validate(&Grid::blank(9, 9).unwrap()).unwrap_err().constraint, "grid boundary");
    }

    #[test]
    fn palette_is_enforced() {
        let set = set_for("planning_sparse", 1);
        let err = set.validate(&g(&[&[2, 3, 7]])).unwrap_err();
        assert_eq!(err.constraint, "color assignment");
        assert!(set.validate(&g(&[&[2, 3, 5]])).is_ok());
    }

    #[test]
    fn gravity_depth_must_match() {
        let set = set_for("gravity_stack", 2);
        assert!(set.validate(&g(&[&[1], &[0], &[2], &[0]])).is_ok());
        assert!(set.validate(&g(&[&[0], &[0], &[2], &[0]])).is_err());
    }

    #[test]
    fn symmetry_sources_stay_in_half() {
        let set = set_for("symmetry_vertical", 1);
        assert!(set.validate(&g(&[&[1, 0, 0]])).is_ok());
        assert!(set.validate(&g(&[&[0, 1, 0]])).is_err());
    }
}
