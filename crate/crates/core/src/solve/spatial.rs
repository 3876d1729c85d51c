use super::{malformed, SolveError};
use crate::grid::{mirror, paint, rotate, rotate_offset, translate, Axis, Coord, Grid, GridError, GridObject, Pivot};
use crate::taxonomy::{Direction, RotationPivot};

/// All non-background cells, taken as the single object the rule acts on.
fn whole_object(input: &Grid) -> Result<GridObject, SolveError> {
    GridObject::from_cells(input.nonzero().collect()).ok_or_else(|| malformed("grid has no object"))
}

pub fn solve_move(input: &Grid, direction: Direction, distance: u8) -> Result<Grid, SolveError> {
    let object = whole_object(input)?;
    let (dr, dc) = direction.step();
    let d = i32::from(distance);
    Ok(translate(&object, dr * d, dc * d, input)?)
}

/// Clockwise rotation of the object about its endpoint (lexicographically
/// smallest cell) or its bounding-box center, or of the whole raster.
pub fn solve_rotation(input: &Grid, pivot: RotationPivot, quarter_turns: u8) -> Result<Grid, SolveError> {
    match pivot {
        RotationPivot::Grid => Ok(rotate(input, quarter_turns, Pivot::GridCenter)?),
        RotationPivot::Endpoint => {
            let (r, c) = whole_object(input)?.first_cell();
            Ok(rotate(input, quarter_turns, Pivot::Coordinate(r, c))?)
        }
        RotationPivot::Center => {
            let object = whole_object(input)?;
            let b = object.bbox;
            if (b.height() as i32 - b.width() as i32) % 2 != 0 {
                return Err(malformed("bounding box center is not a lattice point after rotation"));
            }
            // Doubled coordinates keep half-cell centers exact.
            let (cr, cc) = (b.min_row + b.max_row, b.min_col + b.max_col);
            let moved: Vec<(Coord, u8)> = object
                .cells
                .iter()
                .map(|&((r, c), v)| {
                    let (dr, dc) = rotate_offset((2 * r - cr, 2 * c - cc), quarter_turns);
                    (((cr + dr) / 2, (cc + dc) / 2), v)
                })
                .collect();
            Ok(paint(&Grid::blank(input.rows(), input.cols())?, moved)?)
        }
    }
}

/// Paints each cell's mirror image across the axis onto background cells;
/// source cells stay.
pub fn solve_symmetry(input: &Grid, axis: Axis) -> Result<Grid, SolveError> {
    // Reuse the raster mirror for the shape check and image lookup.
    let reflected = mirror(input, axis)?;
    let (rows, cols) = (input.rows(), input.cols());
    let mut painted = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = reflected.get(r, c);
            if v != 0 && input.get(r, c) == 0 {
                painted.push(((r as i32, c as i32), v));
            }
        }
    }
    paint(input, painted).map_err(|e: GridError| e.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(rows: &[&[u8]]) -> Grid {
        Grid::from_rows(rows).unwrap()
    }

    fn single(rows: usize, cols: usize, at: Coord, v: u8) -> Grid {
        paint(&Grid::blank(rows, cols).unwrap(), [(at, v)]).unwrap()
    }

    #[test]
    fn move_examples() {
        let out = solve_move(&single(5, 5, (2, 2), 2), Direction::Up, 2).unwrap();
        assert_eq!(out, single(5, 5, (0, 2), 2));
        let out = solve_move(&single(5, 5, (4, 0), 3), Direction::UpperRight, 4).unwrap();
        assert_eq!(out, single(5, 5, (0, 4), 3));
        assert!(matches!(
            solve_move(&single(5, 5, (0, 0), 3), Direction::Up, 1),
            Err(SolveError::Grid(GridError::OutOfBounds { .. }))
        ));
    }

    #[test]
    fn move_then_reverse_restores() {
        let input = g(&[&[0, 0, 0, 0], &[0, 4, 4, 0], &[0, 4, 0, 0], &[0, 0, 0, 0]]);
        let there = solve_move(&input, Direction::Right, 1).unwrap();
        assert_eq!(solve_move(&there, Direction::Left, 1).unwrap(), input);
    }

    #[test]
    fn l_triomino_half_turn_about_center() {
        // {(0,0),(1,0),(1,1)} -> {(0,0),(0,1),(1,1)}
        let input = g(&[&[1, 0], &[1, 1]]);
        let out = solve_rotation(&input, RotationPivot::Center, 2).unwrap();
        assert_eq!(out, g(&[&[1, 1], &[0, 1]]));
    }

    #[test]
    fn four_center_quarter_turns_are_identity() {
        let input = g(&[&[0, 0, 0, 0, 0], &[0, 6, 6, 0, 0], &[0, 0, 6, 0, 0], &[0, 0, 6, 6, 0], &[0, 0, 0, 0, 0]]);
        let mut g1 = input.clone();
        for _ in 0..4 {
            g1 = solve_rotation(&g1, RotationPivot::Center, 1).unwrap();
        }
        assert_eq!(g1, input);
    }

    #[test]
    fn single_cell_rotation_is_fixed() {
        let input = single(4, 4, (1, 2), 5);
        for pivot in [RotationPivot::Center, RotationPivot::Endpoint] {
            for t in 1..=3 {
                assert_eq!(solve_rotation(&input, pivot, t).unwrap(), input);
            }
        }
    }

    #[test]
    fn endpoint_rotation_keeps_pivot() {
        // bar (1,1),(1,2) about (1,1): quarter turn -> (1,1),(2,1)
        let input = g(&[&[0, 0, 0], &[0, 7, 7], &[0, 0, 0]]);
        let out = solve_rotation(&input, RotationPivot::Endpoint, 1).unwrap();
        assert_eq!(out, g(&[&[0, 0, 0], &[0, 7, 0], &[0, 7, 0]]));
    }

    #[test]
    fn symmetry_examples() {
        // middle column is the vertical axis
        let on_axis = single(3, 3, (0, 1), 1);
        assert_eq!(solve_symmetry(&on_axis, Axis::Vertical).unwrap(), on_axis);
        let off_axis = single(3, 3, (0, 0), 1);
        let out = solve_symmetry(&off_axis, Axis::Vertical).unwrap();
        assert_eq!(out, g(&[&[1, 0, 1], &[0, 0, 0], &[0, 0, 0]]));
        assert_eq!(solve_symmetry(&out, Axis::Vertical).unwrap(), out);
        assert!(solve_symmetry(&g(&[&[1, 0, 0]]), Axis::MainDiagonal).is_err());
    }
}
