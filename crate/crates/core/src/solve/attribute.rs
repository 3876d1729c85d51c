use super::{malformed, SolveError};
use crate::colors;
use crate::grid::{connected_components, paint, BoundingBox, Connectivity, Coord, Grid, GridError, MAX_SIDE};
use crate::shapes::library_shape;
use crate::taxonomy::{CountMode, ShapeMode, SizeMode};

pub fn solve_size(input: &Grid, mode: SizeMode) -> Result<Grid, SolveError> {
    match mode {
        SizeMode::Crop => {
            let coords: Vec<Coord> = input.nonzero().map(|(p, _)| p).collect();
            let bbox = BoundingBox::of(&coords).ok_or_else(|| malformed("nothing to crop"))?;
            Ok(input.crop(bbox)?)
        }
        SizeMode::Frame => {
            let (rows, cols) = (input.rows() as i32, input.cols() as i32);
            Ok(input.edit(|c| {
                for r in 0..rows {
                    for col in 0..cols {
                        if r == 0 || col == 0 || r == rows - 1 || col == cols - 1 {
                            c.set((r, col), colors::FRAME);
                        }
                    }
                }
            }))
        }
        SizeMode::Diagonal => {
            let mut seeds = input.nonzero();
            let ((r0, c0), color) = seeds.next().ok_or_else(|| malformed("no seed cell"))?;
            if seeds.next().is_some() {
                return Err(malformed("more than one seed cell"));
            }
            Ok(input.edit(|c| {
                let mut i = 0;
                while c.set((r0 + i, c0 + i), color) {
                    i += 1;
                }
            }))
        }
    }
}

/// Count convention: a 1xN row, N = number of counted objects. Zero objects
/// give a single background cell.
pub fn solve_count(input: &Grid, mode: CountMode) -> Result<Grid, SolveError> {
    let objects = connected_components(input, Connectivity::FourNeighbor, true);
    let row: Vec<u8> = match mode {
        CountMode::Objects => objects.iter().map(|o| o.color).collect(),
        CountMode::TargetColor => objects
            .iter()
            .filter(|o| o.color == colors::COUNT_TARGET)
            .map(|o| o.color)
            .collect(),
        CountMode::ColorSequence => objects.iter().map(|o| o.color).collect(),
    };
    if mode == CountMode::Objects && row.windows(2).any(|w| w[0] != w[1]) {
        return Err(malformed("objects to count have different colors"));
    }
    if row.is_empty() {
        return Ok(Grid::blank(1, 1)?);
    }
    if row.len() > MAX_SIDE {
        return Err(GridError::BadDimensions {
            rows: 1,
            cols: row.len(),
        }
        .into());
    }
    Ok(Grid::new(1, row.len(), row)?)
}

pub fn solve_shape(input: &Grid, mode: ShapeMode, shape_index: u8) -> Result<Grid, SolveError> {
    let shape = library_shape(shape_index).ok_or_else(|| malformed(format!("no library shape {shape_index}")))?;
    match mode {
        ShapeMode::Stamp => {
            // The shape's first cell lands on the marker.
            let anchor = shape[0];
            let mut stamps = Vec::new();
            for ((r, c), color) in input.nonzero() {
                stamps.extend(shape.iter().map(|&(sr, sc)| ((r + sr - anchor.0, c + sc - anchor.1), color)));
            }
            Ok(paint(&Grid::blank(input.rows(), input.cols())?, stamps)?)
        }
        ShapeMode::Crop => {
            let coords: Vec<Coord> = input.nonzero().filter(|&(_, v)| v != colors::NOISE).map(|(p, _)| p).collect();
            let bbox = BoundingBox::of(&coords).ok_or_else(|| malformed("no shape among the noise"))?;
            let crop = input.crop(bbox)?;
            Ok(crop.edit(|c| {
                for r in 0..c.rows() as i32 {
                    for col in 0..c.cols() as i32 {
                        if c.get((r, col)) == Some(colors::NOISE) {
                            c.set((r, col), 0);
                        }
                    }
                }
            }))
        }
        ShapeMode::Match => {
            let hits: Vec<(Coord, u8)> = connected_components(input, Connectivity::FourNeighbor, true)
                .into_iter()
                .filter(|o| o.normalized_shape() == shape)
                .flat_map(|o| o.coords().map(|p| (p, colors::MATCH_HIGHLIGHT)).collect::<Vec<_>>())
                .collect();
            Ok(paint(input, hits)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(rows: &[&[u8]]) -> Grid {
        Grid::from_rows(rows).unwrap()
    }

    #[test]
    fn count_empty_grid_gives_single_background_cell() {
        let out = solve_count(&Grid::blank(4, 4).unwrap(), CountMode::Objects).unwrap();
        assert_eq!(out, g(&[&[0]]));
    }

    #[test]
    fn count_three_components() {
        let input = g(&[&[3, 0, 3], &[0, 0, 0], &[3, 3, 0]]);
        // hand flood fill: {(0,0)}, {(0,2)}, {(2,0),(2,1)}
        assert_eq!(solve_count(&input, CountMode::Objects).unwrap(), g(&[&[3, 3, 3]]));
    }

    #[test]
    fn count_target_color_ignores_distractors() {
        let input = g(&[&[1, 0, 2], &[0, 0, 0], &[1, 0, 1]]);
        assert_eq!(solve_count(&input, CountMode::TargetColor).unwrap(), g(&[&[1, 1, 1]]));
    }

    #[test]
    fn count_color_sequence_follows_reading_order() {
        let input = g(&[&[0, 6, 0], &[0, 0, 0], &[2, 0, 4]]);
        assert_eq!(solve_count(&input, CountMode::ColorSequence).unwrap(), g(&[&[6, 2, 4]]));
    }

    #[test]
    fn crop_of_full_object_is_identity() {
        let input = g(&[&[4, 4], &[4, 0]]);
        assert_eq!(solve_size(&input, SizeMode::Crop).unwrap(), input);
    }

    #[test]
    fn frame_and_diagonal() {
        let input = g(&[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]]);
        assert_eq!(
            solve_size(&input, SizeMode::Frame).unwrap(),
            g(&[&[8, 8, 8], &[8, 1, 8], &[8, 8, 8]])
        );
        let seed = g(&[&[0, 7, 0], &[0, 0, 0], &[0, 0, 0]]);
        assert_eq!(
            solve_size(&seed, SizeMode::Diagonal).unwrap(),
            g(&[&[0, 7, 0], &[0, 0, 7], &[0, 0, 0]])
        );
    }

    #[test]
    fn stamp_plus_on_marker() {
        // plus anchors on its first cell (0,1)
        let input = g(&[&[0, 6, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
        let out = solve_shape(&input, ShapeMode::Stamp, 8).unwrap();
        assert_eq!(out, g(&[&[0, 6, 0, 0], &[6, 6, 6, 0], &[0, 6, 0, 0]]));
        let edge = g(&[&[6, 0, 0], &[0, 0, 0], &[0, 0, 0]]);
        assert!(solve_shape(&edge, ShapeMode::Stamp, 8).is_err());
    }

    #[test]
    fn match_recolors_only_the_library_shape() {
        let input = g(&[&[5, 5, 0, 5], &[0, 0, 0, 5], &[5, 0, 0, 0]]);
        let out = solve_shape(&input, ShapeMode::Match, 2).unwrap();
        assert_eq!(out, g(&[&[2, 2, 0, 5], &[0, 0, 0, 5], &[5, 0, 0, 0]]));
    }
}
