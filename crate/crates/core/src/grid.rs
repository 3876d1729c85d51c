//! Grid data model and the geometric/topological primitives shared by every
//! generator and solver.
//!
//! Grids are immutable values: every operation returns a new grid.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported side length.
///
/// One more than the usual 30-cell cap so that a single cell can travel the
/// full 30-cell move distance and still sit on the canvas.
pub const MAX_SIDE: usize = 31;

/// Largest cell value. 0 is background, 1..=9 are object colors.
pub const MAX_COLOR: u8 = 9;

pub const BACKGROUND: u8 = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid dimensions {rows}x{cols} outside 1..={MAX_SIDE}")]
    BadDimensions { rows: usize, cols: usize },
    #[error("cell value {value} at ({row}, {col}) outside 0..={MAX_COLOR}")]
    BadCell { row: usize, col: usize, value: u8 },
    #[error("expected {expected} cells, got {actual}")]
    CellCount { expected: usize, actual: usize },
    #[error("row {row} has {len} cells, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("coordinate leaves the {rows}x{cols} canvas")]
    OutOfBounds { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// A (row, col) coordinate. Signed so that intermediate geometry may step
/// outside the canvas before being bounds-checked.
pub type Coord = (i32, i32);

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, cells: Vec<u8>) -> Result<Self, GridError> {
        check_dims(rows, cols)?;
        if cells.len() != rows * cols {
            return Err(GridError::CellCount {
                expected: rows * cols,
                actual: cells.len(),
            });
        }
        if let Some(i) = cells.iter().position(|&v| v > MAX_COLOR) {
            return Err(GridError::BadCell {
                row: i / cols,
                col: i % cols,
                value: cells[i],
            });
        }
        Ok(Self { rows, cols, cells })
    }

    /// All-background grid.
    pub fn blank(rows: usize, cols: usize) -> Result<Self, GridError> {
        check_dims(rows, cols)?;
        Ok(Self {
            rows,
            cols,
            cells: vec![BACKGROUND; rows * cols],
        })
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, GridError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        check_dims(n_rows, n_cols)?;
        let mut cells = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(GridError::Ragged {
                    row: i,
                    len: row.len(),
                    expected: n_cols,
                });
            }
            cells.extend_from_slice(row);
        }
        Self::new(n_rows, n_cols, cells)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.cols + col]
    }

    /// Cell value at a signed coordinate, `None` outside the canvas.
    pub fn at(&self, (r, c): Coord) -> Option<u8> {
        if self.contains((r, c)) {
            Some(self.cells[r as usize * self.cols + c as usize])
        } else {
            None
        }
    }

    pub fn contains(&self, (r, c): Coord) -> bool {
        r >= 0 && c >= 0 && (r as usize) < self.rows && (c as usize) < self.cols
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Coordinates of every non-background cell in row-major order.
    pub fn nonzero(&self) -> impl Iterator<Item = (Coord, u8)> + '_ {
        self.cells.iter().enumerate().filter_map(move |(i, &v)| {
            (v != BACKGROUND).then_some((((i / self.cols) as i32, (i % self.cols) as i32), v))
        })
    }

    pub fn count_nonzero(&self) -> usize {
        self.cells.iter().filter(|&&v| v != BACKGROUND).count()
    }

    /// Copy-on-write edit. The closure sees a mutable canvas; the result is a
    /// new grid.
    pub fn edit(&self, f: impl FnOnce(&mut Canvas)) -> Grid {
        let mut canvas = Canvas { grid: self.clone() };
        f(&mut canvas);
        canvas.grid
    }

    /// Sub-grid covering the inclusive box.
    pub fn crop(&self, bbox: BoundingBox) -> Result<Grid, GridError> {
        if !self.contains((bbox.min_row, bbox.min_col)) || !self.contains((bbox.max_row, bbox.max_col)) {
            return Err(GridError::OutOfBounds {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut cells = Vec::with_capacity(bbox.height() * bbox.width());
        for r in bbox.min_row..=bbox.max_row {
            for c in bbox.min_col..=bbox.max_col {
                cells.push(self.get(r as usize, c as usize));
            }
        }
        Grid::new(bbox.height(), bbox.width(), cells)
    }
}

fn check_dims(rows: usize, cols: usize) -> Result<(), GridError> {
    if rows == 0 || cols == 0 || rows > MAX_SIDE || cols > MAX_SIDE {
        Err(GridError::BadDimensions { rows, cols })
    } else {
        Ok(())
    }
}

/// Mutable view used inside [`Grid::edit`].
pub struct Canvas {
    grid: Grid,
}

impl Canvas {
    pub fn rows(&self) -> usize {
        self.grid.rows
    }

    pub fn cols(&self) -> usize {
        self.grid.cols
    }

    pub fn get(&self, coord: Coord) -> Option<u8> {
        self.grid.at(coord)
    }

    /// Paints a cell; coordinates outside the canvas are ignored and reported
    /// as `false`.
    pub fn set(&mut self, (r, c): Coord, value: u8) -> bool {
        debug_assert!(value <= MAX_COLOR);
        if self.grid.contains((r, c)) {
            let cols = self.grid.cols;
            self.grid.cells[r as usize * cols + c as usize] = value;
            true
        } else {
            false
        }
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Grid {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = self.row(r).iter().map(|v| char::from(b'0' + v)).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Grid {
    /// Compact JSON-style rows, e.g. `[[1,0],[0,2]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (i, v) in self.row(r).iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<u8>>::deserialize(deserializer)?;
        Grid::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    #[default]
    FourNeighbor,
    EightNeighbor,
}

impl Connectivity {
    pub fn offsets(self) -> &'static [Coord] {
        const FOUR: [Coord; 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
        const EIGHT: [Coord; 8] = [
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ];
        match self {
            Connectivity::FourNeighbor => &FOUR,
            Connectivity::EightNeighbor => &EIGHT,
        }
    }
}

/// Inclusive bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundingBox {
    pub min_row: i32,
    pub min_col: i32,
    pub max_row: i32,
    pub max_col: i32,
}

impl BoundingBox {
    pub fn of(cells: &[Coord]) -> Option<Self> {
        let (&(r0, c0), rest) = cells.split_first()?;
        let mut b = BoundingBox {
            min_row: r0,
            min_col: c0,
            max_row: r0,
            max_col: c0,
        };
        for &(r, c) in rest {
            b.min_row = b.min_row.min(r);
            b.min_col = b.min_col.min(c);
            b.max_row = b.max_row.max(r);
            b.max_col = b.max_col.max(c);
        }
        Some(b)
    }

    pub fn height(&self) -> usize {
        (self.max_row - self.min_row + 1) as usize
    }

    pub fn width(&self) -> usize {
        (self.max_col - self.min_col + 1) as usize
    }
}

/// A connected set of cells. `color` is the color of the first cell in
/// row-major order; with `same_color_only` components every cell shares it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridObject {
    pub color: u8,
    /// Sorted row-major.
    pub cells: Vec<(Coord, u8)>,
    pub bbox: BoundingBox,
}

impl GridObject {
    pub fn from_cells(mut cells: Vec<(Coord, u8)>) -> Option<Self> {
        cells.sort_unstable();
        let coords: Vec<Coord> = cells.iter().map(|&(p, _)| p).collect();
        let bbox = BoundingBox::of(&coords)?;
        Some(Self {
            color: cells[0].1,
            cells,
            bbox,
        })
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        self.cells.iter().map(|&(p, _)| p)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cell coordinates relative to the bounding box's top-left corner,
    /// sorted row-major. Two objects with the same footprint compare equal.
    pub fn normalized_shape(&self) -> Vec<Coord> {
        let mut v: Vec<Coord> = self
            .coords()
            .map(|(r, c)| (r - self.bbox.min_row, c - self.bbox.min_col))
            .collect();
        v.sort_unstable();
        v
    }

    /// Lexicographically smallest cell.
    pub fn first_cell(&self) -> Coord {
        self.cells[0].0
    }

    pub fn shifted(&self, dr: i32, dc: i32) -> GridObject {
        GridObject::from_cells(self.cells.iter().map(|&((r, c), v)| ((r + dr, c + dc), v)).collect())
            .expect("non-empty object")
    }
}

/// Extracts connected components of non-background cells.
///
/// Objects are disjoint, cover every non-background cell, and are ordered by
/// the top-left corner of their bounding box, ties broken by first cell.
pub fn connected_components(grid: &Grid, connectivity: Connectivity, same_color_only: bool) -> Vec<GridObject> {
    let (rows, cols) = (grid.rows, grid.cols);
    let mut seen = vec![false; rows * cols];
    let mut objects = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..rows * cols {
        if seen[start] || grid.cells[start] == BACKGROUND {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut cells = Vec::new();
        let color = grid.cells[start];
        while let Some(i) = queue.pop_front() {
            let (r, c) = ((i / cols) as i32, (i % cols) as i32);
            cells.push(((r, c), grid.cells[i]));
            for &(dr, dc) in connectivity.offsets() {
                let Some(v) = grid.at((r + dr, c + dc)) else {
                    continue;
                };
                let j = (r + dr) as usize * cols + (c + dc) as usize;
                if seen[j] || v == BACKGROUND || (same_color_only && v != color) {
                    continue;
                }
                seen[j] = true;
                queue.push_back(j);
            }
        }
        objects.push(GridObject::from_cells(cells).expect("component has a seed cell"));
    }
    objects.sort_by_key(|o| (o.bbox.min_row, o.bbox.min_col, o.first_cell()));
    objects
}

/// Paints `cells` onto `canvas`, failing if any lands outside.
pub fn paint(canvas: &Grid, cells: impl IntoIterator<Item = (Coord, u8)>) -> Result<Grid, GridError> {
    let mut out = canvas.clone();
    for ((r, c), v) in cells {
        if !out.contains((r, c)) {
            return Err(GridError::OutOfBounds {
                rows: canvas.rows,
                cols: canvas.cols,
            });
        }
        out.cells[r as usize * canvas.cols + c as usize] = v;
    }
    Ok(out)
}

/// Erases `object` from `canvas` and repaints it shifted by `(dr, dc)`.
pub fn translate(object: &GridObject, dr: i32, dc: i32, canvas: &Grid) -> Result<Grid, GridError> {
    let moved: Vec<(Coord, u8)> = object.cells.iter().map(|&((r, c), v)| ((r + dr, c + dc), v)).collect();
    if moved.iter().any(|&(p, _)| !canvas.contains(p)) {
        return Err(GridError::OutOfBounds {
            rows: canvas.rows,
            cols: canvas.cols,
        });
    }
    let erased = paint(canvas, object.coords().map(|p| (p, BACKGROUND)))?;
    paint(&erased, moved)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pivot {
    GridCenter,
    Coordinate(i32, i32),
}

/// Rotates a vector `(dr, dc)` clockwise by `quarter_turns` quarter turns.
/// Row index grows downward, so clockwise maps right to down.
pub fn rotate_offset((dr, dc): Coord, quarter_turns: u8) -> Coord {
    match quarter_turns % 4 {
        0 => (dr, dc),
        1 => (dc, -dr),
        2 => (-dr, -dc),
        _ => (-dc, dr),
    }
}

/// Clockwise raster rotation.
///
/// About `GridCenter` the whole raster turns, so odd turns swap the
/// dimensions. About a coordinate the canvas is kept and every
/// non-background cell is moved; any cell leaving the canvas is an error.
pub fn rotate(grid: &Grid, quarter_turns: u8, pivot: Pivot) -> Result<Grid, GridError> {
    let turns = quarter_turns % 4;
    match pivot {
        Pivot::GridCenter => {
            let (rows, cols) = (grid.rows, grid.cols);
            let (out_rows, out_cols) = if turns % 2 == 1 { (cols, rows) } else { (rows, cols) };
            let mut cells = vec![BACKGROUND; rows * cols];
            for r in 0..rows {
                for c in 0..cols {
                    let (nr, nc) = match turns {
                        0 => (r, c),
                        1 => (c, rows - 1 - r),
                        2 => (rows - 1 - r, cols - 1 - c),
                        _ => (cols - 1 - c, r),
                    };
                    cells[nr * out_cols + nc] = grid.get(r, c);
                }
            }
            Grid::new(out_rows, out_cols, cells)
        }
        Pivot::Coordinate(pr, pc) => {
            let moved: Vec<(Coord, u8)> = grid
                .nonzero()
                .map(|((r, c), v)| {
                    let (dr, dc) = rotate_offset((r - pr, c - pc), turns);
                    ((pr + dr, pc + dc), v)
                })
                .collect();
            paint(&Grid::blank(grid.rows, grid.cols)?, moved)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// The middle row: top and bottom swap.
    Horizontal,
    /// The middle column: left and right swap.
    Vertical,
    /// Top-left to bottom-right diagonal; square grids only.
    MainDiagonal,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Horizontal, Axis::Vertical, Axis::MainDiagonal];

    /// Image of a coordinate on a `rows x cols` canvas.
    pub fn reflect(self, (r, c): Coord, rows: usize, cols: usize) -> Coord {
        match self {
            Axis::Horizontal => (rows as i32 - 1 - r, c),
            Axis::Vertical => (r, cols as i32 - 1 - c),
            Axis::MainDiagonal => (c, r),
        }
    }
}

pub fn mirror(grid: &Grid, axis: Axis) -> Result<Grid, GridError> {
    if axis == Axis::MainDiagonal && grid.rows != grid.cols {
        return Err(GridError::ShapeMismatch(format!(
            "diagonal mirror needs a square grid, got {}x{}",
            grid.rows, grid.cols
        )));
    }
    let mut cells = vec![BACKGROUND; grid.cells.len()];
    for r in 0..grid.rows {
        for c in 0..grid.cols {
            let (nr, nc) = axis.reflect((r as i32, c as i32), grid.rows, grid.cols);
            cells[nr as usize * grid.cols + nc as usize] = grid.get(r, c);
        }
    }
    Grid::new(grid.rows, grid.cols, cells)
}

/// Exact match: same dimensions and every cell equal.
pub fn equals_exact(a: &Grid, b: &Grid) -> bool {
    a.rows == b.rows && a.cols == b.cols && a.cells == b.cells
}
