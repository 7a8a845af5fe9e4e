//! Grids of color codes, the state every experiment operates on.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest height or width an ARC grid may have.
pub const MAX_DIM: usize = 30;

/// Number of distinct colors (0..=9).
pub const NUM_COLORS: u8 = 10;

/// A color code in `0..=9`. Color 0 is the background.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Color(u8);

impl Color {
    pub const BACKGROUND: Color = Color(0);

    pub fn new(value: i64) -> Option<Color> {
        (0..i64::from(NUM_COLORS)).contains(&value).then_some(Color(value as u8))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_background(self) -> bool {
        self.0 == 0
    }
}

impl TryFrom<i64> for Color {
    type Error = String;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Color::new(value).ok_or_else(|| format!("color {value} is outside 0..=9"))
    }
}

impl From<Color> for u8 {
    fn from(c: Color) -> u8 {
        c.0
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One reason a candidate matrix is not a valid grid.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridViolation {
    #[error("grid has no rows")]
    NoRows,
    #[error("height {height} is outside 1..=30")]
    HeightOutOfRange { height: usize },
    #[error("width {width} is outside 1..=30")]
    WidthOutOfRange { width: usize },
    #[error("row {row} has {found} cells, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("cell ({row}, {col}) holds {value}, outside 0..=9")]
    ColorOutOfRange { row: usize, col: usize, value: i64 },
}

/// Every violation found in a rejected matrix.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid grid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct GridViolations(pub Vec<GridViolation>);

/// A rectangular, row-major matrix of colors, 1..=30 on each side.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<u8>>")]
pub struct Grid {
    height: usize,
    width: usize,
    cells: Vec<Color>,
}

/// Checks a candidate matrix against the grid invariants.
///
/// All violations are collected rather than stopping at the first one.
pub fn validate_grid(rows: &[Vec<i64>]) -> Result<Grid, GridViolations> {
    let mut violations = Vec::new();
    let height = rows.len();
    if height == 0 {
        return Err(GridViolations(vec![GridViolation::NoRows]));
    }
    if height > MAX_DIM {
        violations.push(GridViolation::HeightOutOfRange { height });
    }
    let width = rows[0].len();
    if width == 0 || width > MAX_DIM {
        violations.push(GridViolation::WidthOutOfRange { width });
    }
    let mut cells = Vec::with_capacity(height * width);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != width {
            violations.push(GridViolation::Ragged { row: r, expected: width, found: row.len() });
        }
        for (c, &value) in row.iter().enumerate() {
            match Color::new(value) {
                Some(color) => cells.push(color),
                None => violations.push(GridViolation::ColorOutOfRange { row: r, col: c, value }),
            }
        }
    }
    if violations.is_empty() {
        Ok(Grid { height, width, cells })
    } else {
        Err(GridViolations(violations))
    }
}

/// Exact equality: same dimensions and same cells.
pub fn grids_equal(a: &Grid, b: &Grid) -> bool {
    a == b
}

impl Grid {
    /// A `height × width` grid filled with `color`.
    ///
    /// Panics if either dimension is outside `1..=30`.
    pub fn filled(height: usize, width: usize, color: Color) -> Grid {
        assert!((1..=MAX_DIM).contains(&height) && (1..=MAX_DIM).contains(&width), "grid dimensions out of range");
        Grid { height, width, cells: vec![color; height * width] }
    }

    pub fn zeros(height: usize, width: usize) -> Grid {
        Grid::filled(height, width, Color::BACKGROUND)
    }

    /// Builds a grid from small literal rows. Mostly for tests and fixtures.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Grid, GridViolations> {
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.as_ref().iter().map(|&v| i64::from(v)).collect()).collect();
        validate_grid(&rows)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn is_square(&self) -> bool {
        self.height == self.width
    }

    pub fn in_bounds(&self, row: i64, col: i64) -> bool {
        row >= 0 && col >= 0 && (row as usize) < self.height && (col as usize) < self.width
    }

    pub fn get(&self, row: usize, col: usize) -> Color {
        self.cells[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, color: Color) {
        self.cells[row * self.width + col] = color;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Color]> {
        self.cells.chunks(self.width)
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.rows().map(|r| r.iter().map(|c| c.value()).collect()).collect()
    }

    /// Compact JSON form, `[[0,1],[2,3]]`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_rows()).expect("grid serializes")
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Grid {}x{}", self.height, self.width)?;
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(f, "  {}", line.join(" "))?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<i64>>> for Grid {
    type Error = GridViolations;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, Self::Error> {
        validate_grid(&rows)
    }
}

impl From<Grid> for Vec<Vec<u8>> {
    fn from(g: Grid) -> Self {
        g.to_rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimum_grid_is_valid() {
        let g = validate_grid(&[vec![0]]).unwrap();
        assert_eq!(g.dims(), (1, 1));
    }

    #[test]
    fn too_many_rows() {
        let rows = vec![vec![0; 5]; 31];
        let err = validate_grid(&rows).unwrap_err();
        assert_eq!(err.0, vec![GridViolation::HeightOutOfRange { height: 31 }]);
    }

    #[test]
    fn ragged_rows() {
        let err = validate_grid(&[vec![1, 2], vec![3]]).unwrap_err();
        assert_eq!(err.0, vec![GridViolation::Ragged { row: 1, expected: 2, found: 1 }]);
    }

    #[test]
    fn collects_every_violation() {
        let err = validate_grid(&[vec![1, 10], vec![-1]]).unwrap_err();
        assert_eq!(err.0.len(), 3);
        assert!(err.0.contains(&GridViolation::ColorOutOfRange { row: 0, col: 1, value: 10 }));
        assert!(err.0.contains(&GridViolation::ColorOutOfRange { row: 1, col: 0, value: -1 }));
    }

    #[test]
    fn empty_matrix() {
        assert_eq!(validate_grid(&[]).unwrap_err().0, vec![GridViolation::NoRows]);
        assert_eq!(validate_grid(&[vec![]]).unwrap_err().0, vec![GridViolation::WidthOutOfRange { width: 0 }]);
    }

    #[test]
    fn equality() {
        let a = Grid::from_rows(&[[1, 2, 3], [4, 5, 6], [7, 8, 9]]).unwrap();
        assert!(grids_equal(&a, &a.clone()));

        let wide = Grid::from_rows(&[[0, 0, 0], [0, 0, 0]]).unwrap();
        let tall = Grid::from_rows(&[[0, 0], [0, 0], [0, 0]]).unwrap();
        assert!(!grids_equal(&wide, &tall));

        let mut b = a.clone();
        b.set(2, 2, Color::new(0).unwrap());
        assert!(!grids_equal(&a, &b));
    }

    #[test]
    fn serde_uses_nested_arrays() {
        let g: Grid = serde_json::from_str("[[0,1],[2,3]]").unwrap();
        assert_eq!(g.get(1, 0).value(), 2);
        assert_eq!(g.to_json(), "[[0,1],[2,3]]");
        assert!(serde_json::from_str::<Grid>("[[0,11]]").is_err());
    }
}
