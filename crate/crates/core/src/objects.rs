//! Connected-component objects, the coordinate lists the DSL takes as
//! object arguments.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::grid::{Color, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    #[default]
    Four,
    Eight,
}

/// Which neighbouring foreground cells join the same object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorMode {
    /// Neighbours join only when they carry the same color.
    #[default]
    SameColor,
    /// Any two non-background neighbours join.
    AnyNonzero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcObject {
    /// 1-based ordinal, as in `object2`.
    pub index: usize,
    /// Member cells as `(row, col)`, row-major.
    pub cells: Vec<(usize, usize)>,
    /// Color of the first member cell; under `SameColor` every member has it.
    pub color: Color,
}

impl ArcObject {
    /// `ObjectN: [[r, c], ...]`
    pub fn prompt_line(&self) -> String {
        let cells: Vec<String> = self.cells.iter().map(|(r, c)| format!("[{r}, {c}]")).collect();
        format!("Object{}: [{}]", self.index, cells.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSet {
    pub dims: (usize, usize),
    pub objects: Vec<ArcObject>,
    pub connectivity: Connectivity,
    pub color_mode: ColorMode,
}

impl ObjectSet {
    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Looks up an object by its 1-based ordinal.
    pub fn get(&self, ordinal: usize) -> Option<&ArcObject> {
        ordinal.checked_sub(1).and_then(|i| self.objects.get(i))
    }

    /// The listing used in prompts:
    ///
    /// ```text
    /// there are 2 objects
    /// Object1: [[0, 0]]
    /// Object2: [[2, 1], [2, 2]]
    /// ```
    pub fn prompt_text(&self) -> String {
        let mut out = format!("there are {} objects", self.objects.len());
        for obj in &self.objects {
            let _ = write!(out, "\n{}", obj.prompt_line());
        }
        out
    }
}

const FOUR: [(i64, i64); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
const EIGHT: [(i64, i64); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

/// Labels the non-background components of `grid`.
///
/// Components are discovered by a row-major scan, so objects come out
/// ordered by their smallest member cell.
pub fn extract_objects(grid: &Grid, connectivity: Connectivity, color_mode: ColorMode) -> ObjectSet {
    let (h, w) = grid.dims();
    let offsets: &[(i64, i64)] = match connectivity {
        Connectivity::Four => &FOUR,
        Connectivity::Eight => &EIGHT,
    };
    let mut seen = vec![false; h * w];
    let mut objects = Vec::new();
    let mut queue = VecDeque::new();

    for r in 0..h {
        for c in 0..w {
            let seed = grid.get(r, c);
            if seed.is_background() || seen[r * w + c] {
                continue;
            }
            seen[r * w + c] = true;
            queue.push_back((r, c));
            let mut cells = Vec::new();
            while let Some((cr, cc)) = queue.pop_front() {
                cells.push((cr, cc));
                for &(dr, dc) in offsets {
                    let (nr, nc) = (cr as i64 + dr, cc as i64 + dc);
                    if !grid.in_bounds(nr, nc) {
                        continue;
                    }
                    let (nr, nc) = (nr as usize, nc as usize);
                    let color = grid.get(nr, nc);
                    let joins = match color_mode {
                        ColorMode::SameColor => color == seed,
                        ColorMode::AnyNonzero => !color.is_background(),
                    };
                    if joins && !seen[nr * w + nc] {
                        seen[nr * w + nc] = true;
                        queue.push_back((nr, nc));
                    }
                }
            }
            cells.sort_unstable();
            objects.push(ArcObject { index: objects.len() + 1, cells, color: seed });
        }
    }

    ObjectSet { dims: (h, w), objects, connectivity, color_mode }
}
