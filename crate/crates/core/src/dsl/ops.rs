//! Pure grid operations.
//!
//! Each operation reads the pre-state and writes into a copy, so vacated
//! cells are zeroed before any member is re-drawn and overlapping moves
//! read their source colors from the unmodified grid. When a guard in an
//! operation rejects its arguments (a non-square rotation, line endpoints
//! that are not aligned) the copy comes back unchanged and the outcome is
//! marked as not executed.

use crate::grid::{Color, Grid};
use crate::objects::ObjectSet;

use super::{DslCall, DslOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateTransform {
    RotateLeft,
    RotateRight,
    VerticalFlip,
    HorizontalFlip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Turn {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Mirror rows within the object's bounding box.
    Vertical,
    /// Mirror columns within the object's bounding box.
    Horizontal,
}

/// Coloring operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Draw<'a> {
    XLine { seed: (usize, usize), color: Color },
    HorizontalLine { from: (usize, usize), to: (usize, usize), color: Color },
    VerticalLine { from: (usize, usize), to: (usize, usize), color: Color },
    DiagonalLine { from: (usize, usize), to: (usize, usize), color: Color },
    PixelColor { at: (usize, usize), color: Color },
    ObjColor { cells: &'a [(usize, usize)], color: Color },
}

/// Result of running one operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub grid: Grid,
    /// False when the operation's guard rejected the arguments.
    pub executed: bool,
}

impl Outcome {
    fn done(grid: Grid) -> Outcome {
        Outcome { grid, executed: true }
    }

    fn skipped(grid: &Grid) -> Outcome {
        Outcome { grid: grid.clone(), executed: false }
    }
}

fn transform_outcome(state: &Grid, kind: StateTransform) -> Outcome {
    let (h, w) = state.dims();
    let mut out = state.clone();
    match kind {
        StateTransform::RotateLeft | StateTransform::RotateRight => {
            if !state.is_square() {
                return Outcome::skipped(state);
            }
            let n = h;
            for x in 0..n {
                for y in 0..n {
                    let v = state.get(x, y);
                    if kind == StateTransform::RotateLeft {
                        out.set(n - 1 - y, x, v);
                    } else {
                        out.set(y, n - 1 - x, v);
                    }
                }
            }
        }
        StateTransform::VerticalFlip => {
            for i in 0..h {
                for j in 0..w {
                    out.set(h - 1 - i, j, state.get(i, j));
                }
            }
        }
        StateTransform::HorizontalFlip => {
            for i in 0..h {
                for j in 0..w {
                    out.set(i, w - 1 - j, state.get(i, j));
                }
            }
        }
    }
    Outcome::done(out)
}

/// Whole-grid rotation or flip. Rotations leave non-square grids unchanged.
pub fn transform_state(state: &Grid, kind: StateTransform) -> Grid {
    transform_outcome(state, kind).grid
}

fn cells_in_bounds(state: &Grid, cells: &[(usize, usize)]) -> bool {
    !cells.is_empty() && cells.iter().all(|&(r, c)| r < state.height() && c < state.width())
}

/// Zeroes every member, then writes each member's pre-state color at
/// `map(cell)` when that lands inside the grid.
fn relocate(state: &Grid, cells: &[(usize, usize)], map: impl Fn(i64, i64) -> (i64, i64)) -> Outcome {
    if !cells_in_bounds(state, cells) {
        return Outcome::skipped(state);
    }
    let mut out = state.clone();
    for &(r, c) in cells {
        out.set(r, c, Color::BACKGROUND);
    }
    for &(r, c) in cells {
        let (nr, nc) = map(r as i64, c as i64);
        if state.in_bounds(nr, nc) {
            out.set(nr as usize, nc as usize, state.get(r, c));
        }
    }
    Outcome::done(out)
}

fn move_outcome(state: &Grid, cells: &[(usize, usize)], dir: Direction) -> Outcome {
    let (dr, dc) = match dir {
        Direction::Left => (0, -1),
        Direction::Right => (0, 1),
        Direction::Up => (-1, 0),
        Direction::Down => (1, 0),
    };
    relocate(state, cells, |r, c| (r + dr, c + dc))
}

/// Shifts an object by one cell. Pixels pushed past the border are dropped.
pub fn move_object(state: &Grid, cells: &[(usize, usize)], dir: Direction) -> Grid {
    move_outcome(state, cells, dir).grid
}

struct Bounds {
    min_r: i64,
    max_r: i64,
    min_c: i64,
    max_c: i64,
}

fn bounds(cells: &[(usize, usize)]) -> Bounds {
    let rows = cells.iter().map(|&(r, _)| r as i64);
    let cols = cells.iter().map(|&(_, c)| c as i64);
    Bounds {
        min_r: rows.clone().min().unwrap_or(0),
        max_r: rows.max().unwrap_or(0),
        min_c: cols.clone().min().unwrap_or(0),
        max_c: cols.max().unwrap_or(0),
    }
}

fn rotate_outcome(state: &Grid, cells: &[(usize, usize)], turn: Turn) -> Outcome {
    if cells.is_empty() {
        return Outcome::skipped(state);
    }
    let b = bounds(cells);
    let pr = (b.max_r + b.min_r).div_euclid(2);
    let pc = (b.max_c + b.min_c).div_euclid(2);
    match turn {
        Turn::Right => relocate(state, cells, |r, c| (c - pc + pr, -r + pr + pc)),
        Turn::Left => relocate(state, cells, |r, c| (-c + pc + pr, r - pr + pc)),
    }
}

/// Quarter turn of an object about its floored bounding-box center.
pub fn rotate_object(state: &Grid, cells: &[(usize, usize)], turn: Turn) -> Grid {
    rotate_outcome(state, cells, turn).grid
}

fn flip_outcome(state: &Grid, cells: &[(usize, usize)], axis: Axis) -> Outcome {
    if cells.is_empty() {
        return Outcome::skipped(state);
    }
    let b = bounds(cells);
    match axis {
        Axis::Vertical => relocate(state, cells, |r, c| (b.max_r + b.min_r - r, c)),
        Axis::Horizontal => relocate(state, cells, |r, c| (r, b.max_c + b.min_c - c)),
    }
}

/// Mirrors an object inside its own bounding box.
pub fn flip_object(state: &Grid, cells: &[(usize, usize)], axis: Axis) -> Grid {
    flip_outcome(state, cells, axis).grid
}

fn draw_outcome(state: &Grid, kind: Draw<'_>) -> Outcome {
    let (h, w) = state.dims();
    let inside = |(r, c): (usize, usize)| r < h && c < w;
    let mut out = state.clone();
    match kind {
        Draw::XLine { seed, color } => {
            if !inside(seed) {
                return Outcome::skipped(state);
            }
            for dr in [-1i64, 1] {
                for dc in [-1i64, 1] {
                    let (mut r, mut c) = (seed.0 as i64 + dr, seed.1 as i64 + dc);
                    while state.in_bounds(r, c) {
                        out.set(r as usize, c as usize, color);
                        r += dr;
                        c += dc;
                    }
                }
            }
        }
        Draw::HorizontalLine { from, to, color } => {
            if !inside(from) || !inside(to) || from.0 != to.0 {
                return Outcome::skipped(state);
            }
            let (lo, hi) = (from.1.min(to.1), from.1.max(to.1));
            for c in lo + 1..hi {
                out.set(from.0, c, color);
            }
        }
        Draw::VerticalLine { from, to, color } => {
            if !inside(from) || !inside(to) || from.1 != to.1 {
                return Outcome::skipped(state);
            }
            let (lo, hi) = (from.0.min(to.0), from.0.max(to.0));
            for r in lo + 1..hi {
                out.set(r, from.1, color);
            }
        }
        Draw::DiagonalLine { from, to, color } => {
            // Coincident endpoints never terminate the walk below, so they
            // count as a rejected call.
            if !inside(from) || !inside(to) || from.0.abs_diff(to.0) != from.1.abs_diff(to.1) || from == to {
                return Outcome::skipped(state);
            }
            let dr = if to.0 > from.0 { 1 } else { -1 };
            let dc = if to.1 > from.1 { 1 } else { -1 };
            let (mut r, mut c) = (from.0 as i64 + dr, from.1 as i64 + dc);
            while r != to.0 as i64 && c != to.1 as i64 {
                out.set(r as usize, c as usize, color);
                r += dr;
                c += dc;
            }
        }
        Draw::PixelColor { at, color } => {
            if !inside(at) {
                return Outcome::skipped(state);
            }
            out.set(at.0, at.1, color);
        }
        Draw::ObjColor { cells, color } => {
            if !cells_in_bounds(state, cells) {
                return Outcome::skipped(state);
            }
            for &(r, c) in cells {
                out.set(r, c, color);
            }
        }
    }
    Outcome::done(out)
}

/// Coloring operations. Line endpoints are exclusive; misaligned endpoints
/// leave the grid unchanged.
pub fn draw(state: &Grid, kind: Draw<'_>) -> Grid {
    draw_outcome(state, kind).grid
}

/// Runs a parsed call against `state`, reporting whether the operation's
/// guard let it execute. A call whose object ordinal or arguments do not
/// resolve is reported as not executed.
pub fn execute_call(state: &Grid, objects: &ObjectSet, call: &DslCall) -> Outcome {
    use DslOp::*;

    let cells = || call.object.and_then(|k| objects.get(k)).map(|o| o.cells.as_slice());
    let color = call.color;
    let pixel = |i: usize| call.pixels.get(i).copied();

    let outcome = match call.op {
        RotateLeftState => Some(transform_outcome(state, StateTransform::RotateLeft)),
        RotateRightState => Some(transform_outcome(state, StateTransform::RotateRight)),
        VerticalFlip => Some(transform_outcome(state, StateTransform::VerticalFlip)),
        HorizontalFlip => Some(transform_outcome(state, StateTransform::HorizontalFlip)),
        MoveRight => cells().map(|c| move_outcome(state, c, Direction::Right)),
        MoveLeft => cells().map(|c| move_outcome(state, c, Direction::Left)),
        MoveUp => cells().map(|c| move_outcome(state, c, Direction::Up)),
        MoveDown => cells().map(|c| move_outcome(state, c, Direction::Down)),
        RotateRightObj => cells().map(|c| rotate_outcome(state, c, Turn::Right)),
        RotateLeftObj => cells().map(|c| rotate_outcome(state, c, Turn::Left)),
        VerticalFlipObj => cells().map(|c| flip_outcome(state, c, Axis::Vertical)),
        HorizontalFlipObj => cells().map(|c| flip_outcome(state, c, Axis::Horizontal)),
        XLine => pixel(0).zip(color).map(|(seed, color)| draw_outcome(state, Draw::XLine { seed, color })),
        PixelColor => pixel(0).zip(color).map(|(at, color)| draw_outcome(state, Draw::PixelColor { at, color })),
        HorizontalLine | VerticalLine | DiagonalLine => match (pixel(0), pixel(1), color) {
            (Some(from), Some(to), Some(color)) => {
                let kind = match call.op {
                    HorizontalLine => Draw::HorizontalLine { from, to, color },
                    VerticalLine => Draw::VerticalLine { from, to, color },
                    _ => Draw::DiagonalLine { from, to, color },
                };
                Some(draw_outcome(state, kind))
            }
            _ => None,
        },
        ObjColor => cells().zip(color).map(|(cells, color)| draw_outcome(state, Draw::ObjColor { cells, color })),
        Complete => Some(Outcome::done(state.clone())),
    };
    outcome.unwrap_or_else(|| Outcome::skipped(state))
}

/// The grid a call produces. Never changes the grid's dimensions.
pub fn apply_call(state: &Grid, objects: &ObjectSet, call: &DslCall) -> Grid {
    execute_call(state, objects, call).grid
}
