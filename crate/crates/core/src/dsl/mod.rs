//! The grid DSL: 19 operations over a state grid and its objects.

mod ops;
mod parse;
mod session;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::grid::Color;

pub use ops::{
    apply_call, draw, execute_call, flip_object, move_object, rotate_object, transform_state, Axis, Direction, Draw,
    Outcome, StateTransform, Turn,
};
pub use parse::{parse_dsl_call, ParseError};
pub use session::{ObjectPolicy, Session, SessionError, SessionStatus, StepResult, Trajectory, TrajectoryEntry, MAX_STEPS};

/// Argument shape of an operation, beyond the leading `state`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    /// `op(state)`
    StateOnly,
    /// `op(state, objectK)`
    Object,
    /// `op(state, r, c, color)`
    Pixel,
    /// `op(state, r1, c1, r2, c2, color)`
    Segment,
    /// `op(state, objectK, color)`
    ObjectColor,
}

impl Signature {
    pub fn arity(self) -> usize {
        match self {
            Signature::StateOnly => 0,
            Signature::Object => 1,
            Signature::ObjectColor => 2,
            Signature::Pixel => 3,
            Signature::Segment => 5,
        }
    }
}

/// Which part of the state an operation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Grid,
    Object,
    Coordinate,
    None,
}

macro_rules! dsl_ops {
    ($($variant:ident => $name:literal, $sig:ident, $target:ident;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum DslOp {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl DslOp {
            pub const ALL: [DslOp; 19] = [$(DslOp::$variant,)*];

            /// The function name as written in call text.
            pub fn name(self) -> &'static str {
                match self {
                    $(DslOp::$variant => $name,)*
                }
            }

            pub fn signature(self) -> Signature {
                match self {
                    $(DslOp::$variant => Signature::$sig,)*
                }
            }

            pub fn target(self) -> Target {
                match self {
                    $(DslOp::$variant => Target::$target,)*
                }
            }
        }
    };
}

dsl_ops! {
    RotateLeftState => "rotate_left_state", StateOnly, Grid;
    RotateRightState => "rotate_right_state", StateOnly, Grid;
    VerticalFlip => "vertical_flip", StateOnly, Grid;
    HorizontalFlip => "horizontal_flip", StateOnly, Grid;
    MoveRight => "move_right", Object, Object;
    MoveLeft => "move_left", Object, Object;
    MoveUp => "move_up", Object, Object;
    MoveDown => "move_down", Object, Object;
    RotateRightObj => "rotate_right_obj", Object, Object;
    RotateLeftObj => "rotate_left_obj", Object, Object;
    VerticalFlipObj => "vertical_flip_obj", Object, Object;
    HorizontalFlipObj => "horizontal_flip_obj", Object, Object;
    XLine => "X_line", Pixel, Coordinate;
    HorizontalLine => "horizontal_line", Segment, Coordinate;
    VerticalLine => "vertical_line", Segment, Coordinate;
    DiagonalLine => "diagonal_line", Segment, Coordinate;
    ObjColor => "obj_color", ObjectColor, Object;
    PixelColor => "pixel_color", Pixel, Coordinate;
    Complete => "complete", StateOnly, None;
}

impl DslOp {
    /// Case-insensitive lookup by function name.
    pub fn from_name(name: &str) -> Option<DslOp> {
        DslOp::ALL.into_iter().find(|op| op.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for DslOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One resolved DSL invocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DslCall {
    pub op: DslOp,
    /// 1-based object ordinal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pixels: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Color>,
}

impl DslCall {
    pub fn state_only(op: DslOp) -> DslCall {
        DslCall { op, object: None, pixels: Vec::new(), color: None }
    }

    pub fn with_object(op: DslOp, ordinal: usize) -> DslCall {
        DslCall { object: Some(ordinal), ..DslCall::state_only(op) }
    }

    pub fn pixel(op: DslOp, at: (usize, usize), color: Color) -> DslCall {
        DslCall { pixels: vec![at], color: Some(color), ..DslCall::state_only(op) }
    }

    pub fn segment(op: DslOp, from: (usize, usize), to: (usize, usize), color: Color) -> DslCall {
        DslCall { pixels: vec![from, to], color: Some(color), ..DslCall::state_only(op) }
    }

    pub fn object_color(ordinal: usize, color: Color) -> DslCall {
        DslCall { object: Some(ordinal), color: Some(color), ..DslCall::state_only(DslOp::ObjColor) }
    }
}

impl fmt::Display for DslCall {
    /// Canonical call text, e.g. `horizontal_line(state, 0, 1, 0, 4, 3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(state", self.op.name())?;
        if let Some(k) = self.object {
            write!(f, ", object{k}")?;
        }
        for (r, c) in &self.pixels {
            write!(f, ", {r}, {c}")?;
        }
        if let Some(color) = self.color {
            write!(f, ", {color}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nineteen_distinct_names() {
        let mut names: Vec<_> = DslOp::ALL.iter().map(|op| op.name()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 19);
        assert_eq!(DslOp::from_name("x_line"), Some(DslOp::XLine));
        assert_eq!(DslOp::from_name("X_line"), Some(DslOp::XLine));
        assert_eq!(DslOp::from_name("fill"), None);
    }

    #[test]
    fn canonical_text() {
        let c = Color::new(3).unwrap();
        assert_eq!(DslCall::segment(DslOp::HorizontalLine, (0, 1), (0, 4), c).to_string(), "horizontal_line(state, 0, 1, 0, 4, 3)");
        assert_eq!(DslCall::with_object(DslOp::MoveUp, 2).to_string(), "move_up(state, object2)");
        assert_eq!(DslCall::object_color(4, c).to_string(), "obj_color(state, object4, 3)");
        assert_eq!(DslCall::state_only(DslOp::Complete).to_string(), "complete(state)");
    }
}
