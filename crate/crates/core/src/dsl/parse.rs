use serde::Serialize;
use thiserror::Error;

use crate::grid::Color;

use super::{DslCall, DslOp, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "code", rename_all = "PascalCase")]
pub enum ParseError {
    #[error("malformed call: {reason}")]
    Syntax { reason: String },
    #[error("unknown DSL operation `{name}`")]
    UnknownOp { name: String },
    #[error("{op} takes {expected} argument(s) after state, got {found}")]
    ArityMismatch { op: String, expected: usize, found: usize },
    #[error("argument {position} of {op} must be {expected}, got `{found}`")]
    BadArgument { op: String, position: usize, expected: &'static str, found: String },
    #[error("object{ordinal} does not exist ({count} objects)")]
    ObjectOutOfRange { ordinal: usize, count: usize },
    #[error("pixel ({row}, {col}) is outside the {height}x{width} grid")]
    PixelOutOfRange { row: i64, col: i64, height: usize, width: usize },
    #[error("color {value} is outside 0..=9")]
    ColorOutOfRange { value: i64 },
}

impl ParseError {
    /// Machine-readable code, matching the serialized `code` tag.
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "Syntax",
            ParseError::UnknownOp { .. } => "UnknownOp",
            ParseError::ArityMismatch { .. } => "ArityMismatch",
            ParseError::BadArgument { .. } => "BadArgument",
            ParseError::ObjectOutOfRange { .. } => "ObjectOutOfRange",
            ParseError::PixelOutOfRange { .. } => "PixelOutOfRange",
            ParseError::ColorOutOfRange { .. } => "ColorOutOfRange",
        }
    }
}

enum Arg {
    Object(usize),
    Int(i64),
}

fn syntax(reason: impl Into<String>) -> ParseError {
    ParseError::Syntax { reason: reason.into() }
}

fn parse_arg(raw: &str) -> Option<Arg> {
    // Tolerate keyword form, `color=3`.
    let token = raw.split_once('=').map_or(raw, |(_, v)| v).trim();
    let lower = token.to_ascii_lowercase();
    if let Some(digits) = lower.strip_prefix("object") {
        let digits = digits.trim_start_matches('_');
        return digits.parse().ok().map(Arg::Object);
    }
    token.parse().ok().map(Arg::Int)
}

/// Parses `name(state, arg, ...)` and checks every argument against the
/// operation's signature, the object count and the grid dimensions.
///
/// Arguments are `objectK` references or integer literals, bound
/// positionally: rows and columns in the order written, then the color.
pub fn parse_dsl_call(text: &str, object_count: usize, dims: (usize, usize)) -> Result<DslCall, ParseError> {
    let text = text.trim().trim_end_matches(';').trim();
    let open = text.find('(').ok_or_else(|| syntax("missing `(`"))?;
    if !text.ends_with(')') {
        return Err(syntax("missing closing `)`"));
    }
    let name = text[..open].trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(syntax(format!("bad operation name `{name}`")));
    }
    let op = DslOp::from_name(name).ok_or_else(|| ParseError::UnknownOp { name: name.to_string() })?;

    let inner = &text[open + 1..text.len() - 1];
    let mut parts = inner.split(',').map(str::trim);
    match parts.next() {
        Some(first) if first.split_once('=').map_or(first, |(_, v)| v).trim() == "state" => {}
        Some(other) => return Err(syntax(format!("first argument must be `state`, got `{other}`"))),
        None => return Err(syntax("missing `state` argument")),
    }
    let raw_args: Vec<&str> = parts.collect();
    if raw_args.iter().any(|a| a.is_empty()) {
        return Err(syntax("empty argument"));
    }

    let signature = op.signature();
    if raw_args.len() != signature.arity() {
        return Err(ParseError::ArityMismatch { op: op.name().into(), expected: signature.arity(), found: raw_args.len() });
    }

    let mut objects = Vec::new();
    let mut ints = Vec::new();
    for (i, raw) in raw_args.iter().enumerate() {
        let position = i + 1;
        let wants_object = matches!(signature, Signature::Object | Signature::ObjectColor) && i == 0;
        let bad = |expected| ParseError::BadArgument { op: op.name().into(), position, expected, found: raw.to_string() };
        match (parse_arg(raw), wants_object) {
            (Some(Arg::Object(k)), true) => objects.push(k),
            (Some(Arg::Int(v)), false) => ints.push(v),
            (_, true) => return Err(bad("an object reference")),
            (_, false) => return Err(bad("an integer")),
        }
    }

    let mut call = DslCall::state_only(op);
    if let Some(&k) = objects.first() {
        if k == 0 || k > object_count {
            return Err(ParseError::ObjectOutOfRange { ordinal: k, count: object_count });
        }
        call.object = Some(k);
    }
    if let Some(&value) = ints.last() {
        let color = Color::new(value).ok_or(ParseError::ColorOutOfRange { value })?;
        call.color = Some(color);
        let coords = &ints[..ints.len() - 1];
        for pair in coords.chunks(2) {
            let (row, col) = (pair[0], pair[1]);
            let (h, w) = dims;
            if row < 0 || col < 0 || row as usize >= h || col as usize >= w {
                return Err(ParseError::PixelOutOfRange { row, col, height: h, width: w });
            }
            call.pixels.push((row as usize, col as usize));
        }
    }
    Ok(call)
}
