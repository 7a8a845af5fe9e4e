//! Line-by-line transcription of the published Python reference functions,
//! kept deliberately naive so it can serve as an oracle for the engine.
//!
//! States are `Vec<Vec<i64>>`, objects are `[x, y]` lists. Python list
//! indexing is emulated: negative indices wrap once, anything else out of
//! range raises, here returned as `Err`.

#![allow(dead_code, clippy::needless_range_loop)]

pub type State = Vec<Vec<i64>>;
pub type Obj = Vec<[i64; 2]>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexError;

fn py_index(len: usize, i: i64) -> Result<usize, IndexError> {
    let n = len as i64;
    let j = if i < 0 { i + n } else { i };
    if (0..n).contains(&j) {
        Ok(j as usize)
    } else {
        Err(IndexError)
    }
}

fn set(s: &mut State, x: i64, y: i64, v: i64) -> Result<(), IndexError> {
    let r = py_index(s.len(), x)?;
    let c = py_index(s[r].len(), y)?;
    s[r][c] = v;
    Ok(())
}

fn get(s: &State, x: i64, y: i64) -> Result<i64, IndexError> {
    let r = py_index(s.len(), x)?;
    let c = py_index(s[r].len(), y)?;
    Ok(s[r][c])
}

fn len(s: &State) -> i64 {
    s.len() as i64
}

fn len0(s: &State) -> i64 {
    s[0].len() as i64
}

pub fn rotate_left_state(state: &State) -> Result<State, IndexError> {
    let n = len(state);
    let mut rotated_state = state.clone();
    if n == len0(state) {
        for x in 0..n {
            for y in 0..n {
                set(&mut rotated_state, n - 1 - y, x, get(state, x, y)?)?;
            }
        }
    }
    Ok(rotated_state)
}

pub fn rotate_right_state(state: &State) -> Result<State, IndexError> {
    let n = len(state);
    let mut rotated_state = state.clone();
    if n == len0(state) {
        for x in 0..n {
            for y in 0..n {
                set(&mut rotated_state, y, n - 1 - x, get(state, x, y)?)?;
            }
        }
    }
    Ok(rotated_state)
}

pub fn vertical_flip(state: &State) -> Result<State, IndexError> {
    let mut temp_state = state.clone();
    let (n, m) = (len(state), len0(state));
    for i in 0..n {
        for j in 0..m {
            set(&mut temp_state, n - 1 - i, j, get(state, i, j)?)?;
        }
    }
    Ok(temp_state)
}

pub fn horizontal_flip(state: &State) -> Result<State, IndexError> {
    let (n, m) = (len(state), len0(state));
    let mut flipped_state = state.clone();
    for i in 0..n {
        for j in 0..m / 2 {
            let a = get(state, i, m - 1 - j)?;
            let b = get(state, i, j)?;
            set(&mut flipped_state, i, j, a)?;
            set(&mut flipped_state, i, m - 1 - j, b)?;
        }
    }
    Ok(flipped_state)
}

fn shift(state: &State, object: &Obj, dx: i64, dy: i64) -> Result<State, IndexError> {
    let mut move_state = state.clone();
    for &[x, y] in object {
        set(&mut move_state, x, y, 0)?;
    }
    for &[x, y] in object {
        let (new_x, new_y) = (x + dx, y + dy);
        if 0 <= new_x && new_x < len(state) && 0 <= new_y && new_y < len0(state) {
            set(&mut move_state, new_x, new_y, get(state, x, y)?)?;
        }
    }
    Ok(move_state)
}

pub fn move_right(state: &State, object: &Obj) -> Result<State, IndexError> {
    shift(state, object, 0, 1)
}

pub fn move_left(state: &State, object: &Obj) -> Result<State, IndexError> {
    shift(state, object, 0, -1)
}

pub fn move_up(state: &State, object: &Obj) -> Result<State, IndexError> {
    shift(state, object, -1, 0)
}

pub fn move_down(state: &State, object: &Obj) -> Result<State, IndexError> {
    shift(state, object, 1, 0)
}

/// Python `//` on integers.
fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn centre(object: &Obj) -> (i64, i64) {
    let max_x = object.iter().map(|p| p[0]).max().unwrap();
    let min_x = object.iter().map(|p| p[0]).min().unwrap();
    let max_y = object.iter().map(|p| p[1]).max().unwrap();
    let min_y = object.iter().map(|p| p[1]).min().unwrap();
    (floor_div(max_x + min_x, 2), floor_div(max_y + min_y, 2))
}

pub fn rotate_right_obj(state: &State, object: &Obj) -> Result<State, IndexError> {
    let mut rotate_state = state.clone();
    let (fixed_x, fixed_y) = centre(object);
    for &[x, y] in object {
        set(&mut rotate_state, x, y, 0)?;
    }
    for &[x, y] in object {
        let moved_x = y - fixed_y + fixed_x;
        let moved_y = -x + fixed_x + fixed_y;
        if 0 <= moved_x && moved_x < len(state) && 0 <= moved_y && moved_y < len0(state) {
            set(&mut rotate_state, moved_x, moved_y, get(state, x, y)?)?;
        }
    }
    Ok(rotate_state)
}

pub fn rotate_left_obj(state: &State, object: &Obj) -> Result<State, IndexError> {
    let mut rotate_state = state.clone();
    let (fixed_x, fixed_y) = centre(object);
    for &[x, y] in object {
        set(&mut rotate_state, x, y, 0)?;
    }
    for &[x, y] in object {
        let moved_x = -y + fixed_y + fixed_x;
        let moved_y = x - fixed_x + fixed_y;
        if 0 <= moved_x && moved_x < len(state) && 0 <= moved_y && moved_y < len0(state) {
            set(&mut rotate_state, moved_x, moved_y, get(state, x, y)?)?;
        }
    }
    Ok(rotate_state)
}

pub fn vertical_flip_obj(state: &State, object: &Obj) -> Result<State, IndexError> {
    let mut flip_state = state.clone();
    let max_x = object.iter().map(|p| p[0]).max().unwrap();
    let min_x = object.iter().map(|p| p[0]).min().unwrap();
    for &[x, y] in object {
        set(&mut flip_state, x, y, 0)?;
    }
    for &[x, y] in object {
        set(&mut flip_state, max_x + min_x - x, y, get(state, x, y)?)?;
    }
    Ok(flip_state)
}

pub fn horizontal_flip_obj(state: &State, object: &Obj) -> Result<State, IndexError> {
    let mut flip_state = state.clone();
    let max_y = object.iter().map(|p| p[1]).max().unwrap();
    let min_y = object.iter().map(|p| p[1]).min().unwrap();
    for &[x, y] in object {
        set(&mut flip_state, x, y, 0)?;
    }
    for &[x, y] in object {
        set(&mut flip_state, x, max_y + min_y - y, get(state, x, y)?)?;
    }
    Ok(flip_state)
}

pub fn x_line(state: &State, r: i64, c: i64, color: i64) -> Result<State, IndexError> {
    let mut x_state = state.clone();
    for i in [-1, 1] {
        for j in [-1, 1] {
            let (mut moved_x, mut moved_y) = (r + i, c + j);
            while 0 <= moved_x && moved_x < len(state) && 0 <= moved_y && moved_y < len0(state) {
                set(&mut x_state, moved_x, moved_y, color)?;
                moved_x += i;
                moved_y += j;
            }
        }
    }
    Ok(x_state)
}

pub fn horizontal_line(state: &State, r1: i64, c1: i64, r2: i64, c2: i64, color: i64) -> Result<State, IndexError> {
    let mut line_state = state.clone();
    if r1 == r2 {
        if c1 < c2 {
            if c2 < len0(state) {
                for i in c1 + 1..c2 {
                    set(&mut line_state, r1, i, color)?;
                }
            }
        } else if c1 < len0(state) {
            for i in c2 + 1..c1 {
                set(&mut line_state, r1, i, color)?;
            }
        }
    }
    Ok(line_state)
}

pub fn vertical_line(state: &State, r1: i64, c1: i64, r2: i64, c2: i64, color: i64) -> Result<State, IndexError> {
    let mut line_state = state.clone();
    if c1 == c2 {
        if r1 < r2 {
            if r2 < len(state) {
                for i in r1 + 1..r2 {
                    set(&mut line_state, i, c1, color)?;
                }
            }
        } else if r1 < len(state) {
            for i in r2 + 1..r1 {
                set(&mut line_state, i, c1, color)?;
            }
        }
    }
    Ok(line_state)
}

/// Coincident endpoints walk off the grid and raise, as in the original.
pub fn diagonal_line(state: &State, r1: i64, c1: i64, r2: i64, c2: i64, color: i64) -> Result<State, IndexError> {
    let mut line_state = state.clone();
    if (r1 - r2).abs() == (c1 - c2).abs() {
        let dr = if r2 > r1 { 1 } else { -1 };
        let dc = if c2 > c1 { 1 } else { -1 };
        let (mut r, mut c) = (r1 + dr, c1 + dc);
        while r != r2 && c != c2 {
            set(&mut line_state, r, c, color)?;
            r += dr;
            c += dc;
        }
    }
    Ok(line_state)
}

pub fn obj_color(state: &State, object: &Obj, color: i64) -> Result<State, IndexError> {
    let mut color_state = state.clone();
    for &[x, y] in object {
        set(&mut color_state, x, y, color)?;
    }
    Ok(color_state)
}

pub fn pixel_color(state: &State, r: i64, c: i64, color: i64) -> Result<State, IndexError> {
    let mut temp_state = state.clone();
    set(&mut temp_state, r, c, color)?;
    Ok(temp_state)
}

pub fn complete(state: &State) -> Result<State, IndexError> {
    Ok(state.clone())
}

/// Dispatch by function name with positional integer arguments after
/// `state` (and the object, when the function takes one).
pub fn call(name: &str, state: &State, object: &Obj, args: &[i64]) -> Result<State, IndexError> {
    match name {
        "rotate_left_state" => rotate_left_state(state),
        "rotate_right_state" => rotate_right_state(state),
        "vertical_flip" => vertical_flip(state),
        "horizontal_flip" => horizontal_flip(state),
        "move_right" => move_right(state, object),
        "move_left" => move_left(state, object),
        "move_up" => move_up(state, object),
        "move_down" => move_down(state, object),
        "rotate_right_obj" => rotate_right_obj(state, object),
        "rotate_left_obj" => rotate_left_obj(state, object),
        "vertical_flip_obj" => vertical_flip_obj(state, object),
        "horizontal_flip_obj" => horizontal_flip_obj(state, object),
        "X_line" => x_line(state, args[0], args[1], args[2]),
        "horizontal_line" => horizontal_line(state, args[0], args[1], args[2], args[3], args[4]),
        "vertical_line" => vertical_line(state, args[0], args[1], args[2], args[3], args[4]),
        "diagonal_line" => diagonal_line(state, args[0], args[1], args[2], args[3], args[4]),
        "obj_color" => obj_color(state, object, args[0]),
        "pixel_color" => pixel_color(state, args[0], args[1], args[2]),
        "complete" => complete(state),
        other => panic!("no reference function {other}"),
    }
}
