//! Pulling grids out of free-form model responses.

use arcbench_core::{validate_grid, Grid};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Option<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.bytes.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == digits || self.pos - digits > 6 {
            return None;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).ok()?.parse().ok()
    }

    fn row(&mut self) -> Option<Vec<i64>> {
        if !self.eat(b'[') {
            return None;
        }
        let mut row = vec![self.int()?];
        loop {
            if self.eat(b']') {
                return Some(row);
            }
            if !self.eat(b',') {
                return None;
            }
            row.push(self.int()?);
        }
    }

    fn matrix(&mut self) -> Option<Vec<Vec<i64>>> {
        if !self.eat(b'[') {
            return None;
        }
        let mut rows = vec![self.row()?];
        loop {
            if self.eat(b']') {
                return Some(rows);
            }
            if !self.eat(b',') {
                return None;
            }
            rows.push(self.row()?);
        }
    }
}

/// Every bracketed integer matrix in `text` that is a valid grid, in order
/// of appearance.
pub fn extract_grids(text: &str) -> Vec<Grid> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'[' {
            i += 1;
            continue;
        }
        let mut cur = Cursor { bytes, pos: i };
        match cur.matrix() {
            Some(rows) => {
                if let Ok(g) = validate_grid(&rows) {
                    out.push(g);
                }
                i = cur.pos;
            }
            None => i += 1,
        }
    }
    out
}

/// The last valid grid in `text`. Models often restate the input before
/// answering, so the final matrix is taken as the answer.
pub fn extract_grid(text: &str) -> Option<Grid> {
    extract_grids(text).pop()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(extract_grid("no grid here"), None);
        assert_eq!(extract_grid("[[1]]"), Some(Grid::from_rows(&[[1]]).unwrap()));
        assert_eq!(extract_grid("x [[[2]]] y"), Some(Grid::from_rows(&[[2]]).unwrap()));
        assert_eq!(extract_grid("[[1,2],\n [3, 4]]."), Some(Grid::from_rows(&[[1, 2], [3, 4]]).unwrap()));
        assert_eq!(extract_grid("first [[1]] then [[2, 2]]"), Some(Grid::from_rows(&[[2, 2]]).unwrap()));
    }

    #[test]
    fn invalid_matrices_are_skipped() {
        assert_eq!(extract_grid("[[1, 2]] then [[1], [2, 3]]"), Some(Grid::from_rows(&[[1, 2]]).unwrap()));
        assert_eq!(extract_grid("[[10]]"), None);
        assert_eq!(extract_grid("[[-1]]"), None);
        assert_eq!(extract_grid("[[]]"), None);
        assert_eq!(extract_grid("[[1, 2]"), None);
    }
}
