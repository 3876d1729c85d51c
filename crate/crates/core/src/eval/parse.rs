use serde::{Deserialize, Serialize};

use crate::grid::{Grid, MAX_COLOR, MAX_SIDE};

/// Why no grid could be read from a response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseFailure {
    NoGrid,
    Ragged,
    BadCell,
}

impl std::fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::NoGrid => "no_grid",
            Self::Ragged => "ragged",
            Self::BadCell => "bad_cell",
        })
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    i: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.i) == Some(&b) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Option<i64> {
        self.skip_ws();
        let start = self.i;
        if self.s.get(self.i) == Some(&b'-') {
            self.i += 1;
        }
        let digits = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if self.i == digits {
            self.i = start;
            return None;
        }
        std::str::from_utf8(&self.s[start..self.i]).ok()?.parse().ok().or(Some(i64::MAX))
    }
}

enum Candidate {
    Grid(Grid, usize),
    Failed(ParseFailure, usize),
    NotAGrid,
}

/// Reads `[[ints],[ints],...]` starting at `start`, which must be `[`.
fn candidate(s: &[u8], start: usize) -> Candidate {
    let mut c = Cursor { s, i: start };
    if !c.eat(b'[') {
        return Candidate::NotAGrid;
    }
    let mut rows: Vec<Vec<i64>> = Vec::new();
    loop {
        if !c.eat(b'[') {
            return Candidate::NotAGrid;
        }
        let mut row = Vec::new();
        if !c.eat(b']') {
            loop {
                let Some(v) = c.int() else {
                    return Candidate::NotAGrid;
                };
                row.push(v);
                if c.eat(b']') {
                    break;
                }
                if !c.eat(b',') {
                    return Candidate::NotAGrid;
                }
            }
        }
        rows.push(row);
        if c.eat(b']') {
            break;
        }
        if !c.eat(b',') {
            return Candidate::NotAGrid;
        }
    }
    let end = c.i;
    let width = rows[0].len();
    if width == 0 || rows.iter().any(|r| r.len() != width) || rows.len() > MAX_SIDE || width > MAX_SIDE {
        return Candidate::Failed(ParseFailure::Ragged, end);
    }
    if rows.iter().flatten().any(|&v| !(0..=i64::from(MAX_COLOR)).contains(&v)) {
        return Candidate::Failed(ParseFailure::BadCell, end);
    }
    let cells = rows.iter().flatten().map(|&v| v as u8).collect();
    match Grid::new(rows.len(), width, cells) {
        Ok(g) => Candidate::Grid(g, end),
        Err(_) => Candidate::Failed(ParseFailure::Ragged, end),
    }
}

/// The last well-formed grid in a free-text response. Prose, code fences and
/// earlier candidate grids are ignored. When no grid is well formed, the
/// failure of the last bracketed candidate is reported.
pub fn parse_grid(response: &str) -> Result<Grid, ParseFailure> {
    let s = response.as_bytes();
    let mut best: Option<Grid> = None;
    let mut last_failure = ParseFailure::NoGrid;
    let mut i = 0;
    while i < s.len() {
        if s[i] != b'[' {
            i += 1;
            continue;
        }
        match candidate(s, i) {
            Candidate::Grid(g, end) => {
                best = Some(g);
                i = end;
            }
            Candidate::Failed(f, end) => {
                last_failure = f;
                i = end;
            }
            Candidate::NotAGrid => i += 1,
        }
    }
    best.ok_or(last_failure)
}

/// Exact match: same shape and every cell equal.
pub fn score(pred: &Result<Grid, ParseFailure>, truth: &Grid) -> bool {
    matches!(pred, Ok(g) if g == truth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(rows: &[&[u8]]) -> Grid {
        Grid::from_rows(rows).unwrap()
    }

    #[test]
    fn fenced_grid() {
        assert_eq!(parse_grid("```\n[[1,2],[3,4]]\n```"), Ok(g(&[&[1, 2], &[3, 4]])));
    }

    #[test]
    fn last_grid_wins() {
        assert_eq!(parse_grid("I think the answer is [[1]] but actually [[2]]"), Ok(g(&[&[2]])));
    }

    #[test]
    fn failures() {
        assert_eq!(parse_grid("[[1,2],[3]]"), Err(ParseFailure::Ragged));
        assert_eq!(parse_grid("[[1,12]]"), Err(ParseFailure::BadCell));
        assert_eq!(parse_grid("nothing here [1, 2]"), Err(ParseFailure::NoGrid));
        assert_eq!(parse_grid(""), Err(ParseFailure::NoGrid));
    }

    #[test]
    fn nested_and_trailing_ragged() {
        // a valid grid followed by a ragged one: the valid one is still used
        assert_eq!(parse_grid("[[3]] then [[1],[2,2]]"), Ok(g(&[&[3]])));
        assert_eq!(parse_grid("[[[5]]]"), Ok(g(&[&[5]])));
    }

    #[test]
    fn scoring() {
        let t = g(&[&[1, 0]]);
        assert!(score(&Ok(t.clone()), &t));
        assert!(!score(&Ok(g(&[&[1], &[0]])), &t));
        assert!(!score(&Err(ParseFailure::NoGrid), &t));
    }
}
