//! Admissible sign columns for symmetric position pairs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::Kind;

/// Which pair of sequences a search step works on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    /// `A, B` (length `n+1`).
    AB,
    /// `C, D` (length `n`).
    CD,
}

impl Side {
    pub fn len(self, n: usize) -> usize {
        match self {
            Side::AB => n + 1,
            Side::CD => n,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::AB => Side::CD,
            Side::CD => Side::AB,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::AB => "ab",
            Side::CD => "cd",
        })
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ab" => Ok(Side::AB),
            "cd" => Ok(Side::CD),
            o => Err(Error::Malformed(format!("unknown side {o:?}"))),
        }
    }
}

/// A column `(x_i, x_j, y_i, y_j)` for the position pair `(i, j)`. For a
/// self-paired middle position `x_j = x_i` and `y_j = y_i`.
pub type Column = [i8; 4];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCases {
    /// 1-based position.
    pub i: usize,
    /// 1-based partner position (`n+2-i` on `A,B`, `n+1-i` on `C,D`).
    pub j: usize,
    pub columns: Vec<Column>,
}

impl PairCases {
    pub fn is_middle(&self) -> bool {
        self.i == self.j
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnCaseTable {
    pub n: usize,
    pub side: Side,
    pub kind: Kind,
    /// Outside-in: `pairs[0]` is `i = 1`.
    pub pairs: Vec<PairCases>,
}

const SIGNS: [i8; 2] = [1, -1];

fn all_columns() -> Vec<Column> {
    let mut v = Vec::with_capacity(16);
    for &a in &SIGNS {
        for &b in &SIGNS {
            for &c in &SIGNS {
                for &d in &SIGNS {
                    v.push([a, b, c, d]);
                }
            }
        }
    }
    v
}

/// Required residue of `x_i + x_j + y_i + y_j` mod 4 for pair `i`, or `None`
/// when unconstrained.
fn required_residue(n: usize, side: Side, i: usize, j: usize) -> Option<i32> {
    if i == j {
        return None;
    }
    match side {
        Side::AB => Some(if i == 1 { 2 } else { 0 }),
        Side::CD => (i >= 2).then_some(0),
    }
    .filter(|_| n >= 1)
}

/// Coupled `b` value at 1-based position `p` given `a_p`.
fn coupled(kind: Kind, n: usize, p: usize, a: i8) -> i8 {
    if p == n + 1 {
        return -1;
    }
    match kind {
        Kind::Nns if p.is_multiple_of(2) => -a,
        _ => a,
    }
}

pub fn column_cases(n: usize, side: Side, kind: Kind) -> ColumnCaseTable {
    let len = side.len(n);
    let structured = side == Side::AB && kind.is_structured();
    let mut pairs = Vec::new();
    for i in 1..=len.div_ceil(2) {
        let j = len + 1 - i;
        let req = required_residue(n, side, i, j);
        let columns: Vec<Column> = all_columns()
            .into_iter()
            .filter(|c| {
                if i == j && (c[0] != c[1] || c[2] != c[3]) {
                    return false;
                }
                if structured {
                    if j == n + 1 && c[1] != 1 {
                        return false;
                    }
                    if c[2] != coupled(kind, n, i, c[0]) || c[3] != coupled(kind, n, j, c[1]) {
                        return false;
                    }
                }
                match req {
                    Some(r) => {
                        let s: i32 = c.iter().map(|&x| x as i32).sum();
                        s.rem_euclid(4) == r
                    }
                    None => true,
                }
            })
            .collect();
        pairs.push(PairCases { i, j, columns });
    }
    ColumnCaseTable {
        n,
        side,
        kind,
        pairs,
    }
}
