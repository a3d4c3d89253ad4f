//! Completion of a fixed pair to full quads by outside-in backtracking.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::numfilter::columns::{column_cases, Column, Side};
use crate::quad::{Kind, SeqQuad};
use crate::seq::SignSeq;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    First,
    All,
}

/// Optional stop conditions for long completions.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { deadline: None }
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

#[derive(Clone, Debug)]
pub struct Completion {
    pub quads: Vec<SeqQuad>,
    /// `false` when the budget ran out before the tree was exhausted.
    pub finished: bool,
    pub nodes: u64,
}

struct Filler<'a> {
    len: usize,
    levels: Vec<(usize, usize, &'a [Column])>,
    /// Required value of `N_u(s) + N_v(s)` for `s = 0..len`.
    target: Vec<i32>,
    u: Vec<i8>,
    v: Vec<i8>,
    mode: Mode,
    budget: Budget,
    nodes: u64,
    stopped: bool,
    found: Vec<(Vec<i8>, Vec<i8>)>,
}

impl Filler<'_> {
    fn shift_sum(&self, s: usize, upto: usize) -> i32 {
        (0..upto)
            .map(|i| (self.u[i] * self.u[i + s] + self.v[i] * self.v[i + s]) as i32)
            .sum()
    }

    fn rec(&mut self, level: usize) {
        if self.stopped {
            return;
        }
        self.nodes += 1;
        if self.nodes & 0xFFFF == 0 && self.budget.expired() {
            self.stopped = true;
            return;
        }
        if level == self.levels.len() {
            if (1..self.len).all(|s| self.shift_sum(s, self.len - s) == self.target[s]) {
                self.found.push((self.u.clone(), self.v.clone()));
                if self.mode == Mode::First {
                    self.stopped = true;
                }
            }
            return;
        }
        let (i, j, cols) = self.levels[level];
        // after this level, shift len-1-level is fully determined
        let s = self.len - 1 - level;
        for &c in cols {
            self.u[i] = c[0];
            self.v[i] = c[2];
            self.u[j] = c[1];
            self.v[j] = c[3];
            if s >= 1 && self.shift_sum(s, level + 1) != self.target[s] {
                continue;
            }
            self.rec(level + 1);
            if self.stopped {
                return;
            }
        }
    }
}

/// All (or the first) completions of `fixed` on the opposite side, as
/// verified quads.
///
/// The first element of the first filled sequence is fixed to `+1`; in
/// [`Mode::All`] the negated copies are added back. Structured `A,B` fills
/// are not sign-reduced since negating `A` would break the coupling.
pub fn backtrack_complete(
    fixed: (&SignSeq, &SignSeq),
    n: usize,
    kind: Kind,
    fill: Side,
    mode: Mode,
) -> Result<Vec<SeqQuad>> {
    Ok(backtrack_with_budget(fixed, n, kind, fill, mode, Budget::unlimited())?.quads)
}

pub fn backtrack_with_budget(
    fixed: (&SignSeq, &SignSeq),
    n: usize,
    kind: Kind,
    fill: Side,
    mode: Mode,
    budget: Budget,
) -> Result<Completion> {
    let fixed_len = fill.other().len(n);
    if fixed.0.len() != fixed_len || fixed.1.len() != fixed_len {
        return Err(Error::Malformed(format!(
            "fixed pair must have length {fixed_len} for n = {n}"
        )));
    }
    if kind == Kind::Nns && n % 2 == 1 {
        return Err(Error::Precondition(format!("NNS({n}) requires even n")));
    }
    let empty = Completion {
        quads: Vec::new(),
        finished: true,
        nodes: 0,
    };
    let len = fill.len(n);
    let fixed_paf = |s: usize| fixed.0.paf(s) + fixed.1.paf(s);
    // shifts the filled side cannot reach must already cancel
    if (len.max(1)..=n).any(|s| fixed_paf(s) != 0) {
        return Ok(empty);
    }
    let mut target: Vec<i32> = (0..len).map(|s| -fixed_paf(s)).collect();
    if let Some(t0) = target.first_mut() {
        *t0 = 2 * len as i32;
    }
    let structured_fill = fill == Side::AB && kind.is_structured();
    let table = column_cases(n, fill, kind);
    let reduced: Vec<Vec<Column>> = table
        .pairs
        .iter()
        .enumerate()
        .map(|(lvl, p)| {
            if lvl == 0 && !structured_fill {
                p.columns.iter().copied().filter(|c| c[0] == 1).collect()
            } else {
                p.columns.clone()
            }
        })
        .collect();
    let levels = table
        .pairs
        .iter()
        .zip(&reduced)
        .map(|(p, cols)| (p.i - 1, p.j - 1, cols.as_slice()))
        .collect();
    let mut f = Filler {
        len,
        levels,
        target,
        u: vec![1; len],
        v: vec![1; len],
        mode,
        budget,
        nodes: 0,
        stopped: false,
        found: Vec::new(),
    };
    if len > 0 {
        f.rec(0);
    } else {
        f.found.push((Vec::new(), Vec::new()));
    }
    let finished = !f.stopped || (mode == Mode::First && !f.found.is_empty());
    let mut pairs = std::mem::take(&mut f.found);
    if mode == Mode::All && !structured_fill && len > 0 {
        let neg: Vec<_> = pairs
            .iter()
            .map(|(u, v)| (u.iter().map(|x| -x).collect(), v.clone()))
            .collect();
        pairs.extend(neg);
    }
    let mut quads = Vec::with_capacity(pairs.len());
    for (u, v) in pairs {
        let (u, v) = (SignSeq::new(u)?, SignSeq::new(v)?);
        let (a, b, c, d) = match fill {
            Side::AB => (u, v, fixed.0.clone(), fixed.1.clone()),
            Side::CD => (fixed.0.clone(), fixed.1.clone(), u, v),
        };
        let q = SeqQuad::new(kind, a, b, c, d)?;
        debug_assert!(crate::quad::verify(&q).valid);
        quads.push(q);
    }
    quads.sort_by_key(crate::equiv::lex_cmp_key);
    Ok(Completion {
        quads,
        finished,
        nodes: f.nodes,
    })
}
