//! Expansion of a residue-profile half into concrete sequence pairs.

use crate::error::{Error, Result};
use crate::numfilter::columns::{column_cases, Column, PairCases, Side};
use crate::numfilter::residue::{class_count, class_of, ProfileHalf};
use crate::quad::Kind;
use crate::seq::SignSeq;

/// Lazily enumerates every sign pair on one side whose class sums match a
/// profile half and whose columns are admissible.
///
/// Positions are filled outside-in, one column per level; the emission order
/// is depth-first over the column-case order and is fully deterministic.
pub struct CandidateStream {
    pairs: Vec<PairCases>,
    /// Levels `< prefix.len()` are pinned to these columns.
    prefix: Vec<Column>,
    m: usize,
    target_x: Vec<i32>,
    target_y: Vec<i32>,
    sum_x: Vec<i32>,
    sum_y: Vec<i32>,
    /// Unassigned positions left in each class.
    remaining: Vec<i32>,
    x: Vec<i8>,
    y: Vec<i8>,
    next_choice: Vec<usize>,
    depth: usize,
    done: bool,
    emitted: u64,
}

impl CandidateStream {
    pub fn new(half: &ProfileHalf, n: usize, kind: Kind) -> Result<Self> {
        Self::with_prefix(half, n, kind, &[])
    }

    /// Stream restricted to pairs whose first `prefix.len()` outer columns
    /// are the given ones; a shard of the full stream.
    pub fn with_prefix(half: &ProfileHalf, n: usize, kind: Kind, prefix: &[Column]) -> Result<Self> {
        let m = half.m;
        if m == 0 || half.first.len() != m || half.second.len() != m {
            return Err(Error::Malformed("profile half has inconsistent length".into()));
        }
        let side = half.side;
        let len = side.len(n);
        let table = column_cases(n, side, kind);
        if prefix.len() > table.pairs.len() {
            return Err(Error::Malformed(format!(
                "prefix of {} columns exceeds the {} pair levels",
                prefix.len(),
                table.pairs.len()
            )));
        }
        let remaining: Vec<i32> = (1..=m).map(|c| class_count(len, c, m) as i32).collect();
        let mut s = CandidateStream {
            next_choice: vec![0; table.pairs.len()],
            pairs: table.pairs,
            prefix: prefix.to_vec(),
            m,
            target_x: half.first.clone(),
            target_y: half.second.clone(),
            sum_x: vec![0; m],
            sum_y: vec![0; m],
            remaining,
            x: vec![0; len],
            y: vec![0; len],
            depth: 0,
            done: false,
            emitted: 0,
        };
        s.done = !(0..m).all(|c| s.class_feasible(c));
        Ok(s)
    }

    /// Number of pairs emitted so far.
    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    fn class_feasible(&self, c: usize) -> bool {
        let r = self.remaining[c];
        let dx = self.target_x[c] - self.sum_x[c];
        let dy = self.target_y[c] - self.sum_y[c];
        dx.abs() <= r && dy.abs() <= r && (dx - r) % 2 == 0 && (dy - r) % 2 == 0
    }

    fn positions(&self, level: usize) -> (usize, usize) {
        let p = &self.pairs[level];
        (p.i - 1, p.j - 1)
    }

    fn put(&mut self, pos: usize, xv: i8, yv: i8, sign: i32) {
        let c = class_of(pos as i64 + 1, self.m) - 1;
        self.sum_x[c] += sign * xv as i32;
        self.sum_y[c] += sign * yv as i32;
        self.remaining[c] -= sign;
        if sign > 0 {
            self.x[pos] = xv;
            self.y[pos] = yv;
        }
    }

    fn assign(&mut self, level: usize, col: Column) -> bool {
        let (i, j) = self.positions(level);
        self.put(i, col[0], col[2], 1);
        if j != i {
            self.put(j, col[1], col[3], 1);
        }
        let ci = class_of(i as i64 + 1, self.m) - 1;
        let cj = class_of(j as i64 + 1, self.m) - 1;
        self.class_feasible(ci) && self.class_feasible(cj)
    }

    fn unassign(&mut self, level: usize) {
        let (i, j) = self.positions(level);
        let (xi, yi) = (self.x[i], self.y[i]);
        self.put(i, xi, yi, -1);
        if j != i {
            let (xj, yj) = (self.x[j], self.y[j]);
            self.put(j, xj, yj, -1);
        }
    }

    fn choices_len(&self, level: usize) -> usize {
        if level < self.prefix.len() {
            1
        } else {
            self.pairs[level].columns.len()
        }
    }

    fn choice(&self, level: usize, idx: usize) -> Option<Column> {
        if level < self.prefix.len() {
            let c = self.prefix[level];
            self.pairs[level].columns.contains(&c).then_some(c)
        } else {
            Some(self.pairs[level].columns[idx])
        }
    }
}

impl Iterator for CandidateStream {
    type Item = (SignSeq, SignSeq);

    fn next(&mut self) -> Option<Self::Item> {
        let levels = self.pairs.len();
        loop {
            if self.done {
                return None;
            }
            if self.depth == levels {
                let out = (
                    SignSeq::from_vec_unchecked(self.x.clone()),
                    SignSeq::from_vec_unchecked(self.y.clone()),
                );
                if levels == 0 {
                    self.done = true;
                } else {
                    self.depth -= 1;
                    self.unassign(self.depth);
                }
                self.emitted += 1;
                return Some(out);
            }
            let level = self.depth;
            let mut advanced = false;
            while self.next_choice[level] < self.choices_len(level) {
                let idx = self.next_choice[level];
                self.next_choice[level] += 1;
                let Some(col) = self.choice(level, idx) else { continue };
                if self.assign(level, col) {
                    advanced = true;
                    break;
                }
                self.unassign(level);
            }
            if advanced {
                self.depth += 1;
                continue;
            }
            self.next_choice[level] = 0;
            if level == 0 {
                self.done = true;
                return None;
            }
            self.depth -= 1;
            self.unassign(self.depth);
        }
    }
}

/// Collects the whole candidate stream for a half.
pub fn expand_candidates(half: &ProfileHalf, n: usize, kind: Kind) -> Result<Vec<(SignSeq, SignSeq)>> {
    Ok(CandidateStream::new(half, n, kind)?.collect())
}

/// Outer columns of a pair, outside-in, as used by [`CandidateStream::with_prefix`].
pub fn outer_columns(x: &SignSeq, y: &SignSeq, side: Side, n: usize, k: usize) -> Vec<Column> {
    let len = side.len(n);
    (1..=k.min(len.div_ceil(2)))
        .map(|i| {
            let j = len + 1 - i;
            [x.at(i), x.at(j), y.at(i), y.at(j)]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfilter::residue::class_sums;

    fn half(side: Side, first: Vec<i32>, second: Vec<i32>) -> ProfileHalf {
        ProfileHalf {
            m: first.len(),
            side,
            first,
            second,
        }
    }

    #[test]
    fn n1_cd_has_at_most_one_pair() {
        let h = half(Side::CD, vec![1, 0], vec![-1, 0]);
        let v = expand_candidates(&h, 1, Kind::Bs).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].0.to_string(), "+");
        assert_eq!(v[0].1.to_string(), "-");
    }

    fn oracle_cd_half(n: usize, m: usize) -> (ProfileHalf, SignSeq, SignSeq) {
        let q = crate::oracle::brute_bs(n).unwrap().pop().unwrap();
        let h = crate::numfilter::residue::ResidueProfile::from_quad(&q, m).half(Side::CD);
        (h, q.c, q.d)
    }

    #[test]
    fn emitted_pairs_match_class_sums_and_are_distinct() {
        let (h, c, d) = oracle_cd_half(5, 2);
        let v = expand_candidates(&h, 5, Kind::Bs).unwrap();
        assert!(v.contains(&(c, d)));
        let mut seen = std::collections::HashSet::new();
        for (x, y) in &v {
            assert_eq!(class_sums(x, 2), h.first);
            assert_eq!(class_sums(y, 2), h.second);
            assert!(seen.insert((x.clone(), y.clone())));
        }
    }

    #[test]
    fn structured_pairs_are_coupled() {
        let h = half(Side::AB, vec![1, 1, 1], vec![1, 1, -1]);
        for (a, b) in expand_candidates(&h, 4, Kind::Ns).unwrap() {
            assert_eq!(a.at(5), 1);
            assert_eq!(b.at(5), -1);
            assert_eq!(&a.as_slice()[..4], &b.as_slice()[..4]);
        }
    }

    #[test]
    fn prefix_shard_is_a_subset() {
        let (h, c, d) = oracle_cd_half(6, 2);
        let all = expand_candidates(&h, 6, Kind::Bs).unwrap();
        let pre = outer_columns(&c, &d, Side::CD, 6, 1);
        let shard: Vec<_> = CandidateStream::with_prefix(&h, 6, Kind::Bs, &pre)
            .unwrap()
            .collect();
        assert!(shard.contains(&(c, d)));
        assert!(shard.iter().all(|p| all.contains(p)));
        assert!(shard.len() < all.len());
    }
}
