//! Residue-class sum profiles.
//!
//! For modulus `m` the four vectors `k, r, p, q` hold the sums of `A, B, C, D`
//! over the position classes `j ≡ i (mod m)`, `i = 1..m`. A valid quad forces
//!
//! * per-class bounds and parity from the class sizes,
//! * `Σ k_i² + Σ r_i² + Σ p_i² + Σ q_i² = 4n+2`,
//! * vanishing total periodic autocorrelation of the folded vectors at every
//!   shift `1..=m/2`,
//! * mod-4 congruences on symmetric class pairs,
//! * for even `m`, the alternated sums `a*, b*, c*, d*`,
//! * for NS/NNS, `r` fixed by `k`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::columns::Side;
use crate::error::{Error, Result};
use crate::quad::{Kind, SeqQuad, SumProfile};
use crate::seq::SignSeq;

/// 1-based residue class of the 1-based position `pos`; works for
/// non-positive positions too.
pub fn class_of(pos: i64, m: usize) -> usize {
    ((pos - 1).rem_euclid(m as i64) + 1) as usize
}

/// Number of positions in `1..=len` that fall in 1-based class `class`.
pub fn class_count(len: usize, class: usize, m: usize) -> usize {
    if class > len {
        0
    } else {
        (len - class) / m + 1
    }
}

pub fn class_sums(seq: &SignSeq, m: usize) -> Vec<i32> {
    let mut v = vec![0; m];
    for (j, &x) in seq.as_slice().iter().enumerate() {
        v[j % m] += x as i32;
    }
    v
}

/// `[Σ v_i², P(1), …, P(m/2)]` where `P` is the periodic autocorrelation.
pub fn periodic_signature(v: &[i32]) -> Vec<i32> {
    let m = v.len();
    let mut sig = Vec::with_capacity(m / 2 + 1);
    sig.push(v.iter().map(|x| x * x).sum());
    for s in 1..=m / 2 {
        sig.push((0..m).map(|i| v[i] * v[(i + s) % m]).sum());
    }
    sig
}

fn alt_total(v: &[i32]) -> i32 {
    v.iter()
        .enumerate()
        .map(|(i, &x)| if i % 2 == 0 { x } else { -x })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueProfile {
    pub m: usize,
    pub k: Vec<i32>,
    pub r: Vec<i32>,
    pub p: Vec<i32>,
    pub q: Vec<i32>,
}

impl ResidueProfile {
    pub fn from_quad(quad: &SeqQuad, m: usize) -> Self {
        ResidueProfile {
            m,
            k: class_sums(&quad.a, m),
            r: class_sums(&quad.b, m),
            p: class_sums(&quad.c, m),
            q: class_sums(&quad.d, m),
        }
    }

    pub fn from_halves(ab: &ProfileHalf, cd: &ProfileHalf) -> Self {
        debug_assert_eq!(ab.m, cd.m);
        ResidueProfile {
            m: ab.m,
            k: ab.first.clone(),
            r: ab.second.clone(),
            p: cd.first.clone(),
            q: cd.second.clone(),
        }
    }

    pub fn half(&self, side: Side) -> ProfileHalf {
        let (first, second) = match side {
            Side::AB => (self.k.clone(), self.r.clone()),
            Side::CD => (self.p.clone(), self.q.clone()),
        };
        ProfileHalf {
            m: self.m,
            side,
            first,
            second,
        }
    }

    /// Folds a profile at modulus `m` down to modulus `m / 2`.
    pub fn coarsen(&self) -> Option<ResidueProfile> {
        if !self.m.is_multiple_of(2) {
            return None;
        }
        let h = self.m / 2;
        let fold = |v: &[i32]| (0..h).map(|i| v[i] + v[i + h]).collect::<Vec<_>>();
        Some(ResidueProfile {
            m: h,
            k: fold(&self.k),
            r: fold(&self.r),
            p: fold(&self.p),
            q: fold(&self.q),
        })
    }

    pub fn sum_of_squares(&self) -> i32 {
        [&self.k, &self.r, &self.p, &self.q]
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<i32>())
            .sum()
    }

    /// `N_K(s)+N_R(s)+N_P(s)+N_Q(s)+N_K(m-s)+…` for `s = 1..=m/2`.
    pub fn pairing_sums(&self) -> Vec<i32> {
        let mut tot = vec![0; self.m / 2];
        for v in [&self.k, &self.r, &self.p, &self.q] {
            for (t, x) in tot.iter_mut().zip(&periodic_signature(v)[1..]) {
                *t += x;
            }
        }
        tot
    }
}

impl fmt::Display for ResidueProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.m)?;
        for v in [&self.k, &self.r, &self.p, &self.q] {
            for x in v {
                write!(f, ",{x}")?;
            }
        }
        Ok(())
    }
}

fn parse_ints(s: &str) -> Result<Vec<i32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i32>()
                .map_err(|e| Error::Malformed(format!("bad integer {t:?}: {e}")))
        })
        .collect()
}

impl FromStr for ResidueProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v = parse_ints(s)?;
        let m = *v.first().ok_or_else(|| Error::Malformed("empty profile".into()))?;
        if m < 1 || v.len() != 1 + 4 * m as usize {
            return Err(Error::Malformed(format!(
                "profile line needs m followed by 4m integers, got {} values",
                v.len()
            )));
        }
        let m = m as usize;
        let part = |i: usize| v[1 + i * m..1 + (i + 1) * m].to_vec();
        Ok(ResidueProfile {
            m,
            k: part(0),
            r: part(1),
            p: part(2),
            q: part(3),
        })
    }
}

/// The `(k, r)` or `(p, q)` half of a residue profile.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProfileHalf {
    pub m: usize,
    pub side: Side,
    pub first: Vec<i32>,
    pub second: Vec<i32>,
}

impl ProfileHalf {
    pub fn signature(&self) -> Vec<i32> {
        add(&periodic_signature(&self.first), &periodic_signature(&self.second))
    }
}

impl fmt::Display for ProfileHalf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.m, self.side)?;
        for x in self.first.iter().chain(&self.second) {
            write!(f, ",{x}")?;
        }
        Ok(())
    }
}

impl FromStr for ProfileHalf {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.splitn(3, ',');
        let m: usize = it
            .next()
            .and_then(|t| t.trim().parse().ok())
            .ok_or_else(|| Error::Malformed(format!("bad half {s:?}")))?;
        let side: Side = it
            .next()
            .ok_or_else(|| Error::Malformed(format!("bad half {s:?}")))?
            .trim()
            .parse()?;
        let v = parse_ints(it.next().unwrap_or(""))?;
        if v.len() != 2 * m {
            return Err(Error::Malformed(format!("half needs 2m = {} values", 2 * m)));
        }
        Ok(ProfileHalf {
            m,
            side,
            first: v[..m].to_vec(),
            second: v[m..].to_vec(),
        })
    }
}

fn add(a: &[i32], b: &[i32]) -> Vec<i32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Shared constraint context for one `(n, m, sums, kind)`.
struct Ctx {
    n: usize,
    m: usize,
    s: SumProfile,
    kind: Kind,
}

impl Ctx {
    fn new(n: usize, m: usize, s: SumProfile, kind: Kind) -> Result<Self> {
        if m < 2 {
            return Err(Error::Precondition(format!("modulus {m} must be at least 2")));
        }
        if kind == Kind::Nns && m % 2 == 1 {
            return Err(Error::Precondition(format!(
                "NNS residue profiles need an even modulus, got {m}"
            )));
        }
        if kind == Kind::Nns && n % 2 == 1 {
            return Err(Error::Precondition(format!("NNS({n}) requires even n")));
        }
        Ok(Ctx { n, m, s, kind })
    }

    fn target(&self) -> i32 {
        4 * self.n as i32 + 2
    }

    fn target_sig(&self) -> Vec<i32> {
        let mut t = vec![0; self.m / 2 + 1];
        t[0] = self.target();
        t
    }

    fn counts(&self, side: Side) -> Vec<i32> {
        let len = side.len(self.n);
        (1..=self.m)
            .map(|i| class_count(len, i, self.m) as i32)
            .collect()
    }

    fn totals(&self, side: Side) -> [(i32, i32); 2] {
        let s = &self.s;
        match side {
            Side::AB => [(s.a, s.a_star), (s.b, s.b_star)],
            Side::CD => [(s.c, s.c_star), (s.d, s.d_star)],
        }
    }

    /// Class holding position `n + 1`.
    fn last_class(&self) -> usize {
        class_of(self.n as i64 + 1, self.m)
    }

    fn derive_r(&self, k: &[i32]) -> Option<Vec<i32>> {
        let l = self.last_class();
        let counts = self.counts(Side::AB);
        let r: Vec<i32> = k
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let class = i + 1;
                let base = match self.kind {
                    Kind::Nns if class % 2 == 0 => -x,
                    _ => x,
                };
                if class == l {
                    base - 2
                } else {
                    base
                }
            })
            .collect();
        r.iter().zip(&counts).all(|(x, c)| x.abs() <= *c).then_some(r)
    }

    fn ab_congruence_ok(&self, k: &[i32], r: &[i32]) -> bool {
        if self.n == 0 {
            return true;
        }
        let m = self.m;
        let n = self.n as i64;
        let c1 = class_of(1, m);
        let cl = class_of(n + 1, m);
        (1..=m).all(|j| {
            let jp = class_of(n + 2 - j as i64, m);
            let hits = (c1 == j) as i32 + (cl == j) as i32;
            let lhs = k[j - 1] + r[j - 1] + k[jp - 1] + r[jp - 1];
            (lhs - 2 * hits).rem_euclid(4) == 0
        })
    }

    fn cd_congruence_ok(&self, p: &[i32], q: &[i32]) -> bool {
        if self.n == 0 {
            return true;
        }
        let m = self.m;
        let n = self.n as i64;
        (1..=m).all(|j| {
            let jp = class_of(n + 1 - j as i64, m);
            (p[j - 1] + q[j - 1] + p[jp - 1] + q[jp - 1]).rem_euclid(4) == 0
        })
    }

    fn half_ok(&self, side: Side, first: &[i32], second: &[i32]) -> bool {
        match side {
            Side::AB => self.ab_congruence_ok(first, second),
            Side::CD => self.cd_congruence_ok(first, second),
        }
    }

    /// All admissible halves on `side`, optionally restricted to splits of a
    /// parent half at modulus `m / 2`. Each comes with its signature.
    fn halves(&self, side: Side, parent: Option<&ProfileHalf>) -> Vec<(ProfileHalf, Vec<i32>)> {
        let counts = self.counts(side);
        let [(t1, s1), (t2, s2)] = self.totals(side);
        let even = self.m.is_multiple_of(2);
        let max_sq = self.target();
        let gen = |total: i32, star: i32, parent_vec: Option<&Vec<i32>>| -> Vec<(Vec<i32>, i32)> {
            let alt = even.then_some(star);
            match parent_vec {
                Some(pv) => split_vectors(&counts, pv, alt, max_sq),
                None => free_vectors(&counts, total, alt, max_sq),
            }
        };
        let firsts = gen(t1, s1, parent.map(|p| &p.first));
        let mut out = Vec::new();
        let structured = side == Side::AB && self.kind.is_structured();
        if structured {
            for (k, _) in firsts {
                let Some(r) = self.derive_r(&k) else { continue };
                if r.iter().sum::<i32>() != t2 || (even && alt_total(&r) != s2) {
                    continue;
                }
                if let Some(p) = parent {
                    let h = self.m / 2;
                    if (0..h).any(|i| r[i] + r[i + h] != p.second[i]) {
                        continue;
                    }
                }
                let sig = add(&periodic_signature(&k), &periodic_signature(&r));
                if sig[0] > max_sq || !self.half_ok(side, &k, &r) {
                    continue;
                }
                out.push((
                    ProfileHalf {
                        m: self.m,
                        side,
                        first: k,
                        second: r,
                    },
                    sig,
                ));
            }
        } else {
            let mut seconds = gen(t2, s2, parent.map(|p| &p.second));
            seconds.sort_by_key(|(_, sq)| *sq);
            let second_sigs: Vec<Vec<i32>> =
                seconds.iter().map(|(v, _)| periodic_signature(v)).collect();
            for (f, fsq) in &firsts {
                let fsig = periodic_signature(f);
                for ((g, gsq), gsig) in seconds.iter().zip(&second_sigs) {
                    if fsq + gsq > max_sq {
                        break;
                    }
                    if !self.half_ok(side, f, g) {
                        continue;
                    }
                    out.push((
                        ProfileHalf {
                            m: self.m,
                            side,
                            first: f.clone(),
                            second: g.clone(),
                        },
                        add(&fsig, gsig),
                    ));
                }
            }
        }
        out
    }

    fn complement(&self, sig: &[i32]) -> Vec<i32> {
        self.target_sig()
            .iter()
            .zip(sig)
            .map(|(t, x)| t - x)
            .collect()
    }

    fn join_full(
        &self,
        ab: Vec<(ProfileHalf, Vec<i32>)>,
        cd: Vec<(ProfileHalf, Vec<i32>)>,
    ) -> Vec<ResidueProfile> {
        let mut by_sig: HashMap<Vec<i32>, Vec<usize>> = HashMap::new();
        for (i, (_, sig)) in cd.iter().enumerate() {
            by_sig.entry(sig.clone()).or_default().push(i);
        }
        let mut out = Vec::new();
        for (h, sig) in &ab {
            if let Some(ids) = by_sig.get(&self.complement(sig)) {
                for &i in ids {
                    out.push(ResidueProfile::from_halves(h, &cd[i].0));
                }
            }
        }
        out.sort();
        out
    }

    fn join_project(
        &self,
        side: Side,
        ab: Vec<(ProfileHalf, Vec<i32>)>,
        cd: Vec<(ProfileHalf, Vec<i32>)>,
    ) -> Vec<ProfileHalf> {
        let (keep, other) = match side {
            Side::AB => (ab, cd),
            Side::CD => (cd, ab),
        };
        let other_sigs: HashSet<Vec<i32>> = other.into_iter().map(|(_, s)| s).collect();
        let set: BTreeSet<ProfileHalf> = keep
            .into_iter()
            .filter(|(_, sig)| other_sigs.contains(&self.complement(sig)))
            .map(|(h, _)| h)
            .collect();
        set.into_iter().collect()
    }

    fn check(&self, prof: &ResidueProfile) -> Result<()> {
        let fail = |msg: String| Err(Error::Precondition(msg));
        let m = self.m;
        if prof.m != m || [&prof.k, &prof.r, &prof.p, &prof.q].iter().any(|v| v.len() != m) {
            return fail(format!("profile vectors must all have length m = {m}"));
        }
        for (side, vecs) in [(Side::AB, [&prof.k, &prof.r]), (Side::CD, [&prof.p, &prof.q])] {
            let counts = self.counts(side);
            let totals = self.totals(side);
            for (v, (total, star)) in vecs.iter().zip(totals) {
                for (x, c) in v.iter().zip(&counts) {
                    if x.abs() > *c || (x - c).rem_euclid(2) != 0 {
                        return fail(format!("class sum {x} violates bound/parity for size {c}"));
                    }
                }
                if v.iter().sum::<i32>() != total {
                    return fail(format!("class sums do not add up to {total}"));
                }
                if m.is_multiple_of(2) && alt_total(v) != star {
                    return fail(format!("alternated class sums do not add up to {star}"));
                }
            }
        }
        if prof.sum_of_squares() != self.target() {
            return fail(format!(
                "sum of squares {} differs from 4n+2 = {}",
                prof.sum_of_squares(),
                self.target()
            ));
        }
        if prof.pairing_sums().iter().any(|&x| x != 0) {
            return fail("periodic pairing sums do not vanish".into());
        }
        if !self.ab_congruence_ok(&prof.k, &prof.r) || !self.cd_congruence_ok(&prof.p, &prof.q) {
            return fail("mod-4 class congruence fails".into());
        }
        if self.kind.is_structured() && self.derive_r(&prof.k).as_ref() != Some(&prof.r) {
            return fail(format!("r is not the {} image of k", self.kind));
        }
        Ok(())
    }
}

/// Vectors with per-class `|v_i| <= c_i`, `v_i ≡ c_i (mod 2)`, `Σ v = total`,
/// optional alternated total, and `Σ v² <= max_sq`.
fn free_vectors(counts: &[i32], total: i32, alt: Option<i32>, max_sq: i32) -> Vec<(Vec<i32>, i32)> {
    let m = counts.len();
    // suffix capacities for pruning
    let mut rest = vec![0; m + 1];
    for i in (0..m).rev() {
        rest[i] = rest[i + 1] + counts[i];
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        counts: &[i32],
        rest: &[i32],
        total: i32,
        alt: Option<i32>,
        max_sq: i32,
        sum: i32,
        asum: i32,
        sq: i32,
        cur: &mut Vec<i32>,
        out: &mut Vec<(Vec<i32>, i32)>,
    ) {
        let m = counts.len();
        if i == m {
            if sum == total && alt.is_none_or(|a| a == asum) {
                out.push((cur.clone(), sq));
            }
            return;
        }
        let c = counts[i];
        let sign = if i.is_multiple_of(2) { 1 } else { -1 };
        let mut v = -c;
        while v <= c {
            let ns = sum + v;
            let na = asum + sign * v;
            let nsq = sq + v * v;
            if nsq <= max_sq
                && (total - ns).abs() <= rest[i + 1]
                && alt.is_none_or(|a| (a - na).abs() <= rest[i + 1])
            {
                cur.push(v);
                rec(i + 1, counts, rest, total, alt, max_sq, ns, na, nsq, cur, out);
                cur.pop();
            }
            v += 2;
        }
    }
    rec(0, counts, &rest, total, alt, max_sq, 0, 0, 0, &mut cur, &mut out);
    out
}

/// Splits of a parent vector at modulus `m/2` into vectors at modulus `m`
/// (`v_i + v_{i+m/2} = parent_i`).
fn split_vectors(counts: &[i32], parent: &[i32], alt: Option<i32>, max_sq: i32) -> Vec<(Vec<i32>, i32)> {
    let m = counts.len();
    let h = parent.len();
    debug_assert_eq!(2 * h, m);
    let options: Vec<Vec<(i32, i32)>> = (0..h)
        .map(|i| {
            let (c1, c2) = (counts[i], counts[i + h]);
            let mut o = Vec::new();
            let mut v = -c1;
            while v <= c1 {
                let w = parent[i] - v;
                if w.abs() <= c2 && (w - c2).rem_euclid(2) == 0 {
                    o.push((v, w));
                }
                v += 2;
            }
            o
        })
        .collect();
    // the sign pattern of position i and i+h agree when h is even
    let sign_of = |i: usize| if i.is_multiple_of(2) { 1 } else { -1 };
    let mut out = Vec::new();
    let mut cur = vec![0; m];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        h: usize,
        options: &[Vec<(i32, i32)>],
        sign_of: &dyn Fn(usize) -> i32,
        alt: Option<i32>,
        max_sq: i32,
        asum: i32,
        sq: i32,
        cur: &mut Vec<i32>,
        out: &mut Vec<(Vec<i32>, i32)>,
    ) {
        if i == h {
            if alt.is_none_or(|a| a == asum) {
                out.push((cur.clone(), sq));
            }
            return;
        }
        for &(v, w) in &options[i] {
            let nsq = sq + v * v + w * w;
            if nsq > max_sq {
                continue;
            }
            cur[i] = v;
            cur[i + h] = w;
            let na = asum + sign_of(i) * v + sign_of(i + h) * w;
            rec(i + 1, h, options, sign_of, alt, max_sq, na, nsq, cur, out);
        }
    }
    rec(0, h, &options, &sign_of, alt, max_sq, 0, 0, &mut cur, &mut out);
    out
}

/// All full residue profiles at modulus `m` compatible with the sums `s`.
pub fn residue_profiles(
    n: usize,
    m: usize,
    s: SumProfile,
    kind: Kind,
) -> Result<Vec<ResidueProfile>> {
    let ctx = Ctx::new(n, m, s, kind)?;
    let ab = ctx.halves(Side::AB, None);
    let cd = ctx.halves(Side::CD, None);
    Ok(ctx.join_full(ab, cd))
}

/// Halves on `side` at modulus `m` for which some compatible opposite half
/// exists.
pub fn residue_halves(
    n: usize,
    m: usize,
    s: SumProfile,
    kind: Kind,
    side: Side,
) -> Result<Vec<ProfileHalf>> {
    let ctx = Ctx::new(n, m, s, kind)?;
    let ab = ctx.halves(Side::AB, None);
    let cd = ctx.halves(Side::CD, None);
    Ok(ctx.join_project(side, ab, cd))
}

/// Validates `prof` against every residue-level constraint.
pub fn check_profile(n: usize, prof: &ResidueProfile, s: SumProfile, kind: Kind) -> Result<()> {
    Ctx::new(n, prof.m, s, kind)?.check(prof)
}

fn refine_ctx(n: usize, prof: &ResidueProfile, s: SumProfile, kind: Kind) -> Result<Ctx> {
    check_profile(n, prof, s, kind)?;
    Ctx::new(n, 2 * prof.m, s, kind)
}

/// All profiles at modulus `2m` whose coarsening is `prof`.
pub fn refine_profiles(
    n: usize,
    prof: &ResidueProfile,
    s: SumProfile,
    kind: Kind,
) -> Result<Vec<ResidueProfile>> {
    let ctx = refine_ctx(n, prof, s, kind)?;
    let ab = ctx.halves(Side::AB, Some(&prof.half(Side::AB)));
    let cd = ctx.halves(Side::CD, Some(&prof.half(Side::CD)));
    Ok(ctx.join_full(ab, cd))
}

/// Projection of [`refine_profiles`] onto `side`.
pub fn refine_halves(
    n: usize,
    prof: &ResidueProfile,
    s: SumProfile,
    kind: Kind,
    side: Side,
) -> Result<Vec<ProfileHalf>> {
    refine_halves_multi(n, std::slice::from_ref(prof), s, kind, side)
}

/// Projection onto `side` of the refinements of several parents that share
/// the same `side` half. Parents are validated individually.
pub fn refine_halves_multi(
    n: usize,
    parents: &[ResidueProfile],
    s: SumProfile,
    kind: Kind,
    side: Side,
) -> Result<Vec<ProfileHalf>> {
    let Some(first) = parents.first() else {
        return Ok(Vec::new());
    };
    let ctx = refine_ctx(n, first, s, kind)?;
    for p in &parents[1..] {
        check_profile(n, p, s, kind)?;
        if p.half(side) != first.half(side) {
            return Err(Error::Precondition(
                "parents must share the projected half".into(),
            ));
        }
    }
    let keep = ctx.halves(side, Some(&first.half(side)));
    let mut other_sigs: HashSet<Vec<i32>> = HashSet::new();
    let mut seen_other: HashSet<ProfileHalf> = HashSet::new();
    for p in parents {
        let oh = p.half(side.other());
        if !seen_other.insert(oh.clone()) {
            continue;
        }
        other_sigs.extend(ctx.halves(side.other(), Some(&oh)).into_iter().map(|(_, s)| s));
    }
    let set: BTreeSet<ProfileHalf> = keep
        .into_iter()
        .filter(|(_, sig)| other_sigs.contains(&ctx.complement(sig)))
        .map(|(h, _)| h)
        .collect();
    Ok(set.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_helpers() {
        assert_eq!(class_of(1, 3), 1);
        assert_eq!(class_of(3, 3), 3);
        assert_eq!(class_of(4, 3), 1);
        assert_eq!(class_of(0, 3), 3);
        assert_eq!(class_count(7, 1, 3), 3);
        assert_eq!(class_count(7, 3, 3), 2);
        assert_eq!(class_count(2, 5, 6), 0);
    }

    #[test]
    fn n1_m2_all_satisfy_identity() {
        // A,B length 2; C,D length 1
        let s = SumProfile::from_array([2, 0, 1, 1, 0, 2, 1, 1]);
        let profs = residue_profiles(1, 2, s, Kind::Bs).unwrap();
        assert!(!profs.is_empty());
        for p in &profs {
            assert_eq!(p.sum_of_squares(), 6);
            assert_eq!(p.k, vec![1, 1]);
            assert!(p.pairing_sums().iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn bounds_are_enforced() {
        let s = SumProfile::from_array([2, 0, 1, 1, 0, 2, 1, 1]);
        for m in 2..=4 {
            for p in residue_profiles(1, m, s, Kind::Bs).unwrap() {
                for (i, x) in p.k.iter().enumerate() {
                    assert!(x.unsigned_abs() as usize <= class_count(2, i + 1, m));
                }
            }
        }
    }

    #[test]
    fn nns_needs_even_modulus() {
        let s = SumProfile::from_array([3, -1, 0, 0, 1, 1, 2, 2]);
        assert!(matches!(
            residue_profiles(2, 3, s, Kind::Nns),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn refine_rejects_infeasible_parent() {
        let s = SumProfile::from_array([2, 0, 1, 1, 0, 2, 1, 1]);
        let bad = ResidueProfile {
            m: 2,
            k: vec![1, 1],
            r: vec![1, -1],
            p: vec![1, 0],
            q: vec![-1, 0],
        };
        assert!(matches!(
            refine_profiles(1, &bad, s, Kind::Bs),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn text_round_trip() {
        let p = ResidueProfile {
            m: 2,
            k: vec![1, -1],
            r: vec![3, 0],
            p: vec![0, 0],
            q: vec![-2, 2],
        };
        assert_eq!(p.to_string(), "2,1,-1,3,0,0,0,-2,2");
        assert_eq!(p.to_string().parse::<ResidueProfile>().unwrap(), p);
        let h = p.half(Side::CD);
        assert_eq!(h.to_string().parse::<ProfileHalf>().unwrap(), h);
    }
}
