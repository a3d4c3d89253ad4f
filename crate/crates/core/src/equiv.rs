//! Equivalence transformations on quads, orbit closure, canonical forms and
//! deduplication.
//!
//! Generators per family:
//!
//! * BS: negate or reverse any sequence, interchange `A,B` or `C,D`,
//!   alternate all four, and the `C,D` column swap.
//! * NNS: negate/reverse/interchange `C,D`, negate-and-interchange `A,B`,
//!   alternate all four.
//! * NS: negate/reverse/interchange `C,D`, plus the bar, hat and star
//!   replacements of `A`.
//!
//! All orbit work happens on [`PackedQuad`]; the canonical form is the
//! lexicographically least member with `+1 < -1`.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::quad::{Kind, SeqQuad, SumProfile};
use crate::seq::{alt_mask, low_mask, PackedSeq};

pub const DEFAULT_ORBIT_CAP: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    A,
    B,
    C,
    D,
}

impl Which {
    fn index(self) -> usize {
        match self {
            Which::A => 0,
            Which::B => 1,
            Which::C => 2,
            Which::D => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transform {
    NegateSeq(Which),
    ReverseSeq(Which),
    SwapAB,
    SwapCD,
    AlternateAll,
    /// Every `C,D` block on columns `i, n+1-i` of the form `(1,-1;-1,1)` or
    /// `(-1,1;1,-1)` is replaced by the other form, all at once.
    ColumnSwapCD,
    NsBar,
    NsHat,
    NsStar,
}

/// Bit-packed quad used for orbit enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PackedQuad {
    pub n: u32,
    pub kind: Kind,
    pub seqs: [PackedSeq; 4],
}

impl PackedQuad {
    pub fn from_quad(q: &SeqQuad) -> Result<Self> {
        Ok(PackedQuad {
            n: q.n() as u32,
            kind: q.kind,
            seqs: [q.a.packed()?, q.b.packed()?, q.c.packed()?, q.d.packed()?],
        })
    }

    pub fn to_quad(&self) -> SeqQuad {
        SeqQuad::new(
            self.kind,
            self.seqs[0].to_seq(),
            self.seqs[1].to_seq(),
            self.seqs[2].to_seq(),
            self.seqs[3].to_seq(),
        )
        .expect("packed quad keeps consistent lengths")
    }

    /// Key for the canonical total order.
    pub fn lex_key(&self) -> [u64; 4] {
        [
            self.seqs[0].lex_key(),
            self.seqs[1].lex_key(),
            self.seqs[2].lex_key(),
            self.seqs[3].lex_key(),
        ]
    }

    /// Free part `x = (a_1..a_n)` of a structured quad.
    fn free_part(&self) -> u64 {
        self.seqs[0].bits & low_mask(self.n)
    }

    fn rebuild_structured(&mut self, x: u64) {
        let n = self.n;
        let x = x & low_mask(n);
        let b = match self.kind {
            Kind::Nns => x ^ alt_mask(n),
            _ => x,
        } | (1u64 << n);
        self.seqs[0] = PackedSeq::from_bits(x, n + 1);
        self.seqs[1] = PackedSeq::from_bits(b, n + 1);
    }

    pub fn is_structured_ok(&self) -> bool {
        if !self.kind.is_structured() {
            return true;
        }
        let mut probe = *self;
        probe.rebuild_structured(self.free_part());
        probe.seqs[0] == self.seqs[0] && probe.seqs[1] == self.seqs[1]
    }

    fn column_block_matches(&self, i: usize) -> bool {
        let n = self.n as usize;
        if i == 0 || i > n / 2 {
            return false;
        }
        let (p, q) = ((i - 1) as u32, (n - i) as u32);
        let c = &self.seqs[2];
        let d = &self.seqs[3];
        let (cp, cq, dp, dq) = (c.get(p), c.get(q), d.get(p), d.get(q));
        cp == -cq && dp == -dq && cp == -dp
    }

    fn column_swap_mask(&self) -> u64 {
        let n = self.n as usize;
        (1..=n / 2)
            .filter(|&i| self.column_block_matches(i))
            .fold(0, |m, i| m | 1u64 << (i - 1) | 1u64 << (n - i))
    }

    /// Applies `t` without checking that the result keeps the NS/NNS form.
    fn apply_raw(&self, t: Transform) -> Result<PackedQuad> {
        let mut out = *self;
        match t {
            Transform::NegateSeq(w) => out.seqs[w.index()] = self.seqs[w.index()].negated(),
            Transform::ReverseSeq(w) => out.seqs[w.index()] = self.seqs[w.index()].reversed(),
            Transform::SwapAB => out.seqs.swap(0, 1),
            Transform::SwapCD => out.seqs.swap(2, 3),
            Transform::AlternateAll => {
                for s in out.seqs.iter_mut() {
                    *s = s.alternated();
                }
            }
            Transform::ColumnSwapCD => {
                let mask = self.column_swap_mask();
                if mask == 0 {
                    return Err(Error::Inapplicable("no C,D block has a swappable pattern".into()));
                }
                out.seqs[2] = PackedSeq::from_bits(self.seqs[2].bits ^ mask, self.n);
                out.seqs[3] = PackedSeq::from_bits(self.seqs[3].bits ^ mask, self.n);
            }
            Transform::NsBar | Transform::NsHat | Transform::NsStar => {
                if !self.kind.is_structured() {
                    return Err(Error::Inapplicable(format!(
                        "{t:?} applies only to NS/NNS quads"
                    )));
                }
                let n = self.n;
                let x = PackedSeq::from_bits(self.free_part(), n);
                let nx = match (t, self.kind) {
                    (Transform::NsBar, Kind::Ns) => x.negated(),
                    // -a_1, a_2, -a_3, ...: flip the odd 1-based positions.
                    (Transform::NsBar, _) => {
                        PackedSeq::from_bits(x.bits ^ (!alt_mask(n) & low_mask(n)), n)
                    }
                    (Transform::NsHat, Kind::Ns) => x.reversed(),
                    (Transform::NsHat, _) => reverse_odd_positions(x),
                    (Transform::NsStar, _) => x.alternated(),
                    _ => unreachable!(),
                };
                out.rebuild_structured(nx.bits);
                if t == Transform::NsStar {
                    out.seqs[2] = self.seqs[2].alternated();
                    out.seqs[3] = self.seqs[3].alternated();
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, t: Transform) -> Result<PackedQuad> {
        let out = self.apply_raw(t)?;
        if !out.is_structured_ok() {
            return Err(Error::Inapplicable(format!(
                "{t:?} breaks the {} coupling",
                self.kind
            )));
        }
        Ok(out)
    }

    fn generators(&self) -> Vec<Transform> {
        use Transform::*;
        let cd = [
            NegateSeq(Which::C),
            NegateSeq(Which::D),
            ReverseSeq(Which::C),
            ReverseSeq(Which::D),
            SwapCD,
        ];
        let mut g: Vec<Transform> = cd.to_vec();
        match self.kind {
            Kind::Bs => {
                g.extend([
                    NegateSeq(Which::A),
                    NegateSeq(Which::B),
                    ReverseSeq(Which::A),
                    ReverseSeq(Which::B),
                    SwapAB,
                    AlternateAll,
                ]);
                if self.column_swap_mask() != 0 {
                    g.push(ColumnSwapCD);
                }
            }
            Kind::Nns => g.extend([NsBar, AlternateAll]),
            Kind::Ns => g.extend([NsBar, NsHat, NsStar]),
        }
        g
    }
}

/// Reverses the elements at 1-based odd positions among themselves.
fn reverse_odd_positions(x: PackedSeq) -> PackedSeq {
    let n = x.len;
    let odd: Vec<u32> = (0..n).step_by(2).collect();
    let mut bits = x.bits;
    for (t, &pos) in odd.iter().enumerate() {
        let src = odd[odd.len() - 1 - t];
        bits = (bits & !(1 << pos)) | (((x.bits >> src) & 1) << pos);
    }
    PackedSeq::from_bits(bits, n)
}

pub fn apply(q: &SeqQuad, t: Transform) -> Result<SeqQuad> {
    Ok(PackedQuad::from_quad(q)?.apply(t)?.to_quad())
}

/// Result of an orbit closure that may have hit the member cap.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub members: Vec<SeqQuad>,
    pub truncated: bool,
}

fn retag(q: &SeqQuad, rules: Kind) -> Result<PackedQuad> {
    let mut p = PackedQuad::from_quad(q)?;
    if rules == Kind::Nns && p.n % 2 == 1 {
        return Err(Error::Malformed(format!("NNS({}) requires even n", p.n)));
    }
    p.kind = rules;
    if !p.is_structured_ok() {
        return Err(Error::Precondition(format!(
            "quad does not have the {rules} structure"
        )));
    }
    Ok(p)
}

/// Breadth-first closure. Returns the members found and whether the cap cut
/// the search short.
fn closure(start: PackedQuad, cap: usize) -> (Vec<PackedQuad>, bool) {
    let mut seen: HashSet<PackedQuad> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(start);
    order.push(start);
    queue.push_back(start);
    while let Some(cur) = queue.pop_front() {
        for t in cur.generators() {
            let Ok(next) = cur.apply(t) else { continue };
            if seen.insert(next) {
                if order.len() >= cap {
                    return (order, true);
                }
                order.push(next);
                queue.push_back(next);
            }
        }
    }
    (order, false)
}

pub fn orbit_partial(q: &SeqQuad, rules: Kind, cap: usize) -> Result<Orbit> {
    let (members, truncated) = closure(retag(q, rules)?, cap);
    let mut members: Vec<PackedQuad> = members;
    members.sort_by_key(|p| p.lex_key());
    Ok(Orbit {
        members: members.iter().map(|p| p.to_quad()).collect(),
        truncated,
    })
}

/// All quads reachable from `q` under the generators of `rules`, sorted in
/// the canonical order.
pub fn orbit(q: &SeqQuad, rules: Kind) -> Result<Vec<SeqQuad>> {
    orbit_with_cap(q, rules, DEFAULT_ORBIT_CAP)
}

pub fn orbit_with_cap(q: &SeqQuad, rules: Kind, cap: usize) -> Result<Vec<SeqQuad>> {
    let o = orbit_partial(q, rules, cap)?;
    if o.truncated {
        return Err(Error::Resource(format!(
            "orbit exceeds {cap} members ({} collected)",
            o.members.len()
        )));
    }
    Ok(o.members)
}

pub fn canonical(q: &SeqQuad, rules: Kind) -> Result<SeqQuad> {
    let (members, truncated) = closure(retag(q, rules)?, DEFAULT_ORBIT_CAP);
    if truncated {
        return Err(Error::Resource(format!(
            "orbit exceeds {DEFAULT_ORBIT_CAP} members"
        )));
    }
    Ok(members
        .iter()
        .min_by_key(|p| p.lex_key())
        .expect("orbit contains its seed")
        .to_quad())
}

/// Memoising canonicaliser: every member of a computed orbit is remembered,
/// so closed inputs (like brute-force output) cost one closure per class.
#[derive(Default)]
pub struct Canonicalizer {
    memo: HashMap<PackedQuad, PackedQuad>,
    cap: usize,
}

impl Canonicalizer {
    pub fn new() -> Self {
        Canonicalizer {
            memo: HashMap::new(),
            cap: DEFAULT_ORBIT_CAP,
        }
    }

    pub fn canonical_packed(&mut self, p: PackedQuad) -> Result<PackedQuad> {
        if let Some(c) = self.memo.get(&p) {
            return Ok(*c);
        }
        let (members, truncated) = closure(p, self.cap);
        if truncated {
            return Err(Error::Resource(format!("orbit exceeds {} members", self.cap)));
        }
        let best = *members.iter().min_by_key(|m| m.lex_key()).unwrap();
        for m in members {
            self.memo.insert(m, best);
        }
        Ok(best)
    }

    pub fn canonical(&mut self, q: &SeqQuad, rules: Kind) -> Result<SeqQuad> {
        Ok(self.canonical_packed(retag(q, rules)?)?.to_quad())
    }
}

/// One canonical representative per class, sorted in the canonical order.
pub fn dedup(quads: &[SeqQuad], kind: Kind) -> Result<Vec<SeqQuad>> {
    let Some(first) = quads.first() else {
        return Ok(Vec::new());
    };
    let n = first.n();
    if let Some(bad) = quads.iter().find(|q| q.n() != n || q.kind != kind) {
        return Err(Error::Malformed(format!(
            "dedup needs a uniform list: expected {kind}({n}), found {}({})",
            bad.kind,
            bad.n()
        )));
    }
    let mut canon = Canonicalizer::new();
    let mut reps: HashSet<PackedQuad> = HashSet::new();
    for q in quads {
        reps.insert(canon.canonical_packed(retag(q, kind)?)?);
    }
    let mut reps: Vec<PackedQuad> = reps.into_iter().collect();
    reps.sort_by_key(|p| p.lex_key());
    Ok(reps.iter().map(|p| p.to_quad()).collect())
}

/// Images of a sum profile under the sum-level action of the family's
/// transformations, as signed permutations of the eight sums.
///
/// For BS the action is that of negation, reversal, interchange of `A,B` or
/// `C,D`, and alternation (the column swap has no signed-permutation
/// image and is left out). For NS and NNS it is the five-item list used for
/// near-normal sums (negate/reverse/interchange `C,D`, negate-and-interchange
/// `A,B`, alternate all) together with the interchange of `A,B`, which is
/// the sum-level image of the normal-sequence star replacement for odd `n`.
pub fn sum_profile_orbit(n: usize, kind: Kind, s: SumProfile) -> Vec<SumProfile> {
    let mut seen: HashSet<[i32; 8]> = HashSet::new();
    let mut stack = vec![s.to_array()];
    seen.insert(s.to_array());
    // reversal of a length-L sequence multiplies its alternated sum by (-1)^(L-1)
    let rev_ab = if n.is_multiple_of(2) { 1 } else { -1 };
    let rev_cd = -rev_ab;
    while let Some(x) = stack.pop() {
        let [a, b, c, d, sa, sb, sc, sd] = x;
        let mut imgs = vec![
            [a, b, -c, d, sa, sb, -sc, sd],
            [a, b, c, -d, sa, sb, sc, -sd],
            [a, b, c, d, sa, sb, rev_cd * sc, sd],
            [a, b, c, d, sa, sb, sc, rev_cd * sd],
            [a, b, d, c, sa, sb, sd, sc],
            [sa, sb, sc, sd, a, b, c, d],
            [b, a, c, d, sb, sa, sc, sd],
        ];
        match kind {
            Kind::Bs => imgs.extend([
                [-a, b, c, d, -sa, sb, sc, sd],
                [a, -b, c, d, sa, -sb, sc, sd],
                [a, b, c, d, rev_ab * sa, sb, sc, sd],
                [a, b, c, d, sa, rev_ab * sb, sc, sd],
            ]),
            Kind::Ns | Kind::Nns => imgs.push([-b, -a, c, d, -sb, -sa, sc, sd]),
        }
        for y in imgs {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    let mut out: Vec<SumProfile> = seen.into_iter().map(SumProfile::from_array).collect();
    out.sort();
    out
}

/// An equivalent quad whose row sums are exactly `target`, if one is reachable
/// without column swaps. Used to move a known quad onto the representative
/// sum profile that the search enumerates.
pub fn with_sum_profile(q: &SeqQuad, rules: Kind, target: SumProfile) -> Result<Option<SeqQuad>> {
    let start = retag(q, rules)?;
    let mut seen: HashSet<PackedQuad> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut hits = Vec::new();
    while let Some(cur) = queue.pop_front() {
        let quad = cur.to_quad();
        if crate::quad::row_sums(&quad) == target {
            hits.push(cur);
        }
        for t in cur.generators() {
            if matches!(t, Transform::ColumnSwapCD) {
                continue;
            }
            let Ok(next) = cur.apply(t) else { continue };
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    Ok(hits.into_iter().min_by_key(|p| p.lex_key()).map(|p| p.to_quad()))
}

/// Element-wise order key (`+1 -> 0`, `-1 -> 1`) of the concatenation `A B C D`.
pub fn lex_cmp_key(q: &SeqQuad) -> Vec<i8> {
    let mut v = Vec::with_capacity(4 * q.n() + 2);
    for s in q.seqs() {
        v.extend(s.as_slice().iter().map(|&x| if x == 1 { 0 } else { 1 }));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::verify;

    fn quad(a: &str, b: &str, c: &str, d: &str, kind: Kind) -> SeqQuad {
        SeqQuad::new(
            kind,
            a.parse().unwrap(),
            b.parse().unwrap(),
            c.parse().unwrap(),
            d.parse().unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn alternate_twice_is_identity() {
        let q = quad("++-", "+-+", "+-", "--", Kind::Bs);
        let once = apply(&q, Transform::AlternateAll).unwrap();
        assert_ne!(once, q);
        assert_eq!(apply(&once, Transform::AlternateAll).unwrap(), q);
    }

    #[test]
    fn column_swap_pattern() {
        // n = 4, block at columns 1 and 4: (c1, c4; d1, d4) = (+, -; -, +)
        let q = quad("+++++", "+++++", "+++-", "-+++", Kind::Bs);
        let r = apply(&q, Transform::ColumnSwapCD).unwrap();
        assert_eq!(r.c.to_string(), "-+++");
        assert_eq!(r.d.to_string(), "+++-");
        assert_eq!(apply(&r, Transform::ColumnSwapCD).unwrap(), q);
        // blocks 1 and 2 both match and swap together
        let q = quad("+++++", "+++++", "++--", "--++", Kind::Bs);
        let r = apply(&q, Transform::ColumnSwapCD).unwrap();
        assert_eq!(r.c.to_string(), "--++");
        assert_eq!(r.d.to_string(), "++--");
        let none = quad("+++++", "+++++", "++++", "++++", Kind::Bs);
        assert!(matches!(
            apply(&none, Transform::ColumnSwapCD),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn ns_transforms_need_structured_kind() {
        let q = quad("++", "+-", "+", "+", Kind::Bs);
        assert!(matches!(
            apply(&q, Transform::NsBar),
            Err(Error::Inapplicable(_))
        ));
        let ns = q.clone().with_kind(Kind::Ns).unwrap();
        let r = apply(&ns, Transform::NsBar).unwrap();
        assert_eq!(r.a.to_string(), "-+");
        assert_eq!(r.b.to_string(), "--");
        // negating A alone breaks the NS form
        assert!(apply(&ns, Transform::NegateSeq(Which::A)).is_err());
    }

    #[test]
    fn n0_orbit() {
        let q = quad("+", "+", "", "", Kind::Bs);
        let o = orbit(&q, Kind::Bs).unwrap();
        let got: Vec<String> = o.iter().map(|q| format!("{}{}", q.a, q.b)).collect();
        assert_eq!(got, vec!["++", "+-", "-+", "--"]);
    }

    #[test]
    fn canonical_examples() {
        let q = quad("++", "+-", "+", "-", Kind::Bs);
        assert!(verify(&q).valid);
        let c = canonical(&q, Kind::Bs).unwrap();
        assert_eq!(c, canonical(&apply(&q, Transform::SwapCD).unwrap(), Kind::Bs).unwrap());
        assert_eq!(canonical(&c, Kind::Bs).unwrap(), c);
        assert_eq!(dedup(&[q.clone(), apply(&q, Transform::SwapCD).unwrap()], Kind::Bs).unwrap(), vec![c]);
        assert!(dedup(&[], Kind::Bs).unwrap().is_empty());
    }

    #[test]
    fn dedup_rejects_mixed_lists() {
        let a = quad("++", "+-", "+", "+", Kind::Bs);
        let b = quad("+", "+", "", "", Kind::Bs);
        assert!(matches!(dedup(&[a, b], Kind::Bs), Err(Error::Malformed(_))));
    }

    #[test]
    fn orbit_cap_reports_partial() {
        let q = quad("++", "+-", "+", "+", Kind::Bs);
        let o = orbit_partial(&q, Kind::Bs, 3).unwrap();
        assert!(o.truncated);
        assert_eq!(o.members.len(), 3);
        assert!(matches!(orbit_with_cap(&q, Kind::Bs, 3), Err(Error::Resource(_))));
    }

    #[test]
    fn lex_key_matches_element_order() {
        let a = quad("+-", "++", "+", "+", Kind::Bs);
        let b = quad("-+", "++", "+", "+", Kind::Bs);
        let pa = PackedQuad::from_quad(&a).unwrap();
        let pb = PackedQuad::from_quad(&b).unwrap();
        assert!(pa.lex_key() < pb.lex_key());
        assert!(lex_cmp_key(&a) < lex_cmp_key(&b));
    }

    #[test]
    fn sum_orbit_swaps_starred() {
        let s = SumProfile::from_array([3, -5, 6, 10, -3, 1, 4, 12]);
        let o = sum_profile_orbit(42, Kind::Nns, s);
        assert!(o.contains(&SumProfile::from_array([-3, 1, 4, 12, 3, -5, 6, 10])));
        assert!(o.contains(&SumProfile::from_array([5, -3, 6, 10, -1, 3, 4, 12])));
        // C sum and C* sign are independent for even n
        assert!(o.contains(&SumProfile::from_array([3, -5, 6, 10, -3, 1, -4, 12])));
        assert!(!o.contains(&SumProfile::from_array([3, -5, 6, 10, -3, 1, 12, 4])));
    }
}
