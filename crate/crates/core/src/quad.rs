//! Quadruples `(A; B; C; D)` of lengths `n+1, n+1, n, n`, their sum
//! profiles, and the validity check for the BS / NS / NNS families.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::SignSeq;

/// Which family a quad claims to belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    /// Base sequences `BS(n+1, n)`.
    Bs,
    /// Normal sequences: `b_i = a_i` for `i <= n`.
    Ns,
    /// Near-normal sequences (even `n`): `b_i = (-1)^(i-1) a_i` for `i <= n`.
    Nns,
}

impl Kind {
    pub fn is_structured(self) -> bool {
        !matches!(self, Kind::Bs)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Bs => "bs",
            Kind::Ns => "ns",
            Kind::Nns => "nns",
        }
    }

    /// The `B` that the structural coupling forces for a given `A`.
    /// Returns `None` for plain base sequences.
    pub fn coupled_b(self, a: &[i8]) -> Option<Vec<i8>> {
        let n = a.len().checked_sub(1)?;
        match self {
            Kind::Bs => None,
            Kind::Ns => {
                let mut b = a[..n].to_vec();
                b.push(-1);
                Some(b)
            }
            Kind::Nns => {
                let mut b: Vec<i8> = a[..n]
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| if i % 2 == 0 { x } else { -x })
                    .collect();
                b.push(-1);
                Some(b)
            }
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bs" => Ok(Kind::Bs),
            "ns" => Ok(Kind::Ns),
            "nns" => Ok(Kind::Nns),
            other => Err(Error::Malformed(format!("unknown kind {other:?}"))),
        }
    }
}

/// Four sign sequences with a family tag.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SeqQuad {
    pub a: SignSeq,
    pub b: SignSeq,
    pub c: SignSeq,
    pub d: SignSeq,
    pub kind: Kind,
    n: usize,
}

impl SeqQuad {
    pub fn new(kind: Kind, a: SignSeq, b: SignSeq, c: SignSeq, d: SignSeq) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Malformed(format!(
                "|A| = {} but |B| = {}",
                a.len(),
                b.len()
            )));
        }
        if c.len() != d.len() {
            return Err(Error::Malformed(format!(
                "|C| = {} but |D| = {}",
                c.len(),
                d.len()
            )));
        }
        if a.len() != c.len() + 1 {
            return Err(Error::Malformed(format!(
                "|A| = {} must equal |C| + 1 = {}",
                a.len(),
                c.len() + 1
            )));
        }
        let n = c.len();
        if kind == Kind::Nns && n % 2 == 1 {
            return Err(Error::Malformed(format!("NNS({n}) requires even n")));
        }
        Ok(SeqQuad { a, b, c, d, kind, n })
    }

    /// Builds an NS/NNS quad from the free part `x` of `A` (length `n`):
    /// `A = x, +1` and `B` follows from the coupling.
    pub fn structured(kind: Kind, x: &SignSeq, c: SignSeq, d: SignSeq) -> Result<Self> {
        if !kind.is_structured() {
            return Err(Error::Precondition("structured() needs NS or NNS".into()));
        }
        let mut a = x.as_slice().to_vec();
        a.push(1);
        let b = kind.coupled_b(&a).expect("structured kind");
        SeqQuad::new(
            kind,
            SignSeq::from_vec_unchecked(a),
            SignSeq::from_vec_unchecked(b),
            c,
            d,
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn with_kind(mut self, kind: Kind) -> Result<Self> {
        if kind == Kind::Nns && self.n % 2 == 1 {
            return Err(Error::Malformed(format!("NNS({}) requires even n", self.n)));
        }
        self.kind = kind;
        Ok(self)
    }

    pub fn seqs(&self) -> [&SignSeq; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// `N_A(s) + N_B(s) + N_C(s) + N_D(s)`.
    pub fn total_paf(&self, s: usize) -> i32 {
        self.seqs().iter().map(|x| x.paf(s)).sum()
    }

    pub fn total_hall(&self, theta: f64) -> f64 {
        self.seqs().iter().map(|x| x.hall_f(theta)).sum()
    }

    /// Describes the first violation of the NS/NNS coupling, if any.
    pub fn structural_violation(&self) -> Option<String> {
        if !self.kind.is_structured() {
            return None;
        }
        let a = self.a.as_slice();
        let b = self.b.as_slice();
        let n = self.n;
        if a[n] != 1 {
            return Some(format!("a_{} must be +1", n + 1));
        }
        if b[n] != -1 {
            return Some(format!("b_{} must be -1", n + 1));
        }
        let want = self.kind.coupled_b(a).expect("structured kind");
        if let Some(i) = (0..n).find(|&i| want[i] != b[i]) {
            let rule = match self.kind {
                Kind::Ns => "b_i = a_i",
                _ => "b_i = (-1)^(i-1) a_i",
            };
            return Some(format!("{rule} fails at i = {}", i + 1));
        }
        None
    }

    /// Quad text form: labelled lines `X=`, `Y=`, `Z=`, `W=`.
    pub fn to_text(&self) -> String {
        format!(
            "X={}\nY={}\nZ={}\nW={}\n",
            self.a, self.b, self.c, self.d
        )
    }
}

/// The eight sums `(a, b, c, d, a*, b*, c*, d*)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SumProfile {
    pub a: i32,
    pub b: i32,
    pub c: i32,
    pub d: i32,
    pub a_star: i32,
    pub b_star: i32,
    pub c_star: i32,
    pub d_star: i32,
}

impl SumProfile {
    pub fn from_array(v: [i32; 8]) -> Self {
        SumProfile {
            a: v[0],
            b: v[1],
            c: v[2],
            d: v[3],
            a_star: v[4],
            b_star: v[5],
            c_star: v[6],
            d_star: v[7],
        }
    }

    pub fn to_array(self) -> [i32; 8] {
        [
            self.a,
            self.b,
            self.c,
            self.d,
            self.a_star,
            self.b_star,
            self.c_star,
            self.d_star,
        ]
    }

    pub fn plain(&self) -> [i32; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn starred(&self) -> [i32; 4] {
        [self.a_star, self.b_star, self.c_star, self.d_star]
    }
}

impl fmt::Display for SumProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_array();
        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for SumProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<i32> = s
            .split([',', '|', ' '])
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.trim()
                    .parse::<i32>()
                    .map_err(|e| Error::Malformed(format!("bad sum {t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        let arr: [i32; 8] = v
            .try_into()
            .map_err(|v: Vec<i32>| Error::Malformed(format!("expected 8 sums, got {}", v.len())))?;
        Ok(SumProfile::from_array(arr))
    }
}

pub fn row_sums(q: &SeqQuad) -> SumProfile {
    SumProfile {
        a: q.a.sum(),
        b: q.b.sum(),
        c: q.c.sum(),
        d: q.d.sum(),
        a_star: q.a.alt_sum(),
        b_star: q.b.alt_sum(),
        c_star: q.c.alt_sum(),
        d_star: q.d.alt_sum(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub valid: bool,
    pub first_failing_shift: Option<usize>,
    pub structural_violation: Option<String>,
    pub sums: SumProfile,
}

/// Checks zero total autocorrelation at every shift `1..=n` and, for NS/NNS,
/// the structural coupling between `A` and `B`.
pub fn verify(q: &SeqQuad) -> VerifyReport {
    let first_failing_shift = (1..=q.n()).find(|&s| q.total_paf(s) != 0);
    let structural_violation = q.structural_violation();
    VerifyReport {
        valid: first_failing_shift.is_none() && structural_violation.is_none(),
        first_failing_shift,
        structural_violation,
        sums: row_sums(q),
    }
}

/// Parses quads in the labelled text form. Lines without a label continue the
/// previous label, so table rows wrapped over several lines are accepted.
/// `#` starts a comment; blank lines are ignored.
pub fn parse_quads(text: &str, kind: Kind) -> Result<Vec<SeqQuad>> {
    let mut out = Vec::new();
    let mut cur: [Option<String>; 4] = Default::default();
    let mut last: Option<usize> = None;
    let mut start_line = 1;

    let flush = |cur: &mut [Option<String>; 4], line: usize, out: &mut Vec<SeqQuad>| -> Result<()> {
        if cur.iter().all(|c| c.is_none()) {
            return Ok(());
        }
        let mut seqs = Vec::with_capacity(4);
        for (label, slot) in ["X", "Y", "Z", "W"].iter().zip(cur.iter_mut()) {
            let body = slot.take().ok_or_else(|| Error::Parse {
                line,
                msg: format!("quad starting here is missing {label}="),
            })?;
            let s: SignSeq = body.parse().map_err(|e: Error| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
            seqs.push(s);
        }
        let d = seqs.pop().unwrap();
        let c = seqs.pop().unwrap();
        let b = seqs.pop().unwrap();
        let a = seqs.pop().unwrap();
        out.push(
            SeqQuad::new(kind, a, b, c, d).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?,
        );
        Ok(())
    };

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let label = line
            .split_once('=')
            .map(|(l, rest)| (l.trim().to_ascii_uppercase(), rest));
        match label {
            Some((l, rest)) => {
                let idx = match l.as_str() {
                    "X" | "A" => 0,
                    "Y" | "B" => 1,
                    "Z" | "C" => 2,
                    "W" | "D" => 3,
                    other => {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: format!("unknown label {other:?}"),
                        })
                    }
                };
                if cur[idx].is_some() {
                    flush(&mut cur, start_line, &mut out)?;
                }
                if cur.iter().all(|c| c.is_none()) {
                    start_line = lineno;
                }
                cur[idx] = Some(rest.trim().to_string());
                last = Some(idx);
            }
            None => match last {
                Some(idx) if cur[idx].is_some() => {
                    cur[idx].as_mut().unwrap().push_str(line);
                }
                _ => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "sequence line without a preceding X=/Y=/Z=/W= label".into(),
                    })
                }
            },
        }
    }
    flush(&mut cur, start_line, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: &str, b: &str, c: &str, d: &str, kind: Kind) -> SeqQuad {
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
    fn degenerate_n0_is_valid() {
        let quad = q("+", "+", "", "", Kind::Bs);
        assert_eq!(quad.n(), 0);
        assert!(verify(&quad).valid);
    }

    #[test]
    fn bs_2_1_example() {
        let quad = q("++", "+-", "+", "+", Kind::Bs);
        let r = verify(&quad);
        assert!(r.valid, "{r:?}");
        let s = r.sums;
        assert_eq!(s.a * s.a + s.b * s.b + s.c * s.c + s.d * s.d, 6);
    }

    #[test]
    fn length_mismatch_is_malformed() {
        let r = SeqQuad::new(
            Kind::Bs,
            "++".parse().unwrap(),
            "+".parse().unwrap(),
            "+".parse().unwrap(),
            "+".parse().unwrap(),
        );
        assert!(matches!(r, Err(Error::Malformed(_))));
        let r = SeqQuad::new(
            Kind::Bs,
            "++".parse().unwrap(),
            "++".parse().unwrap(),
            "++".parse().unwrap(),
            "++".parse().unwrap(),
        );
        assert!(matches!(r, Err(Error::Malformed(_))));
    }

    #[test]
    fn nns_needs_even_n() {
        let r = SeqQuad::new(
            Kind::Nns,
            "++".parse().unwrap(),
            "+-".parse().unwrap(),
            "+".parse().unwrap(),
            "+".parse().unwrap(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn structural_checks() {
        // NS(1): A = (x, +), B = (x, -).
        let good = q("++", "+-", "+", "+", Kind::Ns);
        assert!(verify(&good).valid);
        let bad = q("+-", "++", "+", "+", Kind::Ns);
        let r = verify(&bad);
        assert!(!r.valid);
        assert!(r.structural_violation.is_some());
        let nns = SeqQuad::structured(
            Kind::Nns,
            &"++".parse().unwrap(),
            "++".parse().unwrap(),
            "+-".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(nns.b.to_string(), "+--");
        assert!(nns.structural_violation().is_none());
    }

    #[test]
    fn sums_example() {
        let quad = q("++", "+-", "+", "+", Kind::Bs);
        let s = row_sums(&quad);
        assert_eq!((s.a, s.a_star), (2, 0));
        let back: SumProfile = s.to_string().parse().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parse_wrapped_and_multiple() {
        let text = "X=++\nY=+\n-\nZ=+\nW=+\n\n# second\nX=+\nY=+\nZ=\nW=\n";
        let qs = parse_quads(text, Kind::Bs).unwrap();
        assert_eq!(qs.len(), 2);
        assert_eq!(qs[0].b.to_string(), "+-");
        assert_eq!(qs[1].n(), 0);
        assert!(parse_quads("X=+*\nY=+\nZ=\nW=\n", Kind::Bs).is_err());
        assert!(parse_quads("X=++\nY=++\nZ=+\n", Kind::Bs).is_err());
        let round = parse_quads(&qs[0].to_text(), Kind::Bs).unwrap();
        assert_eq!(round[0], qs[0]);
    }
}
