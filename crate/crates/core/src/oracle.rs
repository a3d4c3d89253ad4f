//! Brute-force enumeration of every valid quad at tiny orders.
//!
//! Deliberately filter-free: each candidate is rejected only by the first
//! nonzero total autocorrelation.

use rayon::prelude::*;

use crate::equiv::PackedQuad;
use crate::error::{Error, Result};
use crate::quad::Kind;
use crate::seq::{alt_mask, low_mask, PackedSeq};
use crate::SeqQuad;

pub const BRUTE_BS_MAX_N: usize = 6;
pub const BRUTE_STRUCTURED_MAX_N: usize = 8;

#[inline]
fn zero_correlation(n: u32, s: &[PackedSeq; 4]) -> bool {
    (1..=n)
        .rev()
        .all(|k| s.iter().map(|x| x.paf(k)).sum::<i32>() == 0)
}

fn finish(n: usize, kind: Kind, mut found: Vec<[PackedSeq; 4]>) -> Vec<SeqQuad> {
    let mut quads: Vec<PackedQuad> = found
        .drain(..)
        .map(|seqs| PackedQuad {
            n: n as u32,
            kind,
            seqs,
        })
        .collect();
    quads.sort_by_key(|p| p.lex_key());
    quads.iter().map(|p| p.to_quad()).collect()
}

/// Every `BS(n+1, n)`, sorted in the canonical order.
pub fn brute_bs(n: usize) -> Result<Vec<SeqQuad>> {
    if n > BRUTE_BS_MAX_N {
        return Err(Error::Resource(format!(
            "brute_bs is capped at n = {BRUTE_BS_MAX_N}, got {n}"
        )));
    }
    let ab = 1u64 << (n + 1);
    let cd = 1u64 << n;
    let nn = n as u32;
    let found: Vec<[PackedSeq; 4]> = (0..ab)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut out = Vec::new();
            let pa = PackedSeq::from_bits(a, nn + 1);
            for b in 0..ab {
                let pb = PackedSeq::from_bits(b, nn + 1);
                for c in 0..cd {
                    let pc = PackedSeq::from_bits(c, nn);
                    for d in 0..cd {
                        let s = [pa, pb, pc, PackedSeq::from_bits(d, nn)];
                        if zero_correlation(nn, &s) {
                            out.push(s);
                        }
                    }
                }
            }
            out
        })
        .collect();
    Ok(finish(n, Kind::Bs, found))
}

/// Every NS(n) or NNS(n): `A = (x, +1)`, `B` coupled to `A`, `C, D` free.
pub fn brute_structured(n: usize, kind: Kind) -> Result<Vec<SeqQuad>> {
    if !kind.is_structured() {
        return Err(Error::Precondition("brute_structured needs NS or NNS".into()));
    }
    if n > BRUTE_STRUCTURED_MAX_N {
        return Err(Error::Resource(format!(
            "brute_structured is capped at n = {BRUTE_STRUCTURED_MAX_N}, got {n}"
        )));
    }
    if kind == Kind::Nns && n % 2 == 1 {
        return Err(Error::Precondition(format!("NNS({n}) requires even n")));
    }
    let nn = n as u32;
    let cd = 1u64 << n;
    let found: Vec<[PackedSeq; 4]> = (0..cd)
        .into_par_iter()
        .flat_map_iter(|x| {
            let x = x & low_mask(nn);
            let bx = if kind == Kind::Nns { x ^ alt_mask(nn) } else { x };
            // bit n set means b_{n+1} = -1; a_{n+1} = +1 leaves it clear
            let pa = PackedSeq::from_bits(x, nn + 1);
            let pb = PackedSeq::from_bits(bx | (1u64 << nn), nn + 1);
            let mut out = Vec::new();
            for c in 0..cd {
                let pc = PackedSeq::from_bits(c, nn);
                for d in 0..cd {
                    let s = [pa, pb, pc, PackedSeq::from_bits(d, nn)];
                    if zero_correlation(nn, &s) {
                        out.push(s);
                    }
                }
            }
            out
        })
        .collect();
    Ok(finish(n, kind, found))
}

/// Dispatches to [`brute_bs`] or [`brute_structured`].
pub fn brute(n: usize, kind: Kind) -> Result<Vec<SeqQuad>> {
    match kind {
        Kind::Bs => brute_bs(n),
        _ => brute_structured(n, kind),
    }
}
