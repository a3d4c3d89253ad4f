//! ±1 sequences, aperiodic autocorrelation and the Hall-polynomial power
//! spectrum.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Longest sequence the packed representation can hold.
pub const PACKED_MAX_LEN: usize = 64;

/// A finite sequence of `+1`/`-1` values.
///
/// Stored one byte per element. [`PackedSeq`] is the bit-packed twin used by
/// the enumeration hot paths.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SignSeq(Vec<i8>);

impl SignSeq {
    /// Builds a sequence, rejecting anything that is not `±1`.
    pub fn new(elements: Vec<i8>) -> Result<Self> {
        if let Some(pos) = elements.iter().position(|&x| x != 1 && x != -1) {
            return Err(Error::Malformed(format!(
                "element {} at index {pos} is not +1 or -1",
                elements[pos]
            )));
        }
        Ok(SignSeq(elements))
    }

    pub(crate) fn from_vec_unchecked(elements: Vec<i8>) -> Self {
        debug_assert!(elements.iter().all(|&x| x == 1 || x == -1));
        SignSeq(elements)
    }

    pub fn empty() -> Self {
        SignSeq(Vec::new())
    }

    pub fn ones(len: usize) -> Self {
        SignSeq(vec![1; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i8> {
        self.0
    }

    /// 1-based element access, matching the usual `a_1 .. a_n` indexing.
    pub fn at(&self, i: usize) -> i8 {
        self.0[i - 1]
    }

    pub fn sum(&self) -> i32 {
        self.0.iter().map(|&x| x as i32).sum()
    }

    /// Sum of the alternated sequence `a_1 - a_2 + a_3 - ...`.
    pub fn alt_sum(&self) -> i32 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &x)| if i % 2 == 0 { x as i32 } else { -(x as i32) })
            .sum()
    }

    pub fn negated(&self) -> Self {
        SignSeq(self.0.iter().map(|&x| -x).collect())
    }

    pub fn reversed(&self) -> Self {
        SignSeq(self.0.iter().rev().copied().collect())
    }

    /// `A*`: every even-position (1-based) element negated.
    pub fn alternated(&self) -> Self {
        SignSeq(
            self.0
                .iter()
                .enumerate()
                .map(|(i, &x)| if i % 2 == 0 { x } else { -x })
                .collect(),
        )
    }

    /// Aperiodic autocorrelation at shift `s`; zero once `s >= len`.
    pub fn paf(&self, s: usize) -> i32 {
        let v = &self.0;
        if s >= v.len() {
            return 0;
        }
        v.iter()
            .zip(&v[s..])
            .map(|(&x, &y)| (x as i32) * (y as i32))
            .sum()
    }

    /// `[N(0), N(1), ..., N(len-1)]`.
    pub fn autocorrelations(&self) -> Vec<i32> {
        (0..self.len()).map(|s| self.paf(s)).collect()
    }

    /// `f_A(θ) = N(0) + 2 Σ_{j≥1} N(j) cos(jθ)`, i.e. `|h_A(e^{iθ})|²`.
    pub fn hall_f(&self, theta: f64) -> f64 {
        let acf = self.autocorrelations();
        hall_from_acf(&acf, theta)
    }

    pub fn packed(&self) -> Result<PackedSeq> {
        PackedSeq::from_signs(&self.0)
    }
}

/// Evaluates the PSD from a precomputed autocorrelation vector.
pub fn hall_from_acf(acf: &[i32], theta: f64) -> f64 {
    let Some((&n0, rest)) = acf.split_first() else {
        return 0.0;
    };
    let tail: f64 = rest
        .iter()
        .enumerate()
        .map(|(j, &v)| v as f64 * ((j + 1) as f64 * theta).cos())
        .sum();
    n0 as f64 + 2.0 * tail
}

impl fmt::Display for SignSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &x in &self.0 {
            f.write_str(if x == 1 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignSeq({self})")
    }
}

impl FromStr for SignSeq {
    type Err = Error;

    /// Parses the `+`/`-` notation. Whitespace is ignored so that wrapped
    /// table rows can be joined by simple concatenation.
    fn from_str(s: &str) -> Result<Self> {
        let mut v = Vec::with_capacity(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '+' => v.push(1),
                '-' => v.push(-1),
                c if c.is_whitespace() => {}
                c => {
                    return Err(Error::Malformed(format!(
                        "invalid sequence character {c:?} at column {}",
                        i + 1
                    )))
                }
            }
        }
        Ok(SignSeq(v))
    }
}

/// Bit-packed sign sequence: bit `i` is set when element `i` (0-based) is `-1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct PackedSeq {
    pub bits: u64,
    pub len: u32,
}

#[inline]
pub(crate) fn low_mask(len: u32) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Mask of the odd 0-based positions, i.e. the even 1-based ones.
#[inline]
pub(crate) fn alt_mask(len: u32) -> u64 {
    0xAAAA_AAAA_AAAA_AAAAu64 & low_mask(len)
}

impl PackedSeq {
    pub fn from_signs(v: &[i8]) -> Result<Self> {
        if v.len() > PACKED_MAX_LEN {
            return Err(Error::Resource(format!(
                "sequence length {} exceeds packed limit {PACKED_MAX_LEN}",
                v.len()
            )));
        }
        let mut bits = 0u64;
        for (i, &x) in v.iter().enumerate() {
            if x == -1 {
                bits |= 1 << i;
            }
        }
        Ok(PackedSeq {
            bits,
            len: v.len() as u32,
        })
    }

    pub fn from_bits(bits: u64, len: u32) -> Self {
        PackedSeq {
            bits: bits & low_mask(len),
            len,
        }
    }

    pub fn get(&self, i: u32) -> i8 {
        if self.bits >> i & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn to_seq(&self) -> SignSeq {
        SignSeq((0..self.len).map(|i| self.get(i)).collect())
    }

    #[inline]
    pub fn paf(&self, s: u32) -> i32 {
        if s >= self.len {
            return 0;
        }
        let overlap = self.len - s;
        let diff = (self.bits ^ (self.bits >> s)) & low_mask(overlap);
        overlap as i32 - 2 * diff.count_ones() as i32
    }

    pub fn sum(&self) -> i32 {
        self.len as i32 - 2 * self.bits.count_ones() as i32
    }

    pub fn alt_sum(&self) -> i32 {
        self.alternated().sum()
    }

    #[inline]
    pub fn negated(&self) -> Self {
        PackedSeq {
            bits: !self.bits & low_mask(self.len),
            len: self.len,
        }
    }

    #[inline]
    pub fn reversed(&self) -> Self {
        if self.len == 0 {
            return *self;
        }
        PackedSeq {
            bits: self.bits.reverse_bits() >> (64 - self.len),
            len: self.len,
        }
    }

    #[inline]
    pub fn alternated(&self) -> Self {
        PackedSeq {
            bits: self.bits ^ alt_mask(self.len),
            len: self.len,
        }
    }

    /// Sort key realising lexicographic order with `+1 < -1`: the first
    /// element lands in the most significant bit.
    #[inline]
    pub fn lex_key(&self) -> u64 {
        self.reversed().bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: &str) -> SignSeq {
        x.parse().unwrap()
    }

    #[test]
    fn paf_small_cases() {
        assert_eq!(s("+-+").paf(1), -2);
        assert_eq!(s("++++").paf(3), 1);
        assert_eq!(s("++++").paf(0), 4);
        assert_eq!(s("+-+").paf(7), 0);
        assert_eq!(SignSeq::empty().paf(0), 0);
    }

    #[test]
    fn hall_f_examples() {
        assert!((s("++-").hall_f(0.0) - 1.0).abs() < 1e-12);
        assert!((s("++-").hall_f(std::f64::consts::PI) - 1.0).abs() < 1e-12);
        assert!((s("++").hall_f(std::f64::consts::FRAC_PI_2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sums() {
        assert_eq!(s("++").sum(), 2);
        assert_eq!(s("++").alt_sum(), 0);
        assert_eq!(s("+-+-").alt_sum(), 4);
    }

    #[test]
    fn parse_rejects_bad_characters() {
        assert!("+-x".parse::<SignSeq>().is_err());
        assert_eq!(s("+ -\n+").len(), 3);
        assert!(SignSeq::new(vec![1, 0]).is_err());
    }

    fn arb_seq(max: usize) -> impl Strategy<Value = SignSeq> {
        prop::collection::vec(prop::bool::ANY, 0..max).prop_map(|v| {
            SignSeq::from_vec_unchecked(v.into_iter().map(|b| if b { 1 } else { -1 }).collect())
        })
    }

    proptest! {
        #[test]
        fn paf_invariances(a in arb_seq(40), shift in 0usize..45) {
            prop_assert_eq!(a.paf(0), a.len() as i32);
            prop_assert_eq!(a.reversed().paf(shift), a.paf(shift));
            prop_assert_eq!(a.negated().paf(shift), a.paf(shift));
            let sign = if shift % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(a.alternated().paf(shift), sign * a.paf(shift));
        }

        #[test]
        fn packed_agrees(a in arb_seq(64), shift in 0u32..66) {
            let p = a.packed().unwrap();
            prop_assert_eq!(p.to_seq(), a.clone());
            prop_assert_eq!(p.paf(shift), a.paf(shift as usize));
            prop_assert_eq!(p.sum(), a.sum());
            prop_assert_eq!(p.alt_sum(), a.alt_sum());
            prop_assert_eq!(p.reversed().to_seq(), a.reversed());
            prop_assert_eq!(p.negated().to_seq(), a.negated());
            prop_assert_eq!(p.alternated().to_seq(), a.alternated());
        }

        #[test]
        fn hall_is_nonnegative_with_endpoint_values(a in arb_seq(30), theta in 0.0f64..6.3) {
            prop_assert!(a.hall_f(theta) >= -1e-9);
            let sum = a.sum() as f64;
            let alt = a.alt_sum() as f64;
            prop_assert!((a.hall_f(0.0) - sum * sum).abs() < 1e-9);
            prop_assert!((a.hall_f(std::f64::consts::PI) - alt * alt).abs() < 1e-9);
        }

        #[test]
        fn hall_matches_complex_modulus(a in arb_seq(20), theta in 0.0f64..6.3) {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (j, &x) in a.as_slice().iter().enumerate() {
                re += x as f64 * (j as f64 * theta).cos();
                im += x as f64 * (j as f64 * theta).sin();
            }
            prop_assert!((a.hall_f(theta) - (re * re + im * im)).abs() < 1e-9);
        }
    }
}
