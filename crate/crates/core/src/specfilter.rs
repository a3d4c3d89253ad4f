//! Power-spectral-density screening over fixed θ grids.
//!
//! For a valid quad `f_A + f_B + f_C + f_D = 4n+2` at every θ and each term
//! is nonnegative, so any pair whose two PSD values exceed `4n+2` at some
//! grid point cannot be completed.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::SignSeq;

/// Acceptance slack on the bound.
pub const PSD_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    points: Vec<f64>,
    label: String,
}

impl ThetaGrid {
    pub fn new(points: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Malformed("theta grid is empty".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed("theta grid must be strictly increasing".into()));
        }
        if points.iter().any(|&t| !(t > 0.0 && t <= 2.0 * PI + 1e-12)) {
            return Err(Error::Malformed("theta grid points must lie in (0, 2π]".into()));
        }
        Ok(ThetaGrid {
            points,
            label: label.into(),
        })
    }

    /// `θ = jπ/k` for `j = 1..=2k`.
    pub fn pi_over(k: usize) -> Self {
        let k = k.max(1);
        let points = (1..=2 * k).map(|j| j as f64 * PI / k as f64).collect();
        ThetaGrid {
            points,
            label: format!("pi-over-{k}"),
        }
    }

    /// `θ = 2jπ/l` for `j = 1..=l`.
    pub fn uniform(l: usize) -> Self {
        let l = l.max(1);
        let points = (1..=l).map(|j| 2.0 * PI * j as f64 / l as f64).collect();
        ThetaGrid {
            points,
            label: format!("l={l}"),
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Default screening stages: `θ = jπ/100` for BS, `l=50` then `l=1000`
    /// for the structured families.
    pub fn defaults_for(structured: bool) -> Vec<ThetaGrid> {
        if structured {
            vec![ThetaGrid::uniform(50), ThetaGrid::uniform(1000)]
        } else {
            vec![ThetaGrid::pi_over(100)]
        }
    }
}

impl fmt::Display for ThetaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl FromStr for ThetaGrid {
    type Err = Error;

    /// Accepts `pi-over-K`, `pi/K` and `l=L`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| -> Result<usize> {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| Error::Malformed(format!("bad grid size in {s:?}")))
        };
        if let Some(k) = s.strip_prefix("pi-over-").or_else(|| s.strip_prefix("pi/")) {
            Ok(ThetaGrid::pi_over(num(k)?))
        } else if let Some(l) = s.strip_prefix("l=") {
            Ok(ThetaGrid::uniform(num(l)?))
        } else {
            Err(Error::Malformed(format!(
                "unknown grid {s:?}; expected pi-over-K, pi/K or l=L"
            )))
        }
    }
}

/// Comma-separated list of grids, applied in order.
pub fn parse_grid_list(spec: &str) -> Result<Vec<ThetaGrid>> {
    spec.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Grid with precomputed `cos(jθ)` rows for shifts up to `max_len - 1`.
#[derive(Clone, Debug)]
pub struct PsdEvaluator {
    grid: ThetaGrid,
    max_len: usize,
    /// `cos[p * (max_len - 1) + (j - 1)] = cos(j θ_p)`.
    cos: Vec<f64>,
}

impl PsdEvaluator {
    pub fn new(grid: ThetaGrid, max_len: usize) -> Self {
        let w = max_len.saturating_sub(1);
        let mut cos = Vec::with_capacity(grid.points.len() * w);
        for &t in &grid.points {
            cos.extend((1..=w).map(|j| (j as f64 * t).cos()));
        }
        PsdEvaluator { grid, max_len, cos }
    }

    pub fn grid(&self) -> &ThetaGrid {
        &self.grid
    }

    fn eval_acf(&self, acf: &[i32], out: &mut [f64]) {
        let w = self.max_len.saturating_sub(1);
        debug_assert!(acf.len() <= self.max_len);
        let Some((&n0, rest)) = acf.split_first() else {
            return;
        };
        for (p, o) in out.iter_mut().enumerate() {
            let row = &self.cos[p * w..p * w + rest.len()];
            let tail: f64 = rest.iter().zip(row).map(|(&v, c)| v as f64 * c).sum();
            *o += n0 as f64 + 2.0 * tail;
        }
    }

    pub fn psd(&self, a: &SignSeq) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.points.len()];
        self.eval_acf(&self.acf(a), &mut out);
        out
    }

    fn acf(&self, a: &SignSeq) -> Vec<i32> {
        assert!(
            a.len() <= self.max_len,
            "sequence longer than the evaluator's table"
        );
        a.autocorrelations()
    }

    /// `f_A + f_B` over the grid.
    pub fn pair_psd(&self, a: &SignSeq, b: &SignSeq) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.points.len()];
        self.eval_acf(&self.acf(a), &mut out);
        self.eval_acf(&self.acf(b), &mut out);
        out
    }

    pub fn keep(&self, a: &SignSeq, b: &SignSeq, bound: f64) -> bool {
        self.pair_psd(a, b).iter().all(|&v| v <= bound + PSD_EPS)
    }
}

pub fn psd_vector(a: &SignSeq, g: &ThetaGrid) -> Vec<f64> {
    PsdEvaluator::new(g.clone(), a.len()).psd(a)
}

/// `true` keeps the pair: `f_A + f_B <= bound + ε` at every grid point.
pub fn pair_filter(a: &SignSeq, b: &SignSeq, bound: f64, g: &ThetaGrid) -> bool {
    PsdEvaluator::new(g.clone(), a.len().max(b.len())).keep(a, b, bound)
}
